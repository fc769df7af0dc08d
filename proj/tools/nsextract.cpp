// Command-line front end: translate, extract, eval, verify, corpus.
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "nsx/corpus.hpp"
#include "nsx/error.hpp"
#include "nsx/harness.hpp"
#include "nsx/parser.hpp"
#include "nsx/script.hpp"
#include "nsx/typecheck.hpp"

using namespace nsx;
using json = nlohmann::ordered_json;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScriptError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json nf_json(const NormalForm& nf) {
  json blocks_fa = json::array(), blocks_ex = json::array();
  for (auto& [n, t] : nf.forall_block)
    blocks_fa.push_back({{"var", n}, {"type", t.to_string()}});
  for (auto& [n, t] : nf.exists_block)
    blocks_ex.push_back({{"var", n}, {"type", t.to_string()}});
  return json{{"forall_block", blocks_fa},
              {"exists_block", blocks_ex},
              {"matrix", print_formula(nf.matrix)}};
}

json trace_json(const std::vector<StepRecord>& trace) {
  json arr = json::array();
  for (const auto& r : trace) {
    json e{{"rule", r.rule}, {"path", r.path}};
    if (!r.side_conditions.empty()) e["side_conditions"] = r.side_conditions;
    if (!r.transformer.empty()) {
      json tr = json::array();
      for (auto& [v, t] : r.transformer)
        tr.push_back({{"var", v}, {"term", t}});
      e["transformer"] = tr;
    }
    arr.push_back(std::move(e));
  }
  return arr;
}

json witness_json(const ExtractedWitness& ew) {
  json terms = json::array();
  for (auto& [n, t] : ew.terms)
    terms.push_back({{"var", n}, {"term", print_term(t)}});
  json out{{"name", ew.name},
           {"system", ew.system},
           {"herbrandised", ew.herbrandised},
           {"term", ew.term ? print_term(ew.term) : ""},
           {"terms", terms},
           {"statement", print_formula(ew.statement)},
           {"trace", trace_json(ew.trace)},
           {"metrics", {{"term_nodes", ew.term_nodes}, {"steps", ew.steps}}}};
  if (!ew.warnings.empty()) out["warnings"] = ew.warnings;
  return out;
}

json report_json(const CheckReport& r) {
  return json{{"name", r.name},
              {"trials", r.trials},
              {"failures", r.failures}};
}

int cmd_translate(const std::string& file, const std::string& emit) {
  std::string text = slurp(file);
  auto forms = parse_sexprs(text);
  if (!forms.empty() && forms[0].head() == "script") {
    json out = json::array();
    for (const auto& s : parse_script_text(text)) {
      TranslationReport tr = run_translation(s);
      json e{{"name", s.name},
             {"goal_matched", tr.goal_matched},
             {"normal_form", nf_json(tr.nf)},
             {"trace", trace_json(tr.trace)}};
      if (emit == "json")
        out.push_back(std::move(e));
      else
        std::cout << s.name
                  << (tr.goal_matched ? ": goal matched\n" : ": GOAL MISMATCH\n")
                  << print_formula(tr.nf.render()) << "\n";
      if (!tr.goal_matched) {
        if (emit == "json") std::cout << out.dump(2) << "\n";
        return 1;
      }
    }
    if (emit == "json") std::cout << out.dump(2) << "\n";
    return 0;
  }
  // A formula file: optional (param ...) and (relation ...) sections, then
  // one formula.
  ParamEnv params;
  RelTable rels = RelTable::builtins();
  FormulaPtr f;
  for (const auto& e : forms) {
    if (e.head() == "param") {
      params[e[1].atom] = FinType::from_sexpr(e[2]);
    } else if (e.head() == "relation") {
      RelSig sig;
      for (const auto& ty : e[2].items)
        sig.argtypes.push_back(FinType::from_sexpr(ty));
      rels.rels[e[1].atom] = std::move(sig);
    } else {
      MetaSupply metas;
      std::vector<std::pair<std::string, FinType>> scope;
      f = parse_formula(e, params, metas, scope);
    }
  }
  if (!f) throw ScriptError("no formula found in " + file);
  typecheck_formula(desugar(f), rels);
  std::vector<SstTraceEntry> trace;
  NormalForm nf = s_st_translate_traced(f, &trace);
  if (emit == "json") {
    json jt = json::array();
    for (auto& t : trace) jt.push_back({{"clause", t.clause}, {"at", t.at}});
    json out{{"normal_form", nf_json(nf)}, {"trace", jt}};
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << print_formula(nf.render()) << "\n";
  }
  return 0;
}

int cmd_extract(const std::string& file, const std::string& out_path,
                bool herb, const std::string& system_override) {
  auto scripts = load_scripts(file);
  json out = json::array();
  for (auto& s : scripts) {
    if (!system_override.empty()) s.system = system_override;
    ExtractedWitness ew = herb ? herbrandise(s) : run_script(s);
    out.push_back(witness_json(ew));
  }
  json result = out.size() == 1 ? out[0] : out;
  if (!out_path.empty()) {
    std::ofstream o(out_path);
    o << result.dump(2) << "\n";
    std::cout << "report written to " << out_path << "\n";
  } else {
    std::cout << result.dump(2) << "\n";
  }
  return 0;
}

int cmd_eval(const std::string& file, const std::vector<std::string>& args,
             long long fuel) {
  TermPtr t = typecheck_term(parse_term(slurp(file))).term;
  Fuel f{fuel};
  ValuePtr v = evaluate(t, f, {});
  for (const auto& a : args) {
    TermPtr at = typecheck_term(parse_term(slurp(a))).term;
    v = apply_value(v, evaluate(at, f, {}), f);
  }
  std::cout << print_value(v) << "\n";
  return 0;
}

int cmd_verify(const std::string& script_file, const std::string& bundle_file,
               long long trials, uint64_t seed, bool herb,
               const std::string& emit) {
  ModulusBundle b = ModulusBundle::load(bundle_file);
  auto scripts = load_scripts(script_file);
  json checks = json::array();
  bool ok = true;
  auto add = [&](const CheckReport& r) {
    ok = ok && r.pass();
    if (emit == "json")
      checks.push_back(report_json(r));
    else
      std::cout << (r.pass() ? "pass" : "FAIL") << " " << r.name << " ("
                << r.trials << " trials"
                << (r.pass() ? "" : ": " + r.failures.front()) << ")\n";
  };
  if (b.kind == "cri") {
    ExtractedWitness ew =
        herb ? herbrandise(scripts[0]) : run_script(scripts[0]);
    add(verify_cri(ew.term, b, 1, 8, trials, seed));
  } else if (b.kind == "ulc") {
    ExtractedWitness ew = run_script(scripts[0]);
    add(verify_ulc(ew.term, b, 256, 1, 8, trials, seed));
  } else if (b.kind == "mct") {
    ExtractedWitness w1 = run_script(scripts[0]);
    TermPtr s_term;
    for (auto& [n, t] : w1.terms)
      if (n == "m") s_term = t;
    add(verify_mct_dir1(s_term, b, trials, seed));
    if (scripts.size() > 1) {
      ExtractedWitness w2 = run_script(scripts[1]);
      TermPtr u_term;
      for (auto& [n, t] : w2.terms)
        if (n == "nn") u_term = t;
      add(verify_mct_dir2(u_term, b, trials, seed));
    }
  } else if (b.kind == "ftc") {
    ExtractedWitness ew = run_script(scripts[0]);
    add(verify_ftc(ew.terms[0].second, ew.terms[1].second, b, 4, 1, 8,
                   std::max<long long>(trials / 12, 5), seed));
  } else {
    throw ScriptError("unknown bundle kind '" + b.kind + "'");
  }
  if (emit == "json") std::cout << json{{"checks", checks}}.dump(2) << "\n";
  return ok ? 0 : 1;
}

int cmd_corpus(const CorpusOptions& opt, const std::string& emit) {
  CorpusSummary sum = run_corpus(opt);
  if (emit == "json") {
    json entries = json::array();
    for (const auto& e : sum.entries) {
      json checks = json::array();
      for (const auto& c : e.checks)
        checks.push_back(
            {{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
      entries.push_back(
          {{"name", e.name}, {"pass", e.pass()}, {"checks", checks}});
    }
    std::cout << json{{"entries", entries}, {"warnings", sum.warnings}}.dump(2)
              << "\n";
  } else {
    for (const auto& e : sum.entries) {
      std::cout << (e.pass() ? "pass " : "FAIL ") << e.name << "\n";
      for (const auto& c : e.checks)
        std::cout << "  " << (c.pass ? "pass " : "FAIL ") << c.name
                  << (c.detail.empty() ? "" : " (" + c.detail + ")") << "\n";
    }
    for (const auto& w : sum.warnings) std::cout << "warning: " << w << "\n";
  }
  return sum.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nsextract: normal-form rewriting and witness extraction"};
  app.require_subcommand(1);

  std::string emit = "text";
  uint64_t seed = 1;
  long long trials = 500;
  long long fuel = 10'000'000;
  app.add_option("--emit", emit, "output format: json|text")
      ->check(CLI::IsMember({"json", "text", "sexpr"}));
  app.add_option("--seed", seed, "sampler seed");
  app.add_option("--trials", trials, "verification trials");
  app.add_option("--fuel", fuel, "evaluation step budget");

  std::string file, out_path, bundle_file, system_override, filter,
      dir = "corpus";
  bool herb = false;
  std::vector<std::string> eval_args;

  auto* t = app.add_subcommand("translate", "normal-form translation");
  t->fallthrough();
  t->add_option("file", file)->required();

  auto* x =
      app.add_subcommand("extract", "run a proof script and extract terms");
  x->fallthrough();
  x->add_option("file", file)->required();
  x->add_option("--out", out_path, "write the JSON report here");
  x->add_flag("--herbrandise", herb, "keep the full witness tuple");
  x->add_option("--system", system_override, "override the system flag")
      ->check(CLI::IsMember({"P", "P0", "H"}));

  auto* e = app.add_subcommand("eval", "evaluate a closed term");
  e->fallthrough();
  e->add_option("file", file)->required();
  e->add_option("--args", eval_args, "argument term files");

  auto* v =
      app.add_subcommand("verify", "run a numeric oracle on extracted terms");
  v->fallthrough();
  v->add_option("file", file)->required();
  v->add_option("--bundle", bundle_file, "modulus bundle")->required();
  v->add_flag("--herbrandise", herb);

  auto* c = app.add_subcommand("corpus", "run the shipped case studies");
  c->fallthrough();
  c->add_option("--filter", filter, "substring filter on entry names");
  c->add_option("--dir", dir, "corpus directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*t) return cmd_translate(file, emit == "sexpr" ? "text" : emit);
    if (*x) return cmd_extract(file, out_path, herb, system_override);
    if (*e) return cmd_eval(file, eval_args, fuel);
    if (*v) return cmd_verify(file, bundle_file, trials, seed, herb, emit);
    if (*c) {
      CorpusOptions opt;
      opt.dir = dir;
      opt.filter = filter;
      opt.seed = seed;
      opt.trials = trials;
      opt.fuel = fuel;
      return cmd_corpus(opt, emit);
    }
  } catch (const FuelExhausted& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  } catch (const Error& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
