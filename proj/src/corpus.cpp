#include "nsx/corpus.hpp"

#include <filesystem>
#include <functional>

#include "nsx/error.hpp"
#include "nsx/parser.hpp"

namespace nsx {

namespace {

namespace fs = std::filesystem;

ProofScript find_script(const std::vector<ProofScript>& all,
                        const std::string& name) {
  for (const auto& s : all)
    if (s.name == name) return s;
  throw ScriptError("corpus: script '" + name + "' not found");
}

CorpusCheck ok_check(const std::string& name, const std::string& detail = "") {
  return CorpusCheck{name, true, detail};
}

CorpusCheck fail_check(const std::string& name, const std::string& detail) {
  return CorpusCheck{name, false, detail};
}

CorpusCheck from_report(const CheckReport& r) {
  if (r.pass())
    return ok_check(r.name, std::to_string(r.trials) + " trials, 0 failures");
  return fail_check(r.name, r.failures.front() + " (" +
                                std::to_string(r.failures.size()) +
                                " failures)");
}

// Mutation sensitivity: the corrupted term must fail within the budget on at
// least one of five consecutive seeds.
CorpusCheck mutation_check(
    const std::string& name,
    const std::function<CheckReport(uint64_t seed, long long trials)>& run,
    uint64_t seed, long long budget) {
  for (uint64_t s = seed; s < seed + 5; ++s) {
    CheckReport r = run(s, budget);
    if (!r.pass())
      return ok_check(name, "detected with seed " + std::to_string(s) + ": " +
                                r.failures.front());
  }
  return fail_check(name, "corrupted term not detected on 5 seeds");
}

CorpusEntry run_cri(const CorpusOptions& opt) {
  CorpusEntry e;
  e.name = "cri";
  try {
    auto scripts = load_scripts(opt.dir + "/cri.nsp");
    ProofScript s = find_script(scripts, "cri");
    ExtractedWitness ew = run_script(s);
    e.checks.push_back(ok_check("extract",
                                "term nodes: " + std::to_string(ew.term_nodes)));
    for (const char* bn : {"cri-id", "cri-sq", "cri-ramp"}) {
      ModulusBundle b = ModulusBundle::load(opt.dir + "/" + bn + ".bundle");
      e.checks.push_back(from_report(
          verify_cri(ew.term, b, 1, 8, opt.trials, opt.seed)));
    }
    {
      ModulusBundle b = ModulusBundle::load(opt.dir + "/cri-id.bundle");
      TermPtr bad = mutate_ignore_precision(ew.term, 2);
      e.checks.push_back(mutation_check(
          "cri/mutation",
          [&](uint64_t seed, long long budget) {
            return verify_cri(bad, b, 1, 8, budget / 8, seed);
          },
          opt.seed, opt.mutation_budget));
    }
    ExtractedWitness h = herbrandise(s);
    bool bounded = false;
    {
      std::function<void(const FormulaPtr&)> scan = [&](const FormulaPtr& g) {
        if (auto v = [&]() -> bool {
              if (g->kind != Formula::Kind::ForAll) return false;
              const FormulaPtr& body = g->a;
              return body->kind == Formula::Kind::Implies &&
                     body->a->kind == Formula::Kind::Atom &&
                     body->a->rel == kRelLe0;
            }())
          bounded = true;
        switch (g->kind) {
          case Formula::Kind::Not:
            scan(g->a);
            return;
          case Formula::Kind::And:
          case Formula::Kind::Or:
          case Formula::Kind::Implies:
            scan(g->a);
            scan(g->b);
            return;
          case Formula::Kind::ForAll:
          case Formula::Kind::Exists:
            scan(g->a);
            return;
          default:
            return;
        }
      };
      scan(h.statement);
    }
    e.checks.push_back(bounded
                           ? ok_check("cri/herbrandise-shape",
                                      "bounded antecedent present")
                           : fail_check("cri/herbrandise-shape",
                                        "no bounded antecedent in statement"));
    ReverseReport rr = reverse_check(h, s);
    e.checks.push_back(rr.pass ? ok_check("cri/reverse-check")
                               : fail_check("cri/reverse-check",
                                            rr.lines.empty() ? "" : rr.lines.back()));
    // Herbrandisation dominates extraction: where the bounded antecedent
    // holds (valid bundles), the plain conclusion holds.
    {
      ModulusBundle b = ModulusBundle::load(opt.dir + "/cri-id.bundle");
      CheckReport dom = verify_cri(ew.term, b, 1, 4, 50, opt.seed + 17);
      e.checks.push_back(dom.pass()
                             ? ok_check("cri/herb-dominance",
                                        "plain conclusion holds under the "
                                        "bounded antecedent")
                             : fail_check("cri/herb-dominance",
                                          dom.failures.front()));
    }
  } catch (const Error& err) {
    e.checks.push_back(fail_check("cri", err.what()));
  }
  return e;
}

CorpusEntry run_ulc(const CorpusOptions& opt) {
  CorpusEntry e;
  e.name = "ulc";
  try {
    auto scripts = load_scripts(opt.dir + "/ulc.nsp");
    ProofScript s = find_script(scripts, "ulc");
    ExtractedWitness ew = run_script(s);
    e.checks.push_back(ok_check("extract",
                                "term nodes: " + std::to_string(ew.term_nodes)));
    ModulusBundle b = ModulusBundle::load(opt.dir + "/ulc-shift.bundle");
    e.checks.push_back(
        from_report(verify_ulc(ew.term, b, 256, 1, 8, opt.trials, opt.seed)));
    TermPtr bad = mutate_ignore_precision(ew.term, 4);
    e.checks.push_back(mutation_check(
        "ulc/mutation",
        [&](uint64_t seed, long long budget) {
          return verify_ulc(bad, b, 256, 1, 8, budget / 8, seed);
        },
        opt.seed, opt.mutation_budget));
  } catch (const Error& err) {
    e.checks.push_back(fail_check("ulc", err.what()));
  }
  return e;
}

CorpusEntry run_ftc(const CorpusOptions& opt) {
  CorpusEntry e;
  e.name = "ftc-nf";
  try {
    auto scripts = load_scripts(opt.dir + "/ftc-nf.nsp");
    ProofScript s = find_script(scripts, "ftc-nf");
    TranslationReport tr = run_translation(s);
    e.checks.push_back(tr.goal_matched
                           ? ok_check("ftc-nf/normal-form",
                                      "threshold normal form reached")
                           : fail_check("ftc-nf/normal-form", "goal mismatch"));
    ExtractedWitness ew = run_script(s);
    if (ew.terms.size() != 2)
      e.checks.push_back(fail_check("ftc-nf/extract",
                                    "expected two components, got " +
                                        std::to_string(ew.terms.size())));
    else
      e.checks.push_back(ok_check("ftc-nf/extract", "two threshold terms"));
    ModulusBundle b = ModulusBundle::load(opt.dir + "/ftc-id.bundle");
    e.checks.push_back(from_report(verify_ftc(ew.terms[0].second,
                                              ew.terms[1].second, b, 4, 1, 8,
                                              opt.trials / 12 + 1, opt.seed)));
    TermPtr bad = mutate_ignore_precision(ew.terms[0].second, 1);
    e.checks.push_back(mutation_check(
        "ftc-nf/mutation",
        [&](uint64_t seed, long long budget) {
          return verify_ftc(bad, ew.terms[1].second, b, 4, 1, 8,
                            std::min<long long>(budget / 8, 40), seed);
        },
        opt.seed, opt.mutation_budget));
  } catch (const Error& err) {
    e.checks.push_back(fail_check("ftc-nf", err.what()));
  }
  return e;
}

CorpusEntry run_mct(const CorpusOptions& opt) {
  CorpusEntry e;
  e.name = "mct";
  try {
    auto scripts = load_scripts(opt.dir + "/mct.nsp");
    ProofScript d1 = find_script(scripts, "mct-dir1");
    ProofScript d2 = find_script(scripts, "mct-dir2");
    ExtractedWitness w1 = run_script(d1);
    ExtractedWitness w2 = run_script(d2);
    e.checks.push_back(ok_check("mct/extract", "two directions extracted"));
    ModulusBundle b = ModulusBundle::load(opt.dir + "/mct-plateau.bundle");
    TermPtr s_term;
    for (const auto& [n, t] : w1.terms)
      if (n == "m") s_term = t;
    TermPtr u_term;
    for (const auto& [n, t] : w2.terms)
      if (n == "nn") u_term = t;
    if (!s_term || !u_term) {
      e.checks.push_back(fail_check("mct/components",
                                    "expected witnesses named m and n"));
      return e;
    }
    e.checks.push_back(
        from_report(verify_mct_dir1(s_term, b, opt.mct_samples, opt.seed)));
    e.checks.push_back(
        from_report(verify_mct_dir2(u_term, b, opt.mct_samples, opt.seed)));
    TermPtr bad = mutate_decrement(s_term, 3);
    e.checks.push_back(mutation_check(
        "mct/mutation",
        [&](uint64_t seed, long long budget) {
          return verify_mct_dir1(bad, b, std::min<long long>(budget, 400),
                                 seed);
        },
        opt.seed, opt.mutation_budget));
    ReverseReport rr = reverse_check(herbrandise(d1), d1);
    e.checks.push_back(rr.pass ? ok_check("mct/reverse-check")
                               : fail_check("mct/reverse-check",
                                            rr.lines.empty() ? ""
                                                             : rr.lines.back()));
  } catch (const Error& err) {
    e.checks.push_back(fail_check("mct", err.what()));
  }
  return e;
}

CorpusEntry run_stp(const CorpusOptions& opt) {
  CorpusEntry e;
  e.name = "stp-hbl-hei";
  try {
    auto scripts = load_scripts(opt.dir + "/stp-hbl-hei.nsp");
    for (const auto& s : scripts) {
      try {
        TranslationReport tr = run_translation(s);
        if (!tr.goal_matched) {
          e.checks.push_back(fail_check(s.name, "goal mismatch"));
          continue;
        }
        e.checks.push_back(ok_check(
            s.name, std::to_string(tr.nf.forall_block.size()) + " universal / " +
                        std::to_string(tr.nf.exists_block.size()) +
                        " existential variables; matrix internal"));
      } catch (const Error& err) {
        e.checks.push_back(fail_check(s.name, err.what()));
      }
    }
  } catch (const Error& err) {
    e.checks.push_back(fail_check("stp-hbl-hei", err.what()));
  }
  return e;
}

}  // namespace

CorpusSummary run_corpus(const CorpusOptions& opt) {
  CorpusSummary sum;
  struct EntryDef {
    const char* name;
    CorpusEntry (*fn)(const CorpusOptions&);
  };
  const EntryDef defs[] = {
      {"cri", run_cri},       {"ulc", run_ulc},
      {"ftc-nf", run_ftc},    {"mct", run_mct},
      {"stp-hbl-hei", run_stp},
  };
  bool any = false;
  for (const auto& d : defs) {
    if (!opt.filter.empty() &&
        std::string(d.name).find(opt.filter) == std::string::npos)
      continue;
    any = true;
    sum.entries.push_back(d.fn(opt));
  }
  if (!any)
    sum.warnings.push_back("filter '" + opt.filter +
                           "' matched no corpus entry");
  return sum;
}

}  // namespace nsx
