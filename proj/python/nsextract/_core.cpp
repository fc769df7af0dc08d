// Python bindings: thin string-in, dict-out wrappers over the main
// operations.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nsx/corpus.hpp"
#include "nsx/error.hpp"
#include "nsx/harness.hpp"
#include "nsx/parser.hpp"
#include "nsx/script.hpp"
#include "nsx/typecheck.hpp"

namespace py = pybind11;
using namespace nsx;

namespace {

py::dict nf_dict(const NormalForm& nf) {
  py::list fa, ex;
  for (auto& [n, t] : nf.forall_block)
    fa.append(py::make_tuple(n, t.to_string()));
  for (auto& [n, t] : nf.exists_block)
    ex.append(py::make_tuple(n, t.to_string()));
  py::dict d;
  d["forall_block"] = fa;
  d["exists_block"] = ex;
  d["matrix"] = print_formula(nf.matrix);
  return d;
}

py::dict witness_dict(const ExtractedWitness& ew) {
  py::dict d;
  d["name"] = ew.name;
  d["system"] = ew.system;
  d["herbrandised"] = ew.herbrandised;
  d["term"] = ew.term ? print_term(ew.term) : std::string();
  py::list terms;
  for (auto& [n, t] : ew.terms) terms.append(py::make_tuple(n, print_term(t)));
  d["terms"] = terms;
  d["statement"] = print_formula(ew.statement);
  py::list trace;
  for (auto& r : ew.trace) {
    py::dict e;
    e["rule"] = r.rule;
    e["path"] = r.path;
    trace.append(e);
  }
  d["trace"] = trace;
  d["term_nodes"] = ew.term_nodes;
  d["steps"] = ew.steps;
  d["warnings"] = ew.warnings;
  return d;
}

py::dict report_dict(const CheckReport& r) {
  py::dict d;
  d["name"] = r.name;
  d["trials"] = r.trials;
  d["failures"] = r.failures;
  d["pass"] = r.pass();
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "normal-form rewriting and witness extraction";

  m.def("print_parse_term", [](const std::string& text) {
    return print_term(typecheck_term(parse_term(text)).term);
  });

  m.def("term_type", [](const std::string& text) {
    return typecheck_term(parse_term(text)).type.to_string();
  });

  m.def(
      "evaluate",
      [](const std::string& text, const std::vector<std::string>& args,
         long long fuel) {
        TermPtr t = typecheck_term(parse_term(text)).term;
        Fuel f{fuel};
        ValuePtr v = ::nsx::evaluate(t, f, {});
        for (const auto& a : args) {
          TermPtr at = typecheck_term(parse_term(a)).term;
          v = apply_value(v, ::nsx::evaluate(at, f, {}), f);
        }
        return print_value(v);
      },
      py::arg("term"), py::arg("args") = std::vector<std::string>{},
      py::arg("fuel") = 10'000'000LL);

  m.def("translate", [](const std::string& formula) {
    FormulaPtr f = parse_formula(formula);
    NormalForm nf = s_st_translate(f);
    return nf_dict(nf);
  });

  m.def("detect_normal_form", [](const std::string& formula) -> py::object {
    DetectResult d = detect_normal_form(parse_formula(formula));
    if (!d.ok()) {
      py::dict e;
      e["reason"] = d.reason;
      e["path"] = d.path;
      return e;
    }
    return nf_dict(*d.nf);
  });

  m.def(
      "run_script",
      [](const std::string& path, bool herbrandise_flag) {
        auto scripts = load_scripts(path);
        py::list out;
        for (const auto& s : scripts)
          out.append(witness_dict(herbrandise_flag ? herbrandise(s)
                                                   : run_script(s)));
        return out;
      },
      py::arg("path"), py::arg("herbrandise") = false);

  m.def("run_translation", [](const std::string& path) {
    auto scripts = load_scripts(path);
    py::list out;
    for (const auto& s : scripts) {
      TranslationReport tr = run_translation(s);
      py::dict d;
      d["name"] = s.name;
      d["goal_matched"] = tr.goal_matched;
      d["normal_form"] = nf_dict(tr.nf);
      out.append(d);
    }
    return out;
  });

  m.def(
      "reverse_check",
      [](const std::string& path) {
        auto scripts = load_scripts(path);
        ExtractedWitness h = herbrandise(scripts[0]);
        ReverseReport rr = reverse_check(h, scripts[0]);
        py::dict d;
        d["pass"] = rr.pass;
        d["lines"] = rr.lines;
        return d;
      },
      py::arg("path"));

  m.def(
      "verify_cri",
      [](const std::string& script_path, const std::string& bundle_path,
         long long trials, uint64_t seed) {
        auto scripts = load_scripts(script_path);
        ExtractedWitness ew = run_script(scripts[0]);
        ModulusBundle b = ModulusBundle::load(bundle_path);
        return report_dict(verify_cri(ew.term, b, 1, 8, trials, seed));
      },
      py::arg("script"), py::arg("bundle"), py::arg("trials") = 100,
      py::arg("seed") = 1);

  m.def(
      "run_corpus",
      [](const std::string& dir, const std::string& filter, uint64_t seed,
         long long trials) {
        CorpusOptions opt;
        opt.dir = dir;
        opt.filter = filter;
        opt.seed = seed;
        opt.trials = trials;
        CorpusSummary sum = run_corpus(opt);
        py::list entries;
        for (const auto& e : sum.entries) {
          py::dict d;
          d["name"] = e.name;
          d["pass"] = e.pass();
          py::list checks;
          for (const auto& c : e.checks) {
            py::dict cd;
            cd["name"] = c.name;
            cd["pass"] = c.pass;
            cd["detail"] = c.detail;
            checks.append(cd);
          }
          d["checks"] = checks;
          entries.append(d);
        }
        py::dict out;
        out["entries"] = entries;
        out["pass"] = sum.pass();
        out["warnings"] = sum.warnings;
        return out;
      },
      py::arg("dir") = "corpus", py::arg("filter") = "", py::arg("seed") = 1,
      py::arg("trials") = 100);

  py::register_exception<Error>(m, "NsxError");
}
