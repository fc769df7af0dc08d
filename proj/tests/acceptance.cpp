// Acceptance suite: runs every criterion at its stated tolerance and prints
// one pass/fail line each.  Exit code is the number of failed criteria.
#include <chrono>
#include <cstring>
#include <iostream>
#include <string>

#include "ground_checks.hpp"
#include "nf_generator.hpp"
#include "nsx/corpus.hpp"
#include "nsx/harness.hpp"
#include "nsx/script.hpp"

using namespace nsx;

namespace {

struct Gate {
  int failed = 0;

  void report(int n, const std::string& what, bool pass,
              const std::string& detail, double secs, double limit) {
    bool ok = pass && (limit <= 0 || secs < limit);
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << n << ": " << what;
    if (!detail.empty()) std::cout << " [" << detail << "]";
    std::cout << " (" << secs << "s";
    if (limit > 0) std::cout << " / limit " << limit << "s";
    std::cout << ")\n";
    if (!ok) ++failed;
  }
};

double elapsed(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::steady_clock::now() - t0)
             .count() /
         1000.0;
}

}  // namespace

int main(int argc, char** argv) {
  std::string corpus_dir = "corpus";
  for (int i = 1; i + 1 < argc; ++i)
    if (std::strcmp(argv[i], "--corpus") == 0) corpus_dir = argv[i + 1];
  Gate gate;

  // 1. S_st fixed point on 100 seeded random normal forms.
  {
    auto t0 = std::chrono::steady_clock::now();
    Rng rng(20260810);
    int good = 0;
    std::string note;
    for (int i = 0; i < 100; ++i) {
      FormulaPtr f = nsx_gen::random_normal_form(rng, i);
      NormalForm in = detect_normal_form(f).nf.value();
      NormalForm out = s_st_translate(f);
      if (alpha_equal(in, out) && is_internal(out.matrix)) ++good;
    }
    gate.report(1, "S_st fixed point on 100 seeded normal forms", good == 100,
                std::to_string(good) + "/100 alpha-equal", elapsed(t0), 5.0);
  }

  // 2. CRI end to end: extraction plus exact verification on three bundles,
  //    and the corrupted term is caught within the trial budget.
  {
    auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    std::string detail;
    try {
      auto scripts = load_scripts(corpus_dir + "/cri.nsp");
      ExtractedWitness ew = run_script(scripts[0]);
      long long total = 0;
      for (const char* bn : {"cri-id", "cri-sq", "cri-ramp"}) {
        ModulusBundle b =
            ModulusBundle::load(corpus_dir + "/" + bn + ".bundle");
        CheckReport r = verify_cri(ew.term, b, 1, 8, 500, 1);
        total += r.trials;
        if (!r.pass()) {
          pass = false;
          detail = r.name + ": " + r.failures.front();
        }
      }
      bool caught = false;
      TermPtr bad = mutate_ignore_precision(ew.term, 2);
      ModulusBundle b = ModulusBundle::load(corpus_dir + "/cri-id.bundle");
      for (uint64_t seed = 1; seed <= 5 && !caught; ++seed)
        caught = !verify_cri(bad, b, 1, 8, 1250, seed).pass();
      if (!caught) {
        pass = false;
        detail += " mutation undetected";
      }
      if (pass)
        detail = std::to_string(total) + " exact trials, 0 failures; mutation caught";
    } catch (const Error& e) {
      pass = false;
      detail = e.what();
    }
    gate.report(2, "CRI extraction and exact Riemann verification", pass,
                detail, elapsed(t0), 30.0);
  }

  // 3. Herbrandisation of CRI has the bounded-antecedent shape and the
  //    reverse check reproduces the goal normal form.
  {
    auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    std::string detail;
    try {
      auto scripts = load_scripts(corpus_dir + "/cri.nsp");
      ExtractedWitness h = herbrandise(scripts[0]);
      bool bounded = false;
      std::function<void(const FormulaPtr&)> scan = [&](const FormulaPtr& g) {
        if (g->kind == Formula::Kind::ForAll &&
            g->a->kind == Formula::Kind::Implies &&
            g->a->a->kind == Formula::Kind::Atom && g->a->a->rel == kRelLe0)
          bounded = true;
        switch (g->kind) {
          case Formula::Kind::Not: scan(g->a); return;
          case Formula::Kind::And:
          case Formula::Kind::Or:
          case Formula::Kind::Implies: scan(g->a); scan(g->b); return;
          case Formula::Kind::ForAll:
          case Formula::Kind::Exists: scan(g->a); return;
          default: return;
        }
      };
      scan(h.statement);
      ReverseReport rr = reverse_check(h, scripts[0]);
      pass = bounded && rr.pass && h.terms.size() == 1;
      detail = bounded ? "bounded antecedent present; " : "no bounded antecedent; ";
      detail += rr.pass ? "reverse check pass" : "reverse check FAIL";
    } catch (const Error& e) {
      pass = false;
      detail = e.what();
    }
    gate.report(3, "CRI herbrandisation shape and reverse check", pass, detail,
                elapsed(t0), 0);
  }

  // 4. ULC end to end on the shifted-identity bundle.
  {
    auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    std::string detail;
    try {
      auto scripts = load_scripts(corpus_dir + "/ulc.nsp");
      ExtractedWitness ew = run_script(scripts[0]);
      ModulusBundle b = ModulusBundle::load(corpus_dir + "/ulc-shift.bundle");
      CheckReport r = verify_ulc(ew.term, b, 256, 1, 8, 500, 1);
      pass = r.pass();
      detail = pass ? std::to_string(r.trials) + " grid samples, 0 failures"
                    : r.failures.front();
    } catch (const Error& e) {
      pass = false;
      detail = e.what();
    }
    gate.report(4, "ULC extraction and grid verification", pass, detail,
                elapsed(t0), 30.0);
  }

  // 5. MCT: two extracted terms, both directions verified on the decidable
  //    class, and the keep-tuple reverse check.
  {
    auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    std::string detail;
    try {
      auto scripts = load_scripts(corpus_dir + "/mct.nsp");
      ExtractedWitness w1 = run_script(scripts[0]);
      ExtractedWitness w2 = run_script(scripts[1]);
      TermPtr s_term, u_term;
      for (auto& [n, t] : w1.terms)
        if (n == "m") s_term = t;
      for (auto& [n, t] : w2.terms)
        if (n == "nn") u_term = t;
      ModulusBundle b = ModulusBundle::load(corpus_dir + "/mct-plateau.bundle");
      CheckReport r1 = verify_mct_dir1(s_term, b, 200, 1);
      CheckReport r2 = verify_mct_dir2(u_term, b, 200, 1);
      ReverseReport rr = reverse_check(herbrandise(scripts[0]), scripts[0]);
      pass = r1.pass() && r2.pass() && rr.pass;
      detail = "dir1 " + std::to_string(r1.trials) + " samples, dir2 " +
               std::to_string(r2.trials) + " samples" +
               (rr.pass ? ", reverse check pass" : ", reverse check FAIL");
      if (!r1.pass()) detail = r1.failures.front();
      if (!r2.pass()) detail = r2.failures.front();
    } catch (const Error& e) {
      pass = false;
      detail = e.what();
    }
    gate.report(5, "MCT explicit equivalence, both directions", pass, detail,
                elapsed(t0), 0);
  }

  // 6. Rule-level ground soundness for the named rules.
  {
    auto t0 = std::chrono::steady_clock::now();
    GroundModel model;  // domains <= 8, sequences <= 4
    auto checks = nsx_ground::run_ground_checks(model);
    long long total = 0, bad = 0;
    std::string first;
    for (const auto& rc : checks) {
      total += rc.instances;
      bad += rc.violations;
      if (rc.violations && first.empty())
        first = rc.rule + ": " + (rc.notes.empty() ? "?" : rc.notes.front());
    }
    gate.report(6, "rule transformer ground soundness", bad == 0,
                std::to_string(total) + " instances" +
                    (bad ? (", " + first) : ", 0 violations"),
                elapsed(t0), 60.0);
  }

  // 7. Omega machinery: the FTC consequent reaches the threshold normal
  //    form and the Omega-CA macro reproduces G on the constant fixture.
  {
    auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    std::string detail;
    try {
      auto scripts = load_scripts(corpus_dir + "/ftc-nf.nsp");
      TranslationReport tr = run_translation(scripts[0]);
      pass = tr.goal_matched;
      GroundModel model;
      auto rc = nsx_ground::check_omega_ca(model);
      pass = pass && rc.violations == 0;
      detail = std::string(tr.goal_matched ? "ftc threshold form ok" : "ftc form MISMATCH") +
               "; omega-ca fixture " + std::to_string(rc.instances) +
               " bounds, " + std::to_string(rc.violations) + " violations";
      ExtractedWitness ew = run_script(scripts[0]);
      ModulusBundle b = ModulusBundle::load(corpus_dir + "/ftc-id.bundle");
      CheckReport r = verify_ftc(ew.terms[0].second, ew.terms[1].second, b, 4,
                                 1, 8, 40, 1);
      if (!r.pass()) {
        pass = false;
        detail += "; numeric " + r.failures.front();
      }
    } catch (const Error& e) {
      pass = false;
      detail = e.what();
    }
    gate.report(7, "omega normal form and omega-CA macro", pass, detail,
                elapsed(t0), 0);
  }

  // 8. Translation-only corpus: every goal is a certified, typed normal form.
  {
    auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    std::string detail;
    try {
      auto scripts = load_scripts(corpus_dir + "/stp-hbl-hei.nsp");
      int ok = 0;
      for (const auto& s : scripts) {
        TranslationReport tr = run_translation(s);
        if (tr.goal_matched) ++ok;
        else { pass = false; detail += s.name + " mismatch; "; }
      }
      detail += std::to_string(ok) + "/" + std::to_string(scripts.size()) +
                " goals certified";
    } catch (const Error& e) {
      pass = false;
      detail = e.what();
    }
    gate.report(8, "translation-only corpus shapes", pass, detail, elapsed(t0),
                0);
  }

  std::cout << (gate.failed == 0 ? "ALL CRITERIA PASS" : "FAILURES PRESENT")
            << "\n";
  return gate.failed;
}
