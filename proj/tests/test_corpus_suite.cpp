#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "nsx/corpus.hpp"
#include "nsx/harness.hpp"
#include "nsx/parser.hpp"

using namespace nsx;

namespace {

std::string corpus_dir() {
  namespace fs = std::filesystem;
  for (const char* p : {"corpus", "../corpus", "../../corpus"})
    if (fs::exists(fs::path(p) / "cri.nsp")) return p;
  return "corpus";
}

}  // namespace

TEST_CASE("parser/printer round trip over the corpus scripts") {
  namespace fs = std::filesystem;
  int formulas = 0;
  for (const auto& entry : fs::directory_iterator(corpus_dir())) {
    if (entry.path().extension() != ".nsp") continue;
    for (const auto& s : load_scripts(entry.path().string())) {
      std::vector<FormulaPtr> fs_to_check;
      for (const auto& t : s.tracks) fs_to_check.push_back(t.assume);
      if (s.goal) fs_to_check.push_back(s.goal);
      for (const auto& f : fs_to_check) {
        ++formulas;
        std::string printed = print_formula(f);
        FormulaPtr back = parse_formula(printed, s.params);
        CHECK(alpha_equal(desugar(f), desugar(back)));
        CHECK(print_formula(back) == printed);
      }
    }
  }
  CHECK(formulas >= 14);
}

TEST_CASE("extraction is deterministic across runs") {
  auto scripts = load_scripts(corpus_dir() + "/cri.nsp");
  ExtractedWitness a = run_script(scripts[0]);
  ExtractedWitness b = run_script(scripts[0]);
  CHECK(print_term(a.term) == print_term(b.term));
  CHECK(print_formula(a.statement) == print_formula(b.statement));
  REQUIRE(a.trace.size() == b.trace.size());
  for (size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(a.trace[i].rule == b.trace[i].rule);
    CHECK(a.trace[i].path == b.trace[i].path);
  }
}

TEST_CASE("verification reports are seed-deterministic") {
  auto scripts = load_scripts(corpus_dir() + "/cri.nsp");
  ExtractedWitness ew = run_script(scripts[0]);
  ModulusBundle bun = ModulusBundle::load(corpus_dir() + "/cri-id.bundle");
  CheckReport r1 = verify_cri(ew.term, bun, 1, 3, 25, 42);
  CheckReport r2 = verify_cri(ew.term, bun, 1, 3, 25, 42);
  CHECK(r1.trials == r2.trials);
  CHECK(r1.failures == r2.failures);
}

TEST_CASE("corpus filter with no match warns and succeeds") {
  CorpusOptions opt;
  opt.dir = corpus_dir();
  opt.filter = "nonexistent";
  CorpusSummary sum = run_corpus(opt);
  CHECK(sum.entries.empty());
  CHECK(sum.pass());
  REQUIRE(!sum.warnings.empty());
}

TEST_CASE("relativized quantifier desugaring is always external") {
  Rng rng(7777);
  for (int i = 0; i < 50; ++i) {
    FinType ty = rng.below(2) ? FinType::nat() : FinType::seq(FinType::nat());
    FormulaPtr inner =
        Formula::atom(kRelLe0, {Term::var(0, "v"), Term::lit(rng.below(9))});
    FormulaPtr f = rng.below(2) ? Formula::forall_st("v", ty, inner)
                                : Formula::exists_st("v", ty, inner);
    if (ty.is_seq())
      f = Formula::forall_st(
          "v", ty,
          Formula::atom(kRelLe0, {t_maxnat(Term::var(0, "v")), Term::lit(3)}));
    CHECK(!is_internal(desugar(f)));
  }
}
