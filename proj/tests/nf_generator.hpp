// Seeded generator of random normal forms over internal matrices; shared
// by the unit fixed-point test and the acceptance suite.
#pragma once

#include "nsx/parser.hpp"
#include "nsx/rational.hpp"
#include "nsx/sst.hpp"

namespace nsx_gen {

using namespace nsx;

// Seeded generator of normal forms over internal matrices that use every
// block variable.
inline FormulaPtr random_normal_form(Rng& rng, int idx) {
  int nfa = 1 + static_cast<int>(rng.below(2));
  int nex = 1 + static_cast<int>(rng.below(2));
  std::vector<std::pair<std::string, FinType>> fa, ex;
  for (int i = 0; i < nfa; ++i) {
    FinType t = rng.below(4) == 0 ? FinType::seq(FinType::nat()) : FinType::nat();
    fa.emplace_back("u" + std::to_string(idx) + "_" + std::to_string(i), t);
  }
  for (int i = 0; i < nex; ++i) {
    FinType t = rng.below(4) == 0 ? FinType::seq(FinType::nat()) : FinType::nat();
    ex.emplace_back("v" + std::to_string(idx) + "_" + std::to_string(i), t);
  }
  // Matrix: conjunction/disjunction of atoms touching every variable.
  auto var_atom = [&](const std::pair<std::string, FinType>& v) -> FormulaPtr {
    TermPtr p = Term::param(v.first, v.second);
    if (v.second.is_seq())
      return Formula::atom(kRelLe0, {Term::app(Term::cnst("max",
                                                          const_type("max", FinType::nat())),
                                               p),
                                     Term::lit(rng.below(9))});
    if (rng.below(2))
      return Formula::atom(kRelLe0, {p, Term::lit(rng.below(9))});
    return Formula::atom(kRelEq0, {p, Term::lit(rng.below(9))});
  };
  FormulaPtr m;
  for (const auto& v : fa) {
    FormulaPtr a = var_atom(v);
    m = m ? (rng.below(2) ? Formula::conj(m, a) : Formula::disj(m, a)) : a;
  }
  for (const auto& v : ex) {
    FormulaPtr a = var_atom(v);
    if (rng.below(3) == 0) a = Formula::negate(a);
    m = Formula::conj(m, a);
  }
  // Occasionally an internal quantifier inside the matrix.
  if (rng.below(3) == 0) {
    m = Formula::conj(
        m, Formula::forall("j", FinType::nat(),
                           Formula::atom(kRelLe0, {Term::var(0, "j"),
                                                   Term::var(0, "j")})));
  }
  // Close the blocks.
  NormalForm nf;
  nf.forall_block = fa;
  nf.exists_block = ex;
  std::vector<std::pair<std::string, FinType>> all = fa;
  all.insert(all.end(), ex.begin(), ex.end());
  for (size_t i = all.size(); i-- > 0;)
    m = abstract_param(m, all[i].first, static_cast<int>(all.size() - 1 - i));
  nf.matrix = m;
  return nf.render();
}


}  // namespace nsx_gen
