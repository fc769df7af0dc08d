#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nsx/formula.hpp"

namespace nsx {

// A certified normal form (forall-st block)(exists-st block)(internal
// matrix).  The matrix refers to block variables through de Bruijn indices,
// counting the whole forall block first (outermost binder) and the exists
// block after it; index 0 is the innermost exists variable.
struct NormalForm {
  std::vector<std::pair<std::string, FinType>> forall_block;
  std::vector<std::pair<std::string, FinType>> exists_block;
  FormulaPtr matrix;

  // Renders back into a desugared formula (st-guarded quantifiers).
  FormulaPtr render() const;
  // Binder types, forall block first.
  std::vector<FinType> binder_types() const;
};

// Structural recognition: succeeds iff the formula is literally a forall-st
// block, then an exists-st block, then an internal matrix.
struct DetectResult {
  std::optional<NormalForm> nf;
  std::string reason;  // set when detection fails
  std::string path;    // node path of the offending position
  bool ok() const { return nf.has_value(); }
};
DetectResult detect_normal_form(const FormulaPtr& f);

// The S_st interpretation via the five inductive clauses; total on desugared
// formulas built from internal atoms, st, the connectives and quantifiers
// (conjunction, implication and existentials are expanded classically on
// the paths that contain st).
NormalForm s_st_translate(const FormulaPtr& f);

// Derivation trace of the clause applied at each recursion node.
struct SstTraceEntry {
  std::string clause;   // "internal", "st", "not", "or", "forall"
  std::string at;       // rendered subformula (abbreviated)
};
NormalForm s_st_translate_traced(const FormulaPtr& f,
                                 std::vector<SstTraceEntry>* trace);

bool alpha_equal(const NormalForm& a, const NormalForm& b);

}  // namespace nsx
