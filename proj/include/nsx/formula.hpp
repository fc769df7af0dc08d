#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "nsx/term.hpp"

namespace nsx {

class Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

// Formulas of the external language.  Quantifiers bind de Bruijn indices
// shared with the term layer.  Relativized quantifiers and the remaining
// sugar forms are kept as explicit nodes until `desugar` expands them;
// the approximate-equality node in particular survives parsing so the
// resolve-approx rule can act on it.
class Formula {
 public:
  enum class Kind {
    Atom,      // relation applied to terms
    St,        // standardness predicate
    Not, And, Or, Implies,
    ForAll, Exists,          // internal quantifiers
    ForAllSt, ExistsSt,      // sugar: relativized quantifiers
    InOmega,                 // sugar: the argument is an infinite number
    ApproxEq,                // sugar: approximate equality at a type
  };

  Kind kind;
  std::string rel;               // Atom
  std::vector<TermPtr> args;     // Atom
  TermPtr term;                  // St / InOmega
  TermPtr lhs, rhs;              // ApproxEq
  FinType type;                  // quantifier binder type / ApproxEq type
  std::string name;              // binder hint
  FormulaPtr a, b;               // children

  static FormulaPtr atom(std::string rel, std::vector<TermPtr> args);
  static FormulaPtr st(TermPtr t);
  static FormulaPtr negate(FormulaPtr f);
  static FormulaPtr conj(FormulaPtr x, FormulaPtr y);
  static FormulaPtr disj(FormulaPtr x, FormulaPtr y);
  static FormulaPtr implies(FormulaPtr x, FormulaPtr y);
  static FormulaPtr forall(std::string hint, FinType ty, FormulaPtr body);
  static FormulaPtr exists(std::string hint, FinType ty, FormulaPtr body);
  static FormulaPtr forall_st(std::string hint, FinType ty, FormulaPtr body);
  static FormulaPtr exists_st(std::string hint, FinType ty, FormulaPtr body);
  static FormulaPtr in_omega(TermPtr t);
  static FormulaPtr approx_eq(TermPtr x, TermPtr y, FinType ty);
};

bool alpha_equal(const FormulaPtr& x, const FormulaPtr& y);

FormulaPtr shift_formula(const FormulaPtr& f, int d, int cutoff = 0);
FormulaPtr subst_formula(const FormulaPtr& f, int idx, const TermPtr& repl);
FormulaPtr subst_formula_param(const FormulaPtr& f, const std::string& name,
                               const TermPtr& repl);

// Expands all sugar nodes (relativized quantifiers, in-omega, approximate
// equality).  Idempotent.
FormulaPtr desugar(const FormulaPtr& f);
// Same, but approximate-equality nodes survive so the resolve-approx rule
// can act on them explicitly.
FormulaPtr desugar_keep_approx(const FormulaPtr& f);

// Replaces the named parameter by a de Bruijn variable so the result can be
// wrapped in a fresh binder: at depth d below `start_depth` the variable
// gets index start_depth + d.
TermPtr abstract_param(const TermPtr& t, const std::string& name,
                       int start_depth);
FormulaPtr abstract_param(const FormulaPtr& f, const std::string& name,
                          int start_depth);

// Number of occurrences of the named parameter.
size_t count_param(const FormulaPtr& f, const std::string& name);

// Renames binder hints so every quantifier binder in the formula carries a
// unique name (numeric suffixes added on clashes).
FormulaPtr uniquify_hints(const FormulaPtr& f, std::set<std::string>& used);

// True iff no St node occurs (input must be desugared).
bool is_internal(const FormulaPtr& f);
// True iff some sugar node remains.
bool has_sugar(const FormulaPtr& f);
bool mentions_index(const FormulaPtr& f, int idx);
int max_free_index(const FormulaPtr& f);
void collect_params(const FormulaPtr& f, std::set<std::string>& out);
size_t formula_size(const FormulaPtr& f);

// Pattern views over the desugared encoding of relativized quantifiers:
// (forall x)(st(x) -> body) and (exists x)(st(x) /\ body).
struct QuantView {
  std::string hint;
  FinType type;
  FormulaPtr body;  // with the binder still at index 0
};
std::optional<QuantView> match_forall_st(const FormulaPtr& f);
std::optional<QuantView> match_exists_st(const FormulaPtr& f);

// Bounded quantifiers over finite sequences:
// (exists y)(in-seq(y, s) /\ body) and (forall y)(in-seq(y, s) -> body).
struct BoundedView {
  std::string hint;
  FinType type;
  TermPtr bound;    // the sequence term, already shifted out of the binder
  FormulaPtr body;
};
std::optional<BoundedView> match_bounded_exists(const FormulaPtr& f);
std::optional<BoundedView> match_bounded_forall(const FormulaPtr& f);
FormulaPtr bounded_exists(std::string hint, FinType ty, TermPtr seq,
                          FormulaPtr body);
FormulaPtr bounded_forall(std::string hint, FinType ty, TermPtr seq,
                          FormulaPtr body);

// Builtin relation names used by generated formulas.
inline const char* kRelEq0 = "eq0";      // equality at type 0
inline const char* kRelLe0 = "le0";      // <= at type 0
inline const char* kRelLt0 = "lt0";      // <  at type 0
inline const char* kRelEq = "eq";        // extensional equality, any type
inline const char* kRelInSeq = "in-seq"; // membership in a finite sequence
inline const char* kRelCauchyClose = "cauchy-close";  // |x(n)-y(n)| <= 2^-n

}  // namespace nsx
