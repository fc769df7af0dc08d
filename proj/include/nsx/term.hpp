#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "nsx/types.hpp"

namespace nsx {

using Nat = boost::multiprecision::cpp_int;

class Term;
using TermPtr = std::shared_ptr<const Term>;

// Terms use de Bruijn indices internally; the stored names are printing
// hints only.  Binders are counted across term lambdas *and* formula
// quantifiers, so a term below a quantifier may refer to the quantified
// variable by index.
class Term {
 public:
  enum class Kind { Var, Param, Const, Lit, Lam, App };

  Kind kind;
  int index = -1;        // Var
  std::string name;      // Var hint, Param name, Const name
  FinType type;          // Param/Const annotation; Lam binder type
  Nat nat = 0;           // Lit
  TermPtr fn, arg;       // App
  TermPtr body;          // Lam

  static TermPtr var(int index, std::string hint = "x");
  static TermPtr param(std::string name, FinType ty);
  static TermPtr cnst(std::string name, FinType ty);
  static TermPtr lit(Nat n);
  static TermPtr lam(std::string hint, FinType ty, TermPtr body);
  static TermPtr app(TermPtr f, TermPtr a);
  static TermPtr apps(TermPtr f, const std::vector<TermPtr>& args);
};

// Structural equality modulo printing hints (alpha-equality).
bool alpha_equal(const TermPtr& a, const TermPtr& b);

// Shifts free indices >= cutoff by d.
TermPtr shift_term(const TermPtr& t, int d, int cutoff = 0);

// Capture-avoiding substitution of de Bruijn index `idx` (indices above it
// are shifted down by one).
TermPtr subst_term(const TermPtr& t, int idx, const TermPtr& repl);

// Replaces every occurrence of the named parameter.
TermPtr subst_param(const TermPtr& t, const std::string& name, const TermPtr& repl);

bool has_free_var(const TermPtr& t, int idx);
// Largest free index + 1 (0 when closed w.r.t. indices).
int max_free_index(const TermPtr& t);
void collect_params(const TermPtr& t, std::set<std::string>& out);
bool is_closed_term(const TermPtr& t);
size_t term_size(const TermPtr& t);

// Builtin constant catalog.  Polymorphic constants (recursor and sequence
// primitives) are instantiated with fresh metavariables by the parser and
// pinned during typechecking.
struct ConstInfo {
  std::string name;
  bool poly;            // has a type parameter
  // Scheme builder: for poly constants `at` is the element type.
  FinType (*scheme)(const FinType& at);
};

const ConstInfo* lookup_const(const std::string& name);
FinType const_type(const std::string& name, const FinType& at);

// Convenience builders for the common arithmetic spellings.
TermPtr t_zero();
TermPtr t_succ(TermPtr t);
TermPtr t_add(TermPtr a, TermPtr b);
TermPtr t_mul(TermPtr a, TermPtr b);
TermPtr t_monus(TermPtr a, TermPtr b);
TermPtr t_le(TermPtr a, TermPtr b);
TermPtr t_maxnat(TermPtr s);

}  // namespace nsx
