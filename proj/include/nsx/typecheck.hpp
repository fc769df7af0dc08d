#pragma once

#include <map>
#include <string>
#include <vector>

#include "nsx/formula.hpp"
#include "nsx/term.hpp"

namespace nsx {

enum class Mono { None, Up, Down };

// Relation signature: argument types plus optional monotonicity annotations
// (1-based positions).  Declared relations come from script headers; the
// builtin relations are always available.
struct RelSig {
  std::vector<FinType> argtypes;
  std::map<int, Mono> mono;
};

struct RelTable {
  std::map<std::string, RelSig> rels;
  const RelSig* find(const std::string& name) const;
  static const RelTable& builtins();
};

// Typechecks a term in the given de Bruijn context (innermost binder last)
// and returns the resolved tree plus its unique type.  Polymorphic constants
// are pinned; ambiguity is an error.
struct TypedTerm {
  TermPtr term;
  FinType type;
};
TypedTerm typecheck_term(const TermPtr& t, const std::vector<FinType>& ctx = {});

// Typechecks a formula; returns the tree with all constant types pinned.
FormulaPtr typecheck_formula(const FormulaPtr& f,
                             const RelTable& rels = RelTable::builtins(),
                             const std::vector<FinType>& ctx = {});

}  // namespace nsx
