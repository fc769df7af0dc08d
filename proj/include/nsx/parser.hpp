#pragma once

#include <map>
#include <string>
#include <vector>

#include "nsx/formula.hpp"
#include "nsx/term.hpp"

namespace nsx {

// Named parameters visible to parsed terms and formulas (free constants of
// the ambient script, e.g. the function under study).
using ParamEnv = std::map<std::string, FinType>;

// Counter for fresh type metavariables handed to unannotated polymorphic
// constants; the typechecker pins them later.
struct MetaSupply {
  int next = 0;
  FinType fresh() { return FinType::meta(next++); }
};

TermPtr parse_term(const Sexpr& e, const ParamEnv& params, MetaSupply& metas,
                   std::vector<std::pair<std::string, FinType>>& scope);
TermPtr parse_term(const std::string& text, const ParamEnv& params = {});

FormulaPtr parse_formula(const Sexpr& e, const ParamEnv& params,
                         MetaSupply& metas,
                         std::vector<std::pair<std::string, FinType>>& scope);
FormulaPtr parse_formula(const std::string& text, const ParamEnv& params = {});

Sexpr term_to_sexpr(const TermPtr& t, std::vector<std::string>& names);
Sexpr formula_to_sexpr(const FormulaPtr& f, std::vector<std::string>& names);

std::string print_term(const TermPtr& t);
std::string print_formula(const FormulaPtr& f);

}  // namespace nsx
