#pragma once

#include <vector>

#include "nsx/eval.hpp"
#include "nsx/formula.hpp"

namespace nsx {

// Finite-model semantics used by the desk-scale soundness checks: naturals
// range over 0..nat_max, sequences over length <= seq_max with entries from
// the same range, and st(n) is read as n <= standard_cut.  Quantifiers over
// function types are rejected; functions enter as environment values.
struct GroundModel {
  long long nat_max = 8;
  int seq_max = 4;
  long long standard_cut = 4;
  long long fuel = 2'000'000;
};

bool eval_ground(const FormulaPtr& f, const GroundModel& model,
                 std::vector<ValuePtr>& env);
bool eval_ground(const FormulaPtr& f, const GroundModel& model);

// All values of a quantifiable type in the model, in a fixed order.
std::vector<ValuePtr> enumerate_domain(const FinType& ty,
                                       const GroundModel& model);

}  // namespace nsx
