#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "nsx/term.hpp"

namespace nsx {

class Value;
using ValuePtr = std::shared_ptr<const Value>;

// Runtime values of the call-by-value interpreter.  Naturals carry
// arbitrary-precision magnitudes.  Native values let the harness inject
// host-implemented functionals (search operators, hand-written moduli).
class Value {
 public:
  enum class Kind { Nat, Seq, Closure, Prim, Native };

  Kind kind;
  Nat nat;                          // Nat
  std::vector<ValuePtr> seq;        // Seq
  FinType elem_type;                // Seq element type
  TermPtr lam;                      // Closure body (the Lam term)
  std::shared_ptr<const std::vector<ValuePtr>> env;  // Closure environment
  std::string prim;                 // Prim constant name
  FinType prim_type;                // remaining type of the partial application
  std::vector<ValuePtr> prim_args;  // collected arguments
  std::string native_name;
  std::function<ValuePtr(const ValuePtr&)> native;

  static ValuePtr nat_v(Nat n);
  static ValuePtr seq_v(std::vector<ValuePtr> xs, FinType elem);
  static ValuePtr native_v(std::string name,
                           std::function<ValuePtr(const ValuePtr&)> fn);
};

bool value_equal(const ValuePtr& a, const ValuePtr& b);
std::string print_value(const ValuePtr& v);

// The canonical inhabitant of a type: 0, the empty sequence, or the constant
// function returning the canonical inhabitant of the codomain.
ValuePtr canonical_value(const FinType& ty);

struct Fuel {
  long long left = 10'000'000;
  void tick(long long n = 1);
};

ValuePtr evaluate(const TermPtr& t, Fuel& fuel,
                  const std::vector<ValuePtr>& env = {});
// Convenience overload with a fresh budget.
ValuePtr evaluate(const TermPtr& t, long long fuel = 10'000'000);

ValuePtr apply_value(const ValuePtr& f, const ValuePtr& arg, Fuel& fuel);
ValuePtr apply_value(const ValuePtr& f, const ValuePtr& arg);

// Nat helpers for harness code.
Nat nat_of(const ValuePtr& v);
long long ll_of(const ValuePtr& v);

}  // namespace nsx
