#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

#include "nsx/sexpr.hpp"

namespace nsx {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

Rational rat_abs(const Rational& q);
Rational rat_pow2(long long n);   // 2^n, n may be negative
std::string rat_str(const Rational& q);

// Parses "p/q", "p", or "-p/q".
Rational parse_rational(const std::string& s);
Rational rational_from_sexpr(const Sexpr& e);

// Deterministic splitmix64 stream; the harness never uses std::random to
// keep reports byte-identical across standard libraries.
struct Rng {
  uint64_t state;
  explicit Rng(uint64_t seed) : state(seed) {}
  uint64_t next();
  // Uniform in [0, n).
  uint64_t below(uint64_t n);
  // Random dyadic rational in [lo, hi] with denominator 2^bits.
  Rational dyadic_between(const Rational& lo, const Rational& hi, int bits);
};

}  // namespace nsx
