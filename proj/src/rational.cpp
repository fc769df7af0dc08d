#include "nsx/rational.hpp"

#include "nsx/error.hpp"

namespace nsx {

Rational rat_abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

Rational rat_pow2(long long n) {
  BigInt p = 1;
  p <<= static_cast<unsigned>(n < 0 ? -n : n);
  if (n >= 0) return Rational(p);
  return Rational(1) / Rational(p);
}

std::string rat_str(const Rational& q) {
  BigInt num = numerator(q), den = denominator(q);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

Rational parse_rational(const std::string& s) {
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rational(BigInt(s));
    BigInt num(s.substr(0, slash));
    BigInt den(s.substr(slash + 1));
    if (den == 0) throw SyntaxError(0, "zero denominator in '" + s + "'");
    return Rational(num) / Rational(den);
  } catch (const std::exception&) {
    throw SyntaxError(0, "not a rational: '" + s + "'");
  }
}

Rational rational_from_sexpr(const Sexpr& e) {
  if (!e.is_atom) throw SyntaxError(e.pos, "expected a rational literal");
  return parse_rational(e.atom);
}

uint64_t Rng::next() {
  // splitmix64
  state += 0x9e3779b97f4a7c15ULL;
  uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

uint64_t Rng::below(uint64_t n) { return n == 0 ? 0 : next() % n; }

Rational Rng::dyadic_between(const Rational& lo, const Rational& hi,
                             int bits) {
  // Pick k/2^bits scaled into [lo, hi].
  BigInt denom = BigInt(1) << bits;
  uint64_t k = below(static_cast<uint64_t>(1) << std::min(bits, 62));
  Rational t = Rational(BigInt(k)) / Rational(denom);
  return lo + t * (hi - lo);
}

}  // namespace nsx
