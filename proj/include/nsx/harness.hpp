#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nsx/eval.hpp"
#include "nsx/rational.hpp"
#include "nsx/term.hpp"

namespace nsx {

// A real as a precision-indexed rational approximation (fast-converging
// Cauchy representation).
struct RealRep {
  std::function<Rational(long long)> approx;
  Rational at(long long n) const { return approx(n); }
  static RealRep exact(const Rational& q);
};

// Sampled check of the fast-convergence invariant |q_n - q_{n+i}| < 2^-n.
bool check_fast_cauchy(const RealRep& r, int horizon);

// Rationals coded as naturals: sign flag and Cantor-paired numerator and
// denominator.  code = 2 * pair(pair(|num|, den - 1), sign) with
// pair(a, b) = (a + b)(a + b + 1)/2 + b.  Tested, used by the evaluator-side
// real codes; harness arithmetic stays on exact rationals.
Nat rat_encode(const Rational& q);
Rational rat_decode(const Nat& code);

// A real as an evaluator value of type 0 -> 0: n maps to the code of q_n.
ValuePtr real_value(const RealRep& r);

// Piecewise polynomial function codes: the bundle expression grammar.
struct Poly {
  std::vector<Rational> coeffs;  // c0 + c1 x + ...
  Rational eval(const Rational& x) const;
};

struct FuncCode {
  struct Piece {
    Rational lo;
    Poly poly;
  };
  std::vector<Piece> pieces;  // sorted by lo; first piece must start at <= 0
  // Optional family perturbation: f_n(x) = f(x) + pert(x) / (n + 1).
  std::optional<Poly> pert;

  Rational eval(const Rational& x) const;
  Rational eval_n(long long n, const Rational& x) const;
  static FuncCode from_sexpr(const Sexpr& e);
};

// Tagged partition of [0,1]; points and tags are exact rationals.
struct Partition {
  std::vector<Rational> points;  // x_0 = 0 <= ... <= x_M = 1
  std::vector<Rational> tags;    // t_i in [x_i, x_{i+1}]
  void validate() const;
  Rational mesh() const;
  size_t intervals() const { return tags.size(); }
};

Rational riemann_sum(const FuncCode& f, const Partition& pi);
// Riemann sum limited to [0, x]: interval lengths are clamped at x.
Rational riemann_sum_upto(const FuncCode& f, const Partition& pi,
                          const Rational& x);
// S(f,0,x+h) - S(f,0,x) in one pass over the intervals meeting (x, x+h].
Rational riemann_delta(const FuncCode& f, const Partition& pi,
                       const Rational& x, const Rational& h);

// Tag placement strategies used by the sampler.
enum class TagStrategy { Left, Right, Mid, Random };

// Random refinement-style partition with mesh strictly below 1/mesh_denom.
Partition sample_partition(Rng& rng, long long mesh_denom, TagStrategy tags,
                           long long max_intervals = 4096);

// Case-study bundle: the function under study with its declared moduli.
struct ModulusBundle {
  std::string name;
  std::string kind;  // cri | ulc | mct | ftc
  FuncCode f;
  TermPtr modulus_g;        // closed term; typing depends on the kind
  TermPtr modulus_h;        // ulc convergence modulus (real -> nat -> nat)
  long long scale = 0;      // mct: dyadic scale L
  long long horizon = 64;   // mct: class horizon
  static ModulusBundle from_sexpr(const Sexpr& e);
  static ModulusBundle load(const std::string& path);
};

// Samples the declared moduli against the function code; reports the first
// violated instance.
bool validate_bundle(const ModulusBundle& b, std::string* why);

struct CheckReport {
  std::string name;
  long long trials = 0;
  std::vector<std::string> failures;
  bool pass() const { return failures.empty(); }
};

// |S_pi - S_pi'| <= 1/n for partition pairs with mesh < 1/t(g, n).
CheckReport verify_cri(const TermPtr& term, const ModulusBundle& b, int n_lo,
                       int n_hi, long long trials, uint64_t seed);

// |x - y| <= 1/t(g,h)(x,k) implies |f(x) - f(y)| <= 1/k on the dyadic grid.
CheckReport verify_ulc(const TermPtr& term, const ModulusBundle& b,
                       long long grid_denom, int k_lo, int k_hi,
                       long long samples_per_k, uint64_t seed);

// Monotone convergence: N, M >= s(mu)(c)(k) implies |c_M - c_N| <= 1/k.
CheckReport verify_mct_dir1(const TermPtr& s_term, const ModulusBundle& b,
                            long long samples, uint64_t seed);
// Search from a convergence oracle: MU(u(t)) on sampled 0/1 sequences.
CheckReport verify_mct_dir2(const TermPtr& u_term, const ModulusBundle& b,
                            long long samples, uint64_t seed);

// Differentiation against clamped Riemann sums at one bundle (f(x) = x):
// N >= M(l) and mesh * N <= 1/K(l) give |Delta_{1/N} S(f,0,x) - f(x)| <= 1/l.
CheckReport verify_ftc(const TermPtr& m_term, const TermPtr& k_term,
                       const ModulusBundle& b, int interval_k, int l_lo,
                       int l_hi, long long trials, uint64_t seed);

// The search functional restricted to the decidable class: scans for the
// first zero up to the horizon (0 when none).
ValuePtr native_mu(long long horizon);
// Hand-written convergence modulus for eventually-constant codes: returns
// the plateau onset found by scanning up to the horizon.
ValuePtr native_mct_oracle(long long horizon);

// Shipped term mutations used by the sensitivity checks: the precision
// argument is replaced by a constant (cri/ulc/ftc) or the result is
// decremented (mct).
TermPtr mutate_ignore_precision(const TermPtr& term, int arity);
TermPtr mutate_decrement(const TermPtr& term, int arity);

}  // namespace nsx
