#include "nsx/harness.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "nsx/error.hpp"
#include "nsx/parser.hpp"
#include "nsx/typecheck.hpp"

namespace nsx {

RealRep RealRep::exact(const Rational& q) {
  return RealRep{[q](long long) { return q; }};
}

bool check_fast_cauchy(const RealRep& r, int horizon) {
  for (int n = 0; n < horizon; ++n) {
    Rational qn = r.at(n);
    for (int i = 1; n + i <= horizon; ++i) {
      if (rat_abs(qn - r.at(n + i)) >= rat_pow2(-n)) return false;
    }
  }
  return true;
}

namespace {

BigInt cantor_pair(const BigInt& a, const BigInt& b) {
  return (a + b) * (a + b + 1) / 2 + b;
}

void cantor_unpair(const BigInt& z, BigInt& a, BigInt& b) {
  // w = floor((sqrt(8z+1)-1)/2)
  BigInt w = sqrt(BigInt(8 * z + 1));
  w = (w - 1) / 2;
  while ((w + 1) * (w + 2) / 2 <= z) ++w;
  while (w * (w + 1) / 2 > z) --w;
  BigInt t = w * (w + 1) / 2;
  b = z - t;
  a = w - b;
}

}  // namespace

Nat rat_encode(const Rational& q) {
  BigInt num = numerator(q), den = denominator(q);
  BigInt sign = num < 0 ? 1 : 0;
  if (num < 0) num = -num;
  return cantor_pair(cantor_pair(num, den - 1), sign) * 2;
}

Rational rat_decode(const Nat& code) {
  BigInt z = code / 2, nd, sign;
  cantor_unpair(z, nd, sign);
  BigInt num, den1;
  cantor_unpair(nd, num, den1);
  Rational q = Rational(num) / Rational(den1 + 1);
  return sign == 1 ? Rational(-q) : q;
}

ValuePtr real_value(const RealRep& r) {
  auto approx = r.approx;
  return Value::native_v("real", [approx](const ValuePtr& n) {
    return Value::nat_v(rat_encode(approx(ll_of(n))));
  });
}

Rational Poly::eval(const Rational& x) const {
  Rational acc = 0;
  for (size_t i = coeffs.size(); i-- > 0;) acc = acc * x + coeffs[i];
  return acc;
}

Rational FuncCode::eval(const Rational& x) const {
  if (pieces.empty()) return 0;
  const Poly* sel = &pieces.front().poly;
  for (const auto& p : pieces)
    if (x >= p.lo) sel = &p.poly;
  return sel->eval(x);
}

Rational FuncCode::eval_n(long long n, const Rational& x) const {
  Rational base = eval(x);
  if (pert) base += pert->eval(x) / Rational(n + 1);
  return base;
}

FuncCode FuncCode::from_sexpr(const Sexpr& e) {
  FuncCode fc;
  auto parse_poly = [](const Sexpr& p) {
    if (p.head() != "poly") throw SyntaxError(p.pos, "(poly c0 c1 ...)");
    Poly poly;
    for (size_t i = 1; i < p.size(); ++i)
      poly.coeffs.push_back(rational_from_sexpr(p[i]));
    return poly;
  };
  if (e.head() == "poly") {
    fc.pieces.push_back({Rational(0), parse_poly(e)});
    return fc;
  }
  if (e.head() == "piecewise") {
    for (size_t i = 1; i < e.size(); ++i) {
      const Sexpr& p = e[i];
      if (p.head() != "piece" || p.size() != 3)
        throw SyntaxError(p.pos, "(piece lo (poly ...))");
      fc.pieces.push_back({rational_from_sexpr(p[1]), parse_poly(p[2])});
    }
    std::sort(fc.pieces.begin(), fc.pieces.end(),
              [](const Piece& a, const Piece& b) { return a.lo < b.lo; });
    return fc;
  }
  throw SyntaxError(e.pos, "function code must be (poly ...) or (piecewise ...)");
}

void Partition::validate() const {
  if (points.size() < 2 || points.front() != 0 || points.back() != 1)
    throw InvalidPartition("endpoints must be 0 and 1");
  if (tags.size() + 1 != points.size())
    throw InvalidPartition("tag count must match interval count");
  for (size_t i = 0; i + 1 < points.size(); ++i) {
    if (points[i] > points[i + 1])
      throw InvalidPartition("points must be nondecreasing");
    if (tags[i] < points[i] || tags[i] > points[i + 1])
      throw InvalidPartition("tag outside its interval");
  }
}

Rational Partition::mesh() const {
  Rational m = 0;
  for (size_t i = 0; i + 1 < points.size(); ++i) {
    Rational d = points[i + 1] - points[i];
    if (d > m) m = d;
  }
  return m;
}

Rational riemann_sum(const FuncCode& f, const Partition& pi) {
  Rational acc = 0;
  for (size_t i = 0; i < pi.tags.size(); ++i)
    acc += f.eval(pi.tags[i]) * (pi.points[i + 1] - pi.points[i]);
  return acc;
}

Rational riemann_sum_upto(const FuncCode& f, const Partition& pi,
                          const Rational& x) {
  Rational acc = 0;
  for (size_t i = 0; i < pi.tags.size(); ++i) {
    Rational lo = std::min(pi.points[i], x);
    Rational hi = std::min(pi.points[i + 1], x);
    if (hi > lo) acc += f.eval(pi.tags[i]) * (hi - lo);
  }
  return acc;
}

Rational riemann_delta(const FuncCode& f, const Partition& pi,
                       const Rational& x, const Rational& h) {
  Rational hi_lim = x + h;
  Rational acc = 0;
  for (size_t i = 0; i < pi.tags.size(); ++i) {
    if (pi.points[i + 1] <= x) continue;
    if (pi.points[i] >= hi_lim) break;
    Rational lo = std::max(pi.points[i], x);
    Rational hi = std::min(pi.points[i + 1], hi_lim);
    if (hi > lo) acc += f.eval(pi.tags[i]) * (hi - lo);
  }
  return acc;
}

Partition sample_partition(Rng& rng, long long mesh_denom, TagStrategy tags,
                           long long max_intervals) {
  long long m = std::max<long long>(mesh_denom, 1);
  // Base interval count: strictly finer than 1/m even after jitter.
  long long lo = 2 * m + 2;
  long long hi = std::min(4 * m + 8, max_intervals);
  if (hi < lo) hi = lo;
  long long M = lo + static_cast<long long>(rng.below(hi - lo + 1));
  Partition p;
  p.points.reserve(M + 1);
  // Jitter interior points by +-1/(8M) on a dyadic grid.
  Rational base_step = Rational(1) / Rational(M);
  Rational jmax = Rational(1) / Rational(8 * M);
  p.points.push_back(0);
  for (long long i = 1; i < M; ++i) {
    Rational x = Rational(i) / Rational(M);
    // delta in [-jmax, jmax], denominator 2^10 relative.
    long long k = static_cast<long long>(rng.below(2049)) - 1024;
    Rational delta = jmax * Rational(k) / Rational(1024);
    p.points.push_back(x + delta);
  }
  p.points.push_back(1);
  p.tags.reserve(M);
  for (long long i = 0; i < M; ++i) {
    const Rational& a = p.points[i];
    const Rational& b = p.points[i + 1];
    switch (tags) {
      case TagStrategy::Left:
        p.tags.push_back(a);
        break;
      case TagStrategy::Right:
        p.tags.push_back(b);
        break;
      case TagStrategy::Mid:
        p.tags.push_back((a + b) / 2);
        break;
      case TagStrategy::Random: {
        long long k = static_cast<long long>(rng.below(257));
        p.tags.push_back(a + (b - a) * Rational(k) / Rational(256));
        break;
      }
    }
  }
  p.validate();
  return p;
}

ModulusBundle ModulusBundle::from_sexpr(const Sexpr& e) {
  if (e.head() != "bundle" || e.size() < 2)
    throw SyntaxError(e.pos, "(bundle name ...)");
  ModulusBundle b;
  b.name = e[1].atom;
  for (size_t i = 2; i < e.size(); ++i) {
    const Sexpr& sec = e[i];
    const std::string h = sec.head();
    if (h == "kind") {
      b.kind = sec[1].atom;
    } else if (h == "f") {
      b.f = FuncCode::from_sexpr(sec[1]);
    } else if (h == "family") {
      // (family (poly base...) (poly pert...)): f_n = base + pert/(n+1)
      b.f = FuncCode::from_sexpr(sec[1]);
      Poly pert;
      if (sec[2].head() != "poly")
        throw SyntaxError(sec[2].pos, "(family (poly ...) (poly ...))");
      for (size_t j = 1; j < sec[2].size(); ++j)
        pert.coeffs.push_back(rational_from_sexpr(sec[2][j]));
      b.f.pert = pert;
    } else if (h == "modulus") {
      MetaSupply metas;
      std::vector<std::pair<std::string, FinType>> scope;
      b.modulus_g = typecheck_term(parse_term(sec[1], {}, metas, scope)).term;
    } else if (h == "modulus-h") {
      MetaSupply metas;
      std::vector<std::pair<std::string, FinType>> scope;
      b.modulus_h = typecheck_term(parse_term(sec[1], {}, metas, scope)).term;
    } else if (h == "scale") {
      b.scale = std::stoll(sec[1].atom);
    } else if (h == "horizon") {
      b.horizon = std::stoll(sec[1].atom);
    } else {
      throw SyntaxError(sec.pos, "unknown bundle section '" + h + "'");
    }
  }
  return b;
}

ModulusBundle ModulusBundle::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScriptError("cannot open bundle " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_sexpr(parse_sexpr(ss.str()));
}

namespace {

Rational grid_point(long long i, long long denom) {
  return Rational(i) / Rational(denom);
}

long long eval_nat2(const TermPtr& term, const std::vector<ValuePtr>& args) {
  Fuel fuel;
  ValuePtr v = evaluate(term, fuel, {});
  for (const auto& a : args) v = apply_value(v, a, fuel);
  return ll_of(v);
}

}  // namespace

bool validate_bundle(const ModulusBundle& b, std::string* why) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  if (b.kind == "cri" || b.kind == "ftc") {
    if (!b.modulus_g) return fail("missing (modulus ...)");
    // g is a modulus of uniform continuity: |x-y| <= 1/g(k) implies
    // |f(x)-f(y)| <= 1/k on the sample grid.
    for (int k = 1; k <= 8; ++k) {
      long long gk = eval_nat2(b.modulus_g, {Value::nat_v(k)});
      if (gk <= 0) return fail("modulus returned 0 at k=" + std::to_string(k));
      const long long D = 128;
      for (long long i = 0; i <= D; i += 3) {
        Rational x = grid_point(i, D);
        // Nearest grid step below 1/gk.
        long long step = D / gk;
        if (step == 0) continue;
        for (long long j = i; j <= std::min(i + step, D); j += step) {
          Rational y = grid_point(j, D);
          if (rat_abs(x - y) > Rational(1) / Rational(gk)) continue;
          if (rat_abs(b.f.eval(x) - b.f.eval(y)) > Rational(1) / Rational(k))
            return fail("modulus violated at k=" + std::to_string(k) +
                        ", x=" + rat_str(x) + ", y=" + rat_str(y));
        }
      }
    }
    return true;
  }
  if (b.kind == "ulc") {
    if (!b.modulus_g || !b.modulus_h)
      return fail("ulc bundle needs (modulus ...) and (modulus-h ...)");
    const long long D = 64;
    for (int k = 1; k <= 8; ++k) {
      for (long long i = 0; i <= D; i += 5) {
        Rational x = grid_point(i, D);
        // h: for N >= h(x, k), |f_N(x) - f(x)| <= 1/k.
        long long hxk = eval_nat2(
            b.modulus_h, {real_value(RealRep::exact(x)), Value::nat_v(k)});
        for (long long N = hxk; N <= hxk + 3; ++N) {
          if (rat_abs(b.f.eval_n(N, x) - b.f.eval(x)) > Rational(1) / Rational(k))
            return fail("convergence modulus violated at k=" +
                        std::to_string(k) + ", x=" + rat_str(x) +
                        ", N=" + std::to_string(N));
        }
        // g_n: modulus of continuity of f_n.
        for (long long n = 0; n <= 4; ++n) {
          long long gnk = eval_nat2(
              b.modulus_g, {Value::nat_v(n), real_value(RealRep::exact(x)),
                            Value::nat_v(k)});
          if (gnk <= 0) return fail("g returned 0");
          long long step = D / gnk;
          if (step == 0) continue;
          Rational y = grid_point(std::min(i + step, D), D);
          if (rat_abs(x - y) > Rational(1) / Rational(gnk)) continue;
          if (rat_abs(b.f.eval_n(n, x) - b.f.eval_n(n, y)) >
              Rational(1) / Rational(k))
            return fail("continuity modulus violated at n=" +
                        std::to_string(n) + ", k=" + std::to_string(k));
        }
      }
    }
    return true;
  }
  if (b.kind == "mct") {
    if (b.scale < 0 || b.scale > 20) return fail("mct scale out of range");
    if (b.horizon < 4 || b.horizon > 4096) return fail("mct horizon out of range");
    return true;
  }
  return fail("unknown bundle kind '" + b.kind + "'");
}

// ---------------------------------------------------------------------------
// verify_cri

CheckReport verify_cri(const TermPtr& term, const ModulusBundle& b, int n_lo,
                       int n_hi, long long trials, uint64_t seed) {
  CheckReport rep;
  rep.name = "cri/" + b.name;
  std::string why;
  if (!validate_bundle(b, &why)) {
    rep.failures.push_back("bundle invalid: " + why);
    return rep;
  }
  Fuel fuel;
  ValuePtr tv = evaluate(term, fuel, {});
  ValuePtr gv;
  {
    Fuel f2;
    gv = evaluate(b.modulus_g, f2, {});
  }
  const TagStrategy strategies[4] = {TagStrategy::Left, TagStrategy::Right,
                                     TagStrategy::Mid, TagStrategy::Random};
  for (int n = n_lo; n <= n_hi; ++n) {
    Fuel f3;
    long long m = ll_of(apply_value(apply_value(tv, gv, f3), Value::nat_v(n), f3));
    if (m <= 0) {
      rep.failures.push_back("term returned 0 mesh denominator at n=" +
                             std::to_string(n));
      continue;
    }
    Rng rng(seed ^ (0x9e3779b9ULL * n));
    for (long long t = 0; t < trials; ++t) {
      // Adversarial corners first: same grid, opposite tag strategies.
      TagStrategy s1 = strategies[t % 4];
      TagStrategy s2 = strategies[(t + 1 + t / 4) % 4];
      Partition p1 = sample_partition(rng, m, s1);
      Partition p2;
      if (t % 3 == 0) {
        p2.points = p1.points;
        Rng rng2(rng.next());
        p2.tags.clear();
        for (size_t i = 0; i + 1 < p2.points.size(); ++i) {
          const Rational& a = p2.points[i];
          const Rational& bb = p2.points[i + 1];
          switch (s2) {
            case TagStrategy::Left: p2.tags.push_back(a); break;
            case TagStrategy::Right: p2.tags.push_back(bb); break;
            case TagStrategy::Mid: p2.tags.push_back((a + bb) / 2); break;
            case TagStrategy::Random: {
              long long k = static_cast<long long>(rng2.below(257));
              p2.tags.push_back(a + (bb - a) * Rational(k) / Rational(256));
              break;
            }
          }
        }
        p2.validate();
      } else {
        p2 = sample_partition(rng, m, s2);
      }
      ++rep.trials;
      Rational s_1 = riemann_sum(b.f, p1);
      Rational s_2 = riemann_sum(b.f, p2);
      if (rat_abs(s_1 - s_2) > Rational(1) / Rational(n)) {
        if (rep.failures.size() < 8)
          rep.failures.push_back(
              "n=" + std::to_string(n) + " trial=" + std::to_string(t) +
              ": |S1-S2| = " + rat_str(rat_abs(s_1 - s_2)) + " > 1/" +
              std::to_string(n) + " (meshes " + rat_str(p1.mesh()) + ", " +
              rat_str(p2.mesh()) + " < 1/" + std::to_string(m) + ")");
        else
          rep.failures.push_back("...");
        if (rep.failures.size() > 8) return rep;
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// verify_ulc

CheckReport verify_ulc(const TermPtr& term, const ModulusBundle& b,
                       long long grid_denom, int k_lo, int k_hi,
                       long long samples_per_k, uint64_t seed) {
  CheckReport rep;
  rep.name = "ulc/" + b.name;
  std::string why;
  if (!validate_bundle(b, &why)) {
    rep.failures.push_back("bundle invalid: " + why);
    return rep;
  }
  Fuel fuel;
  ValuePtr tv = evaluate(term, fuel, {});
  ValuePtr gv;
  {
    Fuel f2;
    gv = evaluate(b.modulus_g, f2, {});
  }
  // Uniformized convergence modulus over the verification grid.
  TermPtr hterm = b.modulus_h;
  auto hmax = [hterm, grid_denom](const ValuePtr& kv) {
    long long best = 0;
    for (long long i = 0; i <= 16; ++i) {
      Rational x = Rational(i) / Rational(16);
      long long h = eval_nat2(hterm, {real_value(RealRep::exact(x)), kv});
      best = std::max(best, h);
    }
    return Value::nat_v(best);
  };
  ValuePtr hv = Value::native_v("h-uniform", hmax);

  for (int k = k_lo; k <= k_hi; ++k) {
    Rng rng(seed ^ (0xabcdefULL * k));
    for (long long s = 0; s < samples_per_k; ++s) {
      long long xi = static_cast<long long>(rng.below(grid_denom + 1));
      Rational x = Rational(xi) / Rational(grid_denom);
      Fuel f3;
      ValuePtr thr = apply_value(
          apply_value(apply_value(apply_value(tv, gv, f3), hv, f3),
                      real_value(RealRep::exact(x)), f3),
          Value::nat_v(k), f3);
      long long m = ll_of(thr);
      if (m <= 0) {
        rep.failures.push_back("term returned 0 threshold at k=" +
                               std::to_string(k));
        return rep;
      }
      // Pick y on the grid within 1/m of x (threshold pair first).
      long long step = grid_denom / m;
      long long yi;
      if (s % 2 == 0 && step > 0)
        yi = std::min(xi + step, grid_denom);
      else
        yi = std::min<long long>(
            grid_denom,
            std::max<long long>(0, xi - static_cast<long long>(
                                            rng.below(step + 1))));
      Rational y = Rational(yi) / Rational(grid_denom);
      if (rat_abs(x - y) > Rational(1) / Rational(m)) continue;
      ++rep.trials;
      if (rat_abs(b.f.eval(x) - b.f.eval(y)) > Rational(1) / Rational(k)) {
        rep.failures.push_back(
            "k=" + std::to_string(k) + ", x=" + rat_str(x) + ", y=" +
            rat_str(y) + ": |f(x)-f(y)| = " +
            rat_str(rat_abs(b.f.eval(x) - b.f.eval(y))) + " > 1/" +
            std::to_string(k));
        if (rep.failures.size() > 8) return rep;
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// verify_mct

ValuePtr native_mu(long long horizon) {
  return Value::native_v("mu", [horizon](const ValuePtr& f) {
    Fuel fuel;
    for (long long n = 0; n <= horizon; ++n) {
      ValuePtr r = apply_value(f, Value::nat_v(n), fuel);
      if (nat_of(r) == 0) return Value::nat_v(n);
    }
    return Value::nat_v(0);
  });
}

ValuePtr native_mct_oracle(long long horizon) {
  // t(c)(k) := onset of the plateau of c within the horizon.
  return Value::native_v("mct-oracle", [horizon](const ValuePtr& c) {
    Fuel fuel;
    std::vector<Nat> vals;
    for (long long n = 0; n <= horizon; ++n)
      vals.push_back(nat_of(apply_value(c, Value::nat_v(n), fuel)));
    long long onset = horizon;
    while (onset > 0 && vals[onset - 1] == vals[horizon]) --onset;
    return Value::native_v("mct-oracle-k", [onset](const ValuePtr&) {
      return Value::nat_v(onset);
    });
  });
}

namespace {

// Eventually-constant monotone dyadic sequence of scale L.
struct MctSample {
  std::vector<long long> a;  // numerators over 2^L
  long long plateau;
};

MctSample sample_mct_sequence(Rng& rng, long long L, long long horizon,
                              bool big_jump) {
  MctSample s;
  long long cap = 1LL << L;
  long long plateau = 1 + static_cast<long long>(rng.below(horizon / 2));
  long long cur = 0;
  for (long long n = 0; n <= horizon; ++n) {
    if (n < plateau) {
      if (big_jump && n + 1 == plateau) {
        cur = cap;  // full-range jump right at the plateau
      } else {
        cur = std::min<long long>(cap, cur + static_cast<long long>(rng.below(
                                             std::max<long long>(cap / 8, 2))));
      }
    }
    s.a.push_back(cur);
  }
  s.plateau = plateau;
  return s;
}

ValuePtr seq_value(const std::vector<long long>& a) {
  auto copy = a;
  return Value::native_v("c", [copy](const ValuePtr& n) {
    long long i = ll_of(n);
    if (i < 0) i = 0;
    if (i >= static_cast<long long>(copy.size()))
      i = static_cast<long long>(copy.size()) - 1;
    return Value::nat_v(copy[i]);
  });
}

}  // namespace

CheckReport verify_mct_dir1(const TermPtr& s_term, const ModulusBundle& b,
                            long long samples, uint64_t seed) {
  CheckReport rep;
  rep.name = "mct-dir1/" + b.name;
  std::string why;
  if (!validate_bundle(b, &why)) {
    rep.failures.push_back("bundle invalid: " + why);
    return rep;
  }
  long long L = b.scale, H = b.horizon;
  BigInt capk = BigInt(1) << static_cast<unsigned>(L);
  ValuePtr mu = native_mu(H);
  Fuel fuel{200'000'000};
  ValuePtr sv = evaluate(s_term, fuel, {});
  Rng rng(seed);
  for (long long t = 0; t < samples; ++t) {
    MctSample smp = sample_mct_sequence(rng, L, H, t % 4 == 0);
    ValuePtr cv = seq_value(smp.a);
    int k = 1 + static_cast<int>(rng.below(8));
    long long m;
    try {
      Fuel f2{200'000'000};
      m = ll_of(apply_value(
          apply_value(apply_value(sv, mu, f2), cv, f2), Value::nat_v(k), f2));
    } catch (const Error& e) {
      rep.failures.push_back(std::string("evaluation failed: ") + e.what());
      return rep;
    }
    ++rep.trials;
    for (long long N = m; N <= std::min(m + 8, H); ++N) {
      for (long long M = m; M <= std::min(m + 8, H); ++M) {
        long long aN = smp.a[std::min(N, H)];
        long long aM = smp.a[std::min(M, H)];
        // |c_M - c_N| <= 1/k  <=>  |aM - aN| * k <= 2^L
        if (BigInt(std::abs(aM - aN)) * k > capk) {
          if (rep.failures.size() < 8)
            rep.failures.push_back(
                "sample " + std::to_string(t) + " (plateau " +
                std::to_string(smp.plateau) + "): index " + std::to_string(m) +
                " admits fluctuation |c_" + std::to_string(M) + " - c_" +
                std::to_string(N) + "| > 1/" + std::to_string(k));
          if (rep.failures.size() >= 8) return rep;
        }
      }
    }
  }
  return rep;
}

CheckReport verify_mct_dir2(const TermPtr& u_term, const ModulusBundle& b,
                            long long samples, uint64_t seed) {
  CheckReport rep;
  rep.name = "mct-dir2/" + b.name;
  long long H = b.horizon;
  ValuePtr tt = native_mct_oracle(H);
  Fuel fuel{200'000'000};
  ValuePtr uv = evaluate(u_term, fuel, {});
  Rng rng(seed);
  for (long long t = 0; t < samples; ++t) {
    // 0/1 function with a zero at a random position (sometimes none).
    bool has_zero = t % 5 != 4;
    long long z = 1 + static_cast<long long>(rng.below(H / 2));
    std::vector<long long> fv;
    for (long long n = 0; n <= H; ++n)
      fv.push_back(has_zero && n >= z ? 0 : 1);
    // Scatter an extra early zero occasionally.
    if (has_zero && t % 3 == 0 && z > 2) fv[z / 2] = 0;
    ValuePtr fval = seq_value(fv);
    long long n0;
    try {
      Fuel f2{200'000'000};
      n0 = ll_of(apply_value(apply_value(uv, tt, f2), fval, f2));
    } catch (const Error& e) {
      rep.failures.push_back(std::string("evaluation failed: ") + e.what());
      return rep;
    }
    ++rep.trials;
    if (has_zero) {
      long long fz = fv[std::min(n0, H)];
      if (fz != 0) {
        if (rep.failures.size() < 8)
          rep.failures.push_back("sample " + std::to_string(t) +
                                 ": f has a zero but f(u(t)(f)) = " +
                                 std::to_string(fz) + " at index " +
                                 std::to_string(n0));
        if (rep.failures.size() >= 8) return rep;
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// verify_ftc

CheckReport verify_ftc(const TermPtr& m_term, const TermPtr& k_term,
                       const ModulusBundle& b, int interval_k, int l_lo,
                       int l_hi, long long trials, uint64_t seed) {
  CheckReport rep;
  rep.name = "ftc/" + b.name;
  std::string why;
  if (!validate_bundle(b, &why)) {
    rep.failures.push_back("bundle invalid: " + why);
    return rep;
  }
  const TagStrategy strategies[4] = {TagStrategy::Left, TagStrategy::Right,
                                     TagStrategy::Mid, TagStrategy::Random};
  for (int l = l_lo; l <= l_hi; ++l) {
    long long M = eval_nat2(m_term, {Value::nat_v(l)});
    long long K = eval_nat2(k_term, {Value::nat_v(l)});
    if (M <= 0 || K <= 0) {
      rep.failures.push_back("term returned a zero threshold at l=" +
                             std::to_string(l));
      continue;
    }
    Rng rng(seed ^ (0x51ed2701ULL * l));
    for (long long t = 0; t < trials; ++t) {
      long long N = M + static_cast<long long>(rng.below(4));
      // x in [1/k, 1 - 1/k - 1/N] on a dyadic grid.
      Rational lo = Rational(1) / Rational(interval_k);
      Rational hi = Rational(1) - lo - Rational(1) / Rational(N);
      Rational x = rng.dyadic_between(lo, hi, 10);
      // mesh * N <= 1/K.
      Partition p = sample_partition(rng, K * N, strategies[t % 4]);
      ++rep.trials;
      Rational delta =
          riemann_delta(b.f, p, x, Rational(1) / Rational(N)) * Rational(N);
      Rational err = rat_abs(delta - b.f.eval(x));
      if (err > Rational(1) / Rational(l)) {
        if (rep.failures.size() < 8)
          rep.failures.push_back("l=" + std::to_string(l) + " N=" +
                                 std::to_string(N) + " x=" + rat_str(x) +
                                 ": |Delta - f(x)| = " + rat_str(err) +
                                 " > 1/" + std::to_string(l));
        if (rep.failures.size() >= 8) return rep;
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// mutations

TermPtr mutate_ignore_precision(const TermPtr& term, int arity) {
  // \x1 ... xN. term x1 ... x{N-1} 1  -- the precision argument is ignored.
  FinType ty = typecheck_term(term).type;
  std::vector<FinType> args = ty.argument_types();
  if (static_cast<int>(args.size()) < arity || arity < 1)
    throw TypeMismatch("mutation arity does not fit the term type");
  TermPtr body = shift_term(term, arity);
  for (int i = 0; i < arity - 1; ++i)
    body = Term::app(body, Term::var(arity - 1 - i, "x"));
  body = Term::app(body, Term::lit(1));
  for (int i = arity - 1; i >= 0; --i)
    body = Term::lam("x" + std::to_string(i + 1), args[i], body);
  return body;
}

TermPtr mutate_decrement(const TermPtr& term, int arity) {
  FinType ty = typecheck_term(term).type;
  std::vector<FinType> args = ty.argument_types();
  if (static_cast<int>(args.size()) < arity || arity < 1)
    throw TypeMismatch("mutation arity does not fit the term type");
  TermPtr body = shift_term(term, arity);
  for (int i = 0; i < arity; ++i)
    body = Term::app(body, Term::var(arity - 1 - i, "x"));
  body = t_monus(body, Term::lit(1));
  for (int i = arity - 1; i >= 0; --i)
    body = Term::lam("x" + std::to_string(i + 1), args[i], body);
  return body;
}

}  // namespace nsx
