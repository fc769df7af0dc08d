#include "doctest.h"
#include "nsx/error.hpp"
#include "nsx/harness.hpp"
#include "nsx/parser.hpp"

using namespace nsx;

TEST_CASE("rational coding round trip") {
  for (const char* s : {"0", "1", "7/3", "-5/8", "12345/67", "-1"}) {
    Rational q = parse_rational(s);
    CHECK(rat_decode(rat_encode(q)) == q);
  }
}

TEST_CASE("fast-converging Cauchy check") {
  RealRep good = RealRep::exact(parse_rational("1/3"));
  CHECK(check_fast_cauchy(good, 12));
  RealRep bad{[](long long n) { return Rational(n % 2); }};
  CHECK(!check_fast_cauchy(bad, 12));
}

TEST_CASE("partition validation") {
  Partition p;
  p.points = {Rational(0), Rational(1) / 2, Rational(1)};
  p.tags = {Rational(1) / 4, Rational(3) / 4};
  p.validate();
  CHECK(p.mesh() == Rational(1) / 2);

  Partition bad = p;
  bad.tags[0] = Rational(2) / 3;  // outside its interval
  CHECK_THROWS_AS(bad.validate(), InvalidPartition);

  Partition bad2 = p;
  bad2.points[2] = Rational(2);
  CHECK_THROWS_AS(bad2.validate(), InvalidPartition);
}

TEST_CASE("riemann sums on fixed fixtures") {
  FuncCode one = FuncCode::from_sexpr(parse_sexpr("(poly 1)"));
  FuncCode id = FuncCode::from_sexpr(parse_sexpr("(poly 0 1)"));
  // constant 1 telescopes to 1 on any partition
  Rng rng(7);
  for (int t = 0; t < 5; ++t) {
    Partition p = sample_partition(rng, 4, TagStrategy::Random);
    CHECK(riemann_sum(one, p) == Rational(1));
  }
  // f(x) = x, uniform quarters, left tags: 0/4 + (1/4 + 2/4 + 3/4) / 4 = 3/8
  Partition q;
  q.points = {Rational(0), Rational(1) / 4, Rational(1) / 2,
              Rational(3) / 4, Rational(1)};
  q.tags = {Rational(0), Rational(1) / 4, Rational(1) / 2, Rational(3) / 4};
  CHECK(riemann_sum(id, q) == Rational(3) / 8);
}

TEST_CASE("riemann sum pairs for x^2 under a fine mesh stay within 1/8") {
  FuncCode sq = FuncCode::from_sexpr(parse_sexpr("(poly 0 0 1)"));
  Rng rng(99);
  for (int t = 0; t < 10; ++t) {
    Partition a = sample_partition(rng, 64, TagStrategy::Random);
    Partition b = sample_partition(rng, 64, TagStrategy::Random);
    CHECK(rat_abs(riemann_sum(sq, a) - riemann_sum(sq, b)) <=
          Rational(1) / 8);
  }
}

TEST_CASE("clamped riemann sums and the windowed difference agree") {
  FuncCode id = FuncCode::from_sexpr(parse_sexpr("(poly 0 1)"));
  Rng rng(5);
  Partition p = sample_partition(rng, 16, TagStrategy::Mid);
  Rational x = Rational(1) / 3, h = Rational(1) / 7;
  CHECK(riemann_delta(id, p, x, h) ==
        riemann_sum_upto(id, p, x + h) - riemann_sum_upto(id, p, x));
}

TEST_CASE("bundle parsing and validation") {
  ModulusBundle b = ModulusBundle::from_sexpr(parse_sexpr(
      "(bundle t (kind cri) (f (poly 0 1)) (modulus (lam k nat k)))"));
  std::string why;
  CHECK(validate_bundle(b, &why));
  // A wrong modulus is flagged: g(k) = 1 claims |f(x)-f(y)| <= 1/k whenever
  // |x-y| <= 1, false for f(x) = x at k >= 2.
  ModulusBundle bad = ModulusBundle::from_sexpr(parse_sexpr(
      "(bundle t (kind cri) (f (poly 0 1)) (modulus (lam k nat 1)))"));
  CHECK(!validate_bundle(bad, &why));
}

TEST_CASE("ulc bundle validation rejects a corrupted convergence modulus") {
  ModulusBundle bad = ModulusBundle::from_sexpr(parse_sexpr(
      "(bundle t (kind ulc) (family (poly 0 1) (poly 1))"
      " (modulus (lam n nat (lam x (-> nat nat) (lam k nat k))))"
      " (modulus-h (lam x (-> nat nat) (lam k nat 0))))"));
  std::string why;
  CHECK(!validate_bundle(bad, &why));
  CHECK(why.find("convergence") != std::string::npos);
}

TEST_CASE("verify_cri accepts the hand modulus term and flags a corrupt one") {
  ModulusBundle b = ModulusBundle::from_sexpr(parse_sexpr(
      "(bundle t (kind cri) (f (poly 0 1)) (modulus (lam k nat k)))"));
  TermPtr good = parse_term("(lam g (-> nat nat) (lam n nat (app mul 2 (app g n))))");
  CheckReport r = verify_cri(good, b, 1, 4, 40, 11);
  CHECK(r.pass());
  TermPtr bad = mutate_ignore_precision(good, 2);
  CheckReport r2 = verify_cri(bad, b, 2, 8, 200, 11);
  CHECK(!r2.pass());
}

TEST_CASE("search functional and convergence oracle natives") {
  ValuePtr mu = native_mu(32);
  // f(n) = 0 first at 5
  ValuePtr f = Value::native_v("f", [](const ValuePtr& n) {
    return Value::nat_v(nat_of(n) >= 5 ? 0 : 1);
  });
  CHECK(nat_of(apply_value(mu, f)) == 5);
  ValuePtr none = Value::native_v("g", [](const ValuePtr&) {
    return Value::nat_v(1);
  });
  CHECK(nat_of(apply_value(mu, none)) == 0);

  ValuePtr tt = native_mct_oracle(16);
  ValuePtr c = Value::native_v("c", [](const ValuePtr& n) {
    return Value::nat_v(nat_of(n) >= 3 ? 9 : 2);
  });
  ValuePtr at_k = apply_value(apply_value(tt, c), Value::nat_v(4));
  CHECK(nat_of(at_k) == 3);
}

TEST_CASE("seeded determinism of the sampler") {
  Rng a(123), b(123);
  Partition p = sample_partition(a, 8, TagStrategy::Random);
  Partition q = sample_partition(b, 8, TagStrategy::Random);
  CHECK(p.points == q.points);
  CHECK(p.tags == q.tags);
}
