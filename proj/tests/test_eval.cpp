#include "doctest.h"
#include "nsx/error.hpp"
#include "nsx/eval.hpp"
#include "nsx/parser.hpp"
#include "nsx/rational.hpp"
#include "nsx/typecheck.hpp"

using namespace nsx;

TEST_CASE("recursor base and step") {
  // rec 0 3 s = 3
  CHECK(nat_of(evaluate(parse_term("(app (rec nat) 0 3 (lam i nat (lam r nat r)))"))) == 3);
  // rec n 0 (+1 each step) = n
  CHECK(nat_of(evaluate(parse_term(
            "(app (rec nat) 9 0 (lam i nat (lam r nat (app succ r))))"))) == 9);
  // factorial via rec: 5! = 120
  CHECK(nat_of(evaluate(parse_term(
            "(app (rec nat) 5 1 (lam i nat (lam r nat (app (app mul (app succ i)) r))))"))) ==
        120);
}

TEST_CASE("sequence primitives") {
  CHECK(nat_of(evaluate(parse_term("(app max (seq0 2 5 3))"))) == 5);
  CHECK(nat_of(evaluate(parse_term("(app max (empty nat))"))) == 0);
  CHECK(nat_of(evaluate(parse_term(
            "(app (len nat) (app append (seq0 1) (seq0 4 4)))"))) == 3);
  CHECK(nat_of(evaluate(parse_term("(app (index nat) (seq0 7 8) 1)"))) == 8);
  // out of range gives the canonical inhabitant
  CHECK(nat_of(evaluate(parse_term("(app (index nat) (seq0 7 8) 5)"))) == 0);
}

TEST_CASE("arithmetic primitives") {
  CHECK(nat_of(evaluate(parse_term("(app monus 3 5)"))) == 0);
  CHECK(nat_of(evaluate(parse_term("(app monus 5 3)"))) == 2);
  CHECK(nat_of(evaluate(parse_term("(app le 3 3)"))) == 1);
  CHECK(nat_of(evaluate(parse_term("(app le 4 3)"))) == 0);
}

TEST_CASE("apply_value and closures") {
  ValuePtr id = evaluate(parse_term("(lam x nat x)"));
  CHECK(nat_of(apply_value(id, Value::nat_v(7))) == 7);
  ValuePtr s = evaluate(parse_term("(lam k nat (app succ k))"));
  CHECK(nat_of(apply_value(s, Value::nat_v(0))) == 1);
  ValuePtr m = evaluate(parse_term("(lam k nat (app max (seq0 k 2)))"));
  CHECK(nat_of(apply_value(m, Value::nat_v(5))) == 5);
}

TEST_CASE("fuel exhaustion is a clean error") {
  TermPtr t = parse_term(
      "(app (rec nat) 1000000 0 (lam i nat (lam r nat (app succ r))))");
  CHECK_THROWS_AS(evaluate(t, 1000), FuelExhausted);
}

TEST_CASE("determinism") {
  TermPtr t = parse_term(
      "(app (rec nat) 20 1 (lam i nat (lam r nat (app (app add r) r))))");
  CHECK(value_equal(evaluate(t), evaluate(t)));
}

TEST_CASE("recursor agrees with an independent iterative oracle") {
  // Oracle: iterate the step function directly on host integers.
  Rng rng(42);
  for (int trial = 0; trial < 40; ++trial) {
    long long n = rng.below(51);
    long long b = rng.below(7);
    long long mulc = 1 + rng.below(3);
    long long addc = rng.below(4);
    // step(i, r) = mulc * r + addc + i
    std::string step = "(lam i nat (lam r nat (app (app add (app (app mul " +
                       std::to_string(mulc) + ") r)) (app (app add " +
                       std::to_string(addc) + ") i))))";
    TermPtr t = parse_term("(app (rec nat) " + std::to_string(n) + " " +
                           std::to_string(b) + " " + step + ")");
    Nat expect = b;
    for (long long i = 0; i < n; ++i) expect = mulc * expect + addc + i;
    CHECK(nat_of(evaluate(t)) == expect);
  }
}

TEST_CASE("subject reduction on corpus-style terms") {
  for (const char* src : {
           "(app (lam x nat (app succ x)) 3)",
           "(app append (seq0 1 2) (seq0 3))",
           "(lam g (-> nat nat) (lam n nat (app (app mul 2) (app g n))))",
       }) {
    TypedTerm tt = typecheck_term(parse_term(src));
    ValuePtr v = evaluate(tt.term, 100000);
    // re-read the value as a term where possible and compare types
    if (v->kind == Value::Kind::Nat) {
      CHECK(tt.type == FinType::nat());
    } else if (v->kind == Value::Kind::Seq) {
      CHECK(tt.type.is_seq());
    } else {
      CHECK(tt.type.is_arrow());
    }
  }
}
