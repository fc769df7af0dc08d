#include "doctest.h"
#include "nsx/error.hpp"
#include "nsx/parser.hpp"
#include "nsx/rules.hpp"
#include "nsx/sst.hpp"
#include "nsx/typecheck.hpp"
#include "nsx/eval.hpp"

using namespace nsx;

namespace {

RuleCtx ctx_with(int& counter, WitnessMap* w = nullptr,
                 std::set<std::string>* taints = nullptr, bool h = false) {
  RuleCtx c;
  c.counter = &counter;
  c.h_mode = h;
  c.witnesses = w;
  c.taints = taints;
  return c;
}

}  // namespace

TEST_CASE("pull-st reproduces the (first2) shape") {
  // (forall x,y)[(forall-st N) d(x,y,N) -> (forall-st k) e(x,y,k)]
  RelTable rels = RelTable::builtins();
  rels.rels["d"] = RelSig{{FinType::nat(), FinType::nat(), FinType::nat()}, {}};
  rels.rels["e"] = RelSig{{FinType::nat(), FinType::nat(), FinType::nat()}, {}};
  FormulaPtr f = desugar(parse_formula(
      "(forall x nat (forall y nat (implies"
      " (forall-st N nat (atom d x y N))"
      " (forall-st k nat (atom e x y k)))))"));
  int counter = 0;
  RuleCtx ctx = ctx_with(counter);
  ctx.rels = &rels;
  StepRecord rec;
  FormulaPtr out = rule_pull_st(f, ctx, rec);
  // Expected: (forall-st k)(forall x)(forall y)(exists-st N)[d -> e]
  auto v = match_forall_st(out);
  REQUIRE(v.has_value());
  FormulaPtr inner = v->body;
  REQUIRE(inner->kind == Formula::Kind::ForAll);  // x
  REQUIRE(inner->a->kind == Formula::Kind::ForAll);  // y
  CHECK(match_exists_st(inner->a->a).has_value());  // N stuck inside
}

TEST_CASE("pull-st in H mode refuses the classical antecedent move") {
  FormulaPtr f = desugar(parse_formula(
      "(implies (forall-st N nat (atom le0 N N)) (atom eq0 0 0))"));
  int counter = 0;
  RuleCtx ctx = ctx_with(counter, nullptr, nullptr, true);
  StepRecord rec;
  FormulaPtr out = rule_pull_st(f, ctx, rec);
  // H mode: the forall-st stays in the antecedent (hgmp-st's job).
  CHECK(out->kind == Formula::Kind::Implies);
}

TEST_CASE("idealize-contra schema instance") {
  // (forall x)(exists-st N)(x <= N)  ~>  (exists-st w)(forall x)(exists N in w)(x <= N)
  FormulaPtr f = desugar(parse_formula(
      "(forall x nat (exists-st N nat (atom le0 x N)))"));
  int counter = 0;
  WitnessMap wit;
  RuleCtx ctx = ctx_with(counter, &wit);
  StepRecord rec;
  FormulaPtr out = rule_idealize_contra(f, ctx, rec);
  auto v = match_exists_st(out);
  REQUIRE(v.has_value());
  CHECK(v->type == FinType::seq(FinType::nat()));
  REQUIRE(v->body->kind == Formula::Kind::ForAll);
  CHECK(match_bounded_exists(v->body->a).has_value());
  typecheck_formula(out);
}

TEST_CASE("idealize-contra rejects a non-internal matrix") {
  FormulaPtr f = desugar(parse_formula(
      "(forall x nat (exists-st N nat (st N)))"));
  int counter = 0;
  RuleCtx ctx = ctx_with(counter);
  StepRecord rec;
  CHECK_THROWS_AS(rule_idealize_contra(f, ctx, rec), NonInternalMatrix);
}

TEST_CASE("monotone-max collapses a certified bound") {
  // After idealisation: (forall-st k)(exists-st w)(forall x)(exists N in w)
  //   [d(x,N) -> e(k)]  with d anti in N (guard side).
  RelTable rels = RelTable::builtins();
  rels.rels["d"] = RelSig{{FinType::nat(), FinType::nat()},
                          {{2, Mono::Down}}};
  rels.rels["e"] = RelSig{{FinType::nat()}, {}};
  FormulaPtr f = desugar(parse_formula(
      "(forall-st k nat (exists-st w (seq nat) (forall x nat "
      "(exists-in N nat w (implies (atom d x N) (atom e k))))))"));
  int counter = 0;
  WitnessMap wit;
  RuleCtx ctx = ctx_with(counter, &wit);
  ctx.rels = &rels;
  StepRecord rec;
  FormulaPtr out = rule_monotone_max(f, {"N"}, "N1", false, ctx, rec);
  // (forall-st k)(exists-st N1:nat)(forall x)[d(x,N1) -> e(k)]
  auto k = match_forall_st(out);
  REQUIRE(k.has_value());
  auto n = match_exists_st(k->body);
  REQUIRE(n.has_value());
  CHECK(n->type == FinType::nat());
  typecheck_formula(out, rels);
}

TEST_CASE("monotone-max refuses equality matrices") {
  FormulaPtr f = desugar(parse_formula(
      "(exists-st w (seq nat) (forall x nat "
      "(exists-in N nat w (atom eq0 N x))))"));
  int counter = 0;
  RuleCtx ctx = ctx_with(counter);
  StepRecord rec;
  CHECK_THROWS_AS(rule_monotone_max(f, {"N"}, "", false, ctx, rec),
                  MonotonicityNotEstablished);
}

TEST_CASE("hac-int schema instance with witness composition") {
  // (forall-st k)(exists-st N)(k <= N) with witness N := k
  FormulaPtr f = desugar(parse_formula(
      "(forall-st k nat (exists-st N nat (atom le0 k N)))"));
  int counter = 0;
  WitnessMap wit;
  wit["N"] = Term::param("k", FinType::nat());
  std::set<std::string> taints;
  RuleCtx ctx = ctx_with(counter, &wit, &taints);
  StepRecord rec;
  FormulaPtr out = rule_hac_int(f, {"F"}, ctx, rec);
  auto v = match_exists_st(out);
  REQUIRE(v.has_value());
  CHECK(v->hint == "F");
  CHECK(v->type == FinType::arrow(FinType::nat(), FinType::seq(FinType::nat())));
  // The witness became a candidate-list functional.
  REQUIRE(wit.count("F"));
  CHECK(print_term(wit["F"]).find("cons") != std::string::npos);
  typecheck_formula(out);
}

TEST_CASE("hgmp-st mirrors the (deep)->(deep2) move") {
  // [(forall-st n)(n != 5) -> 0 = 1]  ~>  (exists-st w)[(forall n in w)(n != 5) -> 0 = 1]
  FormulaPtr f = desugar(parse_formula(
      "(implies (forall-st n nat (not (atom eq0 n 5))) (atom eq0 0 1))"));
  int counter = 0;
  RuleCtx ctx = ctx_with(counter);
  StepRecord rec;
  FormulaPtr out = rule_hgmp_st(f, ctx, rec);
  auto v = match_exists_st(out);
  REQUIRE(v.has_value());
  CHECK(v->type == FinType::seq(FinType::nat()));
  REQUIRE(v->body->kind == Formula::Kind::Implies);
  CHECK(match_bounded_forall(v->body->a).has_value());
  typecheck_formula(out);
}

TEST_CASE("hgmp-st rejects external conclusions") {
  FormulaPtr f = desugar(parse_formula(
      "(implies (forall-st n nat (atom eq0 n n)) (st 3))"));
  int counter = 0;
  RuleCtx ctx = ctx_with(counter);
  StepRecord rec;
  CHECK_THROWS_AS(rule_hgmp_st(f, ctx, rec), NonInternalParts);
}

TEST_CASE("hip-forallst mirrors the (third21)->(third3) move") {
  // [(forall-st n)(n = n) -> (exists-st m)(m = 3)]
  FormulaPtr f = desugar(parse_formula(
      "(implies (forall-st n nat (atom eq0 n n)) "
      "(exists-st m nat (atom eq0 m 3)))"));
  int counter = 0;
  RuleCtx ctx = ctx_with(counter);
  StepRecord rec;
  FormulaPtr out = rule_hip_forallst(f, ctx, rec);
  auto v = match_exists_st(out);
  REQUIRE(v.has_value());
  CHECK(v->type == FinType::seq(FinType::nat()));
  REQUIRE(v->body->kind == Formula::Kind::Implies);
  // Premise untouched; conclusion bounded.
  CHECK(match_forall_st(v->body->a).has_value());
  CHECK(match_bounded_exists(v->body->b).has_value());
  typecheck_formula(out);
}

TEST_CASE("hip-forallst rejects a non-internal premise") {
  FormulaPtr f = desugar(parse_formula(
      "(implies (forall-st n nat (st n)) (exists-st m nat (atom eq0 m 3)))"));
  int counter = 0;
  RuleCtx ctx = ctx_with(counter);
  StepRecord rec;
  CHECK_THROWS_AS(rule_hip_forallst(f, ctx, rec), PatternMismatch);
}

TEST_CASE("ncr schema instance") {
  FormulaPtr f = desugar(parse_formula(
      "(forall y nat (exists-st n nat (or (atom le0 y n) (atom eq0 y y))))"));
  int counter = 0;
  RuleCtx ctx = ctx_with(counter);
  StepRecord rec;
  FormulaPtr out = rule_ncr(f, ctx, rec);
  auto v = match_exists_st(out);
  REQUIRE(v.has_value());
  CHECK(v->type == FinType::seq(FinType::nat()));
  typecheck_formula(out);
}

TEST_CASE("ncr wants the existential in positive position") {
  FormulaPtr f = desugar(parse_formula(
      "(not (forall y nat (exists-st n nat (atom le0 y n))))"));
  int counter = 0;
  RuleCtx ctx = ctx_with(counter);
  StepRecord rec;
  CHECK_THROWS_AS(rule_ncr(f, ctx, rec), PatternMismatch);
}

TEST_CASE("overspill taints its witness") {
  FormulaPtr f = desugar(parse_formula(
      "(forall-st n nat (atom le0 n n))"));
  int counter = 0;
  std::set<std::string> taints;
  RuleCtx ctx = ctx_with(counter, nullptr, &taints);
  StepRecord rec;
  FormulaPtr out = rule_overspill(f, ctx, rec);
  REQUIRE(out->kind == Formula::Kind::Exists);
  CHECK(out->a->kind == Formula::Kind::And);
  CHECK(out->a->a->kind == Formula::Kind::Not);
  CHECK(taints.size() == 1);
  // st in the matrix is rejected
  FormulaPtr g = desugar(parse_formula("(forall-st n nat (st n))"));
  StepRecord rec2;
  CHECK_THROWS_AS(rule_overspill(g, ctx, rec2), NonInternalMatrix);
}

TEST_CASE("underspill gives the standard threshold form") {
  FormulaPtr f = desugar(parse_formula(
      "(forall N nat (implies (in-omega N) (atom le0 0 N)))"));
  int counter = 0;
  RuleCtx ctx = ctx_with(counter);
  StepRecord rec;
  FormulaPtr out = rule_underspill(f, "n0", ctx, rec);
  auto v = match_exists_st(out);
  REQUIRE(v.has_value());
  CHECK(v->hint == "n0");
  typecheck_formula(out);
  // non-decidable atoms are rejected
  RelTable rels = RelTable::builtins();
  rels.rels["opaque"] = RelSig{{FinType::nat()}, {}};
  FormulaPtr g = desugar(parse_formula(
      "(forall N nat (implies (in-omega N) (atom opaque N)))"));
  StepRecord rec2;
  CHECK_THROWS_AS(rule_underspill(g, "", ctx, rec2), UnsupportedType);
}

TEST_CASE("omega-nf reproduces the threshold normal form") {
  // (forall N in Omega)(forall-st x)(exists-st y)(y >= x and N >= x)
  FormulaPtr f = desugar(parse_formula(
      "(forall N nat (implies (in-omega N) "
      "(forall-st x nat (exists-st y nat "
      "(and (atom le0 x y) (atom le0 x N))))))"));
  int counter = 0;
  RuleCtx ctx = ctx_with(counter);
  StepRecord rec;
  FormulaPtr out = rule_omega_nf(f, {"l", "v"}, ctx, rec);
  // (forall-st x)(exists-st l, v)(forall N)(l <= N -> (exists y in v) ...)
  auto x = match_forall_st(out);
  REQUIRE(x.has_value());
  auto l = match_exists_st(x->body);
  REQUIRE(l.has_value());
  CHECK(l->hint == "l");
  auto vv = match_exists_st(l->body);
  REQUIRE(vv.has_value());
  CHECK(vv->type == FinType::seq(FinType::nat()));
  REQUIRE(vv->body->kind == Formula::Kind::ForAll);
  typecheck_formula(out);
  DetectResult det = detect_normal_form(out);
  CHECK(det.ok());
}

TEST_CASE("omega-ca on the constant fixture yields the identity") {
  // Premise: (forall-st x)(forall N, M in Omega)(F(x,N) = F(x,M)) with
  // F(x, n) = x.
  ParamEnv env;
  FormulaPtr f = desugar(parse_formula(
      "(forall-st x nat (forall N nat (forall M nat "
      "(implies (and (in-omega N) (in-omega M)) "
      "(atom eq0 (app (lam a nat (lam b nat a)) x N) "
      "(app (lam a nat (lam b nat a)) x M))))))", env));
  int counter = 0;
  WitnessMap wit;
  RuleCtx ctx = ctx_with(counter, &wit);
  StepRecord rec;
  TermPtr F = parse_term("(lam a nat (lam b nat a))");
  TermPtr bound = parse_term("(lam a nat 0)");
  FormulaPtr out = rule_omega_ca(f, F, bound, ctx, rec);
  auto g = match_exists_st(out);
  REQUIRE(g.has_value());
  // The macro witness: G(x) = F(x, max <b(x)>).
  REQUIRE(wit.size() == 1);
  TermPtr gterm = wit.begin()->second;
  typecheck_formula(out);
  // G is extensionally the identity on the fixture.
  for (long long x = 0; x <= 6; ++x) {
    ValuePtr v = apply_value(evaluate(gterm), Value::nat_v(x));
    CHECK(nat_of(v) == x);
  }
}

TEST_CASE("omega-ca premise mismatch") {
  FormulaPtr f = desugar(parse_formula(
      "(forall-st x nat (forall N nat (atom eq0 x N)))"));
  int counter = 0;
  RuleCtx ctx = ctx_with(counter);
  StepRecord rec;
  TermPtr F = parse_term("(lam a nat (lam b nat a))");
  TermPtr bound = parse_term("(lam a nat 0)");
  CHECK_THROWS_AS(rule_omega_ca(f, F, bound, ctx, rec), PremiseMismatch);
}

TEST_CASE("resolve-approx instance") {
  ParamEnv env{{"x", type_real()}};
  FormulaPtr f = parse_formula("(approx x x (-> nat nat))", env);
  int counter = 0;
  RuleCtx ctx = ctx_with(counter);
  StepRecord rec;
  FormulaPtr out = rule_resolve_approx(desugar_keep_approx(f), "", {}, ctx, rec);
  CHECK(match_forall_st(out).has_value());
}
