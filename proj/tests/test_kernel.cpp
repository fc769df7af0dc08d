#include "doctest.h"
#include "nsx/error.hpp"
#include "nsx/parser.hpp"
#include "nsx/typecheck.hpp"

using namespace nsx;

TEST_CASE("type parsing and equality") {
  CHECK(FinType::parse("nat") == FinType::nat());
  CHECK(FinType::parse("(-> nat nat)") == type_real());
  CHECK(FinType::parse("(seq nat)") == FinType::seq(FinType::nat()));
  CHECK(FinType::parse("(-> nat nat nat)") ==
        FinType::arrow(FinType::nat(), FinType::arrow(FinType::nat(), FinType::nat())));
  CHECK(FinType::seq(FinType::nat()) != type_real());
}

TEST_CASE("term parsing round trip") {
  for (const char* src : {
           "(app succ 0)",
           "(app max (seq0 2 5 3))",
           "(app (lam x nat x) zero)",
           "(lam f (-> nat nat) (lam k nat (app f (app f k))))",
           "(app (rec nat) 3 1 (lam i nat (lam r nat (app (app mul 2) r))))",
       }) {
    TermPtr t = parse_term(src);
    std::string printed = print_term(t);
    TermPtr back = parse_term(printed);
    CHECK(alpha_equal(t, back));
    CHECK(print_term(back) == printed);
  }
}

TEST_CASE("typecheck basics") {
  CHECK(typecheck_term(parse_term("zero")).type == FinType::nat());
  CHECK(typecheck_term(parse_term("(lam x nat (app succ x))")).type ==
        FinType::arrow(FinType::nat(), FinType::nat()));
  // append on an empty and a singleton sequence
  TermPtr t = parse_term("(app append (empty nat) (seq0 0))");
  CHECK(typecheck_term(t).type == FinType::seq(FinType::nat()));
  CHECK_THROWS_AS(typecheck_term(parse_term("(app zero zero)")), TypeMismatch);
  CHECK_THROWS_AS(typecheck_term(parse_term("(app (lam x nat x) (empty nat))")),
                  TypeMismatch);
  CHECK_THROWS_AS(parse_term("unknown-const"), UnknownConstant);
}

TEST_CASE("typecheck reports unbound variables") {
  // A raw de Bruijn index with no binder.
  CHECK_THROWS_AS(typecheck_term(Term::var(0, "x")), UnboundVariable);
}

TEST_CASE("ambiguous polymorphic constant requires annotation") {
  CHECK_THROWS_AS(typecheck_term(parse_term("(lam x nat empty)")),
                  TypeMismatch);
  // applied occurrences resolve through unification
  CHECK(typecheck_term(parse_term("(lam s (seq nat) (app len s))")).type ==
        FinType::arrow(FinType::seq(FinType::nat()), FinType::nat()));
  // annotated version works
  CHECK(typecheck_term(parse_term("(lam s (seq nat) (app (len nat) s))")).type ==
        FinType::arrow(FinType::seq(FinType::nat()), FinType::nat()));
}

TEST_CASE("formula parsing, desugaring and internality") {
  FormulaPtr f = parse_formula("(atom eq0 zero zero)");
  CHECK(is_internal(f));
  FormulaPtr g = parse_formula("(st zero)");
  CHECK(!is_internal(g));
  FormulaPtr h = parse_formula("(forall-st k nat (atom le0 k k))");
  CHECK(!is_internal(desugar(h)));
  CHECK(!has_sugar(desugar(h)));
  // desugar is idempotent
  CHECK(alpha_equal(desugar(desugar(h)), desugar(h)));
}

TEST_CASE("approximate equality desugars to the Cauchy shape") {
  ParamEnv env{{"x", type_real()}, {"y", type_real()}};
  FormulaPtr f = parse_formula("(approx x y (-> nat nat))", env);
  FormulaPtr d = desugar(f);
  // (forall n)(st(n) -> cauchy-close(x, y, n))
  REQUIRE(d->kind == Formula::Kind::ForAll);
  auto v = match_forall_st(d);
  REQUIRE(v.has_value());
  CHECK(v->body->kind == Formula::Kind::Atom);
  CHECK(v->body->rel == kRelCauchyClose);
  // at type nat it is plain equality
  ParamEnv env2{{"a", FinType::nat()}, {"b", FinType::nat()}};
  FormulaPtr fn = desugar(parse_formula("(approx a b nat)", env2));
  CHECK(fn->kind == Formula::Kind::Atom);
  CHECK(is_internal(fn));
  // sequence representation also gets the Def-2.14 shape
  ParamEnv env3{{"s", FinType::seq(FinType::nat())},
                {"t", FinType::seq(FinType::nat())}};
  FormulaPtr fs = desugar(parse_formula("(approx s t (seq nat))", env3));
  CHECK(match_forall_st(fs).has_value());
}

TEST_CASE("approximate equality is rejected above rank 2") {
  FinType rank3 = FinType::arrow(
      FinType::arrow(type_real(), FinType::nat()), FinType::nat());
  ParamEnv env{{"F", rank3}, {"G", rank3}};
  MetaSupply metas;
  std::vector<std::pair<std::string, FinType>> scope;
  FormulaPtr f = Formula::approx_eq(Term::param("F", rank3),
                                    Term::param("G", rank3), rank3);
  CHECK_THROWS_AS(desugar(f), UnsupportedType);
}

TEST_CASE("substitution is capture avoiding") {
  // substitute(forall y. x = y, x, y) renames the binder
  ParamEnv env{{"x", FinType::nat()}, {"y", FinType::nat()}};
  FormulaPtr f = parse_formula("(forall y nat (atom eq0 x y))", env);
  FormulaPtr g = subst_formula_param(f, "x", Term::param("y", FinType::nat()));
  // the bound y is a de Bruijn index; the substituted y is the free param
  REQUIRE(g->kind == Formula::Kind::ForAll);
  const FormulaPtr& atom = g->a;
  REQUIRE(atom->kind == Formula::Kind::Atom);
  CHECK(atom->args[0]->kind == Term::Kind::Param);
  CHECK(atom->args[1]->kind == Term::Kind::Var);
  // printing renames the binder apart from the free y
  std::string printed = print_formula(g);
  CHECK(printed.find("y1") != std::string::npos);
}

TEST_CASE("st substitution example") {
  FormulaPtr f = Formula::st(Term::param("x", FinType::nat()));
  FormulaPtr g = subst_formula_param(f, "x", t_zero());
  CHECK(g->kind == Formula::Kind::St);
  CHECK(g->term->kind == Term::Kind::Lit);
}
