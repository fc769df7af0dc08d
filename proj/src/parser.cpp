#include "nsx/parser.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "nsx/error.hpp"

namespace nsx {

namespace {

bool is_number(const std::string& s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

int scope_lookup(const std::vector<std::pair<std::string, FinType>>& scope,
                 const std::string& name) {
  for (size_t i = scope.size(); i-- > 0;) {
    if (scope[i].first == name)
      return static_cast<int>(scope.size() - 1 - i);
  }
  return -1;
}

// (aparth): equality at higher types unfolds into universally quantified
// equalities at type 0 over the curried arguments.
FormulaPtr unfold_higher_eq(const TermPtr& x, const TermPtr& y,
                            const FinType& ty) {
  if (ty == FinType::nat()) return Formula::atom(kRelEq0, {x, y});
  if (!ty.is_arrow()) return Formula::atom(kRelEq, {x, y});
  auto argtys = ty.argument_types();
  if (ty.final_codomain() != FinType::nat())
    return Formula::atom(kRelEq, {x, y});
  int k = static_cast<int>(argtys.size());
  TermPtr lx = shift_term(x, k);
  TermPtr ly = shift_term(y, k);
  for (int i = 0; i < k; ++i) {
    lx = Term::app(lx, Term::var(k - 1 - i, "z"));
    ly = Term::app(ly, Term::var(k - 1 - i, "z"));
  }
  FormulaPtr body = Formula::atom(kRelEq0, {lx, ly});
  for (int i = k - 1; i >= 0; --i)
    body = Formula::forall("z" + std::to_string(i + 1), argtys[i], body);
  return body;
}

}  // namespace

TermPtr parse_term(const Sexpr& e, const ParamEnv& params, MetaSupply& metas,
                   std::vector<std::pair<std::string, FinType>>& scope) {
  if (e.is_atom) {
    if (is_number(e.atom)) return Term::lit(Nat(e.atom));
    int idx = scope_lookup(scope, e.atom);
    if (idx >= 0) return Term::var(idx, e.atom);
    auto it = params.find(e.atom);
    if (it != params.end()) return Term::param(e.atom, it->second);
    if (const ConstInfo* c = lookup_const(e.atom)) {
      FinType at = c->poly ? metas.fresh() : FinType::nat();
      return Term::cnst(e.atom, c->scheme(at));
    }
    throw UnknownConstant(e.atom);
  }
  const std::string h = e.head();
  if (h == "lam") {
    if (e.size() != 4) throw SyntaxError(e.pos, "(lam x type body)");
    FinType ty = FinType::from_sexpr(e[2]);
    scope.emplace_back(e[1].atom, ty);
    TermPtr body = parse_term(e[3], params, metas, scope);
    scope.pop_back();
    return Term::lam(e[1].atom, ty, body);
  }
  if (h == "app") {
    if (e.size() < 3) throw SyntaxError(e.pos, "(app f a ...)");
    TermPtr t = parse_term(e[1], params, metas, scope);
    for (size_t i = 2; i < e.size(); ++i)
      t = Term::app(t, parse_term(e[i], params, metas, scope));
    return t;
  }
  if (h == "seq0") {
    // Literal finite sequence of naturals: (seq0 2 5 3).
    TermPtr t = Term::cnst("empty", const_type("empty", FinType::nat()));
    for (size_t i = e.size(); i-- > 1;) {
      TermPtr head = parse_term(e[i], params, metas, scope);
      t = Term::apps(Term::cnst("cons", const_type("cons", FinType::nat())),
                     {head, t});
    }
    return t;
  }
  // Annotated polymorphic constant: (rec nat), (empty (seq nat)), ...
  if (const ConstInfo* c = lookup_const(h)) {
    if (!c->poly || e.size() != 2)
      throw SyntaxError(e.pos, "constant '" + h + "' takes one type argument");
    return Term::cnst(h, c->scheme(FinType::from_sexpr(e[1])));
  }
  throw SyntaxError(e.pos, "unknown term form '" + h + "'");
}

TermPtr parse_term(const std::string& text, const ParamEnv& params) {
  MetaSupply metas;
  std::vector<std::pair<std::string, FinType>> scope;
  return parse_term(parse_sexpr(text), params, metas, scope);
}

FormulaPtr parse_formula(const Sexpr& e, const ParamEnv& params,
                         MetaSupply& metas,
                         std::vector<std::pair<std::string, FinType>>& scope) {
  if (e.is_atom)
    throw SyntaxError(e.pos, "expected a formula, got '" + e.atom + "'");
  const std::string h = e.head();
  auto sub = [&](size_t i) { return parse_formula(e[i], params, metas, scope); };
  auto subt = [&](size_t i) { return parse_term(e[i], params, metas, scope); };

  if (h == "atom") {
    if (e.size() < 2 || !e[1].is_atom)
      throw SyntaxError(e.pos, "(atom rel term ...)");
    std::vector<TermPtr> args;
    for (size_t i = 2; i < e.size(); ++i) args.push_back(subt(i));
    return Formula::atom(e[1].atom, std::move(args));
  }
  if (h == "st") {
    if (e.size() != 2) throw SyntaxError(e.pos, "(st term)");
    return Formula::st(subt(1));
  }
  if (h == "in-omega") {
    if (e.size() != 2) throw SyntaxError(e.pos, "(in-omega term)");
    return Formula::in_omega(subt(1));
  }
  if (h == "not") {
    if (e.size() != 2) throw SyntaxError(e.pos, "(not f)");
    return Formula::negate(sub(1));
  }
  if (h == "and" || h == "or" || h == "implies") {
    if (e.size() < 3) throw SyntaxError(e.pos, "(" + h + " f g ...)");
    if (h == "implies") {
      // Right-associated.
      FormulaPtr t = sub(e.size() - 1);
      for (size_t i = e.size() - 1; i-- > 1;)
        t = Formula::implies(sub(i), t);
      return t;
    }
    FormulaPtr t = sub(1);
    for (size_t i = 2; i < e.size(); ++i)
      t = (h == "and") ? Formula::conj(t, sub(i)) : Formula::disj(t, sub(i));
    return t;
  }
  if (h == "forall" || h == "exists" || h == "forall-st" || h == "exists-st") {
    if (e.size() != 4) throw SyntaxError(e.pos, "(" + h + " x type f)");
    FinType ty = FinType::from_sexpr(e[2]);
    scope.emplace_back(e[1].atom, ty);
    FormulaPtr body = parse_formula(e[3], params, metas, scope);
    scope.pop_back();
    if (h == "forall") return Formula::forall(e[1].atom, ty, body);
    if (h == "exists") return Formula::exists(e[1].atom, ty, body);
    if (h == "forall-st") return Formula::forall_st(e[1].atom, ty, body);
    return Formula::exists_st(e[1].atom, ty, body);
  }
  if (h == "forall-in" || h == "exists-in") {
    // (forall-in x type seq f): bounded quantifier over a finite sequence.
    if (e.size() != 5) throw SyntaxError(e.pos, "(" + h + " x type seq f)");
    FinType ty = FinType::from_sexpr(e[2]);
    TermPtr seq = subt(3);
    scope.emplace_back(e[1].atom, ty);
    FormulaPtr body = parse_formula(e[4], params, metas, scope);
    scope.pop_back();
    if (h == "forall-in") return bounded_forall(e[1].atom, ty, seq, body);
    return bounded_exists(e[1].atom, ty, seq, body);
  }
  if (h == "approx") {
    if (e.size() != 4) throw SyntaxError(e.pos, "(approx x y type)");
    TermPtr x = subt(1), y = subt(2);
    return Formula::approx_eq(x, y, FinType::from_sexpr(e[3]));
  }
  if (h == "eqh") {
    if (e.size() != 4) throw SyntaxError(e.pos, "(eqh x y type)");
    TermPtr x = subt(1), y = subt(2);
    return unfold_higher_eq(x, y, FinType::from_sexpr(e[3]));
  }
  throw SyntaxError(e.pos, "unknown formula form '" + h + "'");
}

FormulaPtr parse_formula(const std::string& text, const ParamEnv& params) {
  MetaSupply metas;
  std::vector<std::pair<std::string, FinType>> scope;
  return parse_formula(parse_sexpr(text), params, metas, scope);
}

namespace {

thread_local const std::set<std::string>* g_reserved = nullptr;

std::string fresh_name(const std::string& hint,
                       const std::vector<std::string>& names) {
  std::string base = hint.empty() ? "x" : hint;
  std::string cand = base;
  int n = 0;
  auto used = [&](const std::string& s) {
    if (g_reserved && g_reserved->count(s)) return true;
    return std::find(names.begin(), names.end(), s) != names.end() ||
           lookup_const(s) != nullptr || is_number(s);
  };
  while (used(cand)) cand = base + std::to_string(++n);
  return cand;
}

struct ReservedGuard {
  explicit ReservedGuard(const std::set<std::string>* r) { g_reserved = r; }
  ~ReservedGuard() { g_reserved = nullptr; }
};

}  // namespace

Sexpr term_to_sexpr(const TermPtr& t, std::vector<std::string>& names) {
  switch (t->kind) {
    case Term::Kind::Var: {
      int pos = static_cast<int>(names.size()) - 1 - t->index;
      if (pos < 0) return Sexpr::symbol("#" + std::to_string(t->index));
      return Sexpr::symbol(names[pos]);
    }
    case Term::Kind::Param:
      return Sexpr::symbol(t->name);
    case Term::Kind::Const: {
      const ConstInfo* c = lookup_const(t->name);
      if (c && c->poly) {
        // Recover the element annotation from the pinned type.
        FinType at;
        if (t->name == "rec")
          at = t->type.cod().dom();
        else if (t->name == "empty")
          at = t->type.elem();
        else if (t->name == "cons")
          at = t->type.dom();
        else  // append, len, index
          at = t->type.dom().elem();
        return Sexpr::list({Sexpr::symbol(t->name), at.to_sexpr()});
      }
      return Sexpr::symbol(t->name);
    }
    case Term::Kind::Lit:
      return Sexpr::symbol(t->nat.str());
    case Term::Kind::Lam: {
      std::string n = fresh_name(t->name, names);
      names.push_back(n);
      Sexpr body = term_to_sexpr(t->body, names);
      names.pop_back();
      return Sexpr::list({Sexpr::symbol("lam"), Sexpr::symbol(n),
                          t->type.to_sexpr(), body});
    }
    case Term::Kind::App: {
      // Flatten the application spine.
      std::vector<TermPtr> spine;
      TermPtr cur = t;
      while (cur->kind == Term::Kind::App) {
        spine.push_back(cur->arg);
        cur = cur->fn;
      }
      std::vector<Sexpr> items{Sexpr::symbol("app"),
                               term_to_sexpr(cur, names)};
      for (size_t i = spine.size(); i-- > 0;)
        items.push_back(term_to_sexpr(spine[i], names));
      return Sexpr::list(std::move(items));
    }
  }
  return Sexpr::symbol("?");
}

Sexpr formula_to_sexpr(const FormulaPtr& f, std::vector<std::string>& names) {
  auto sym = [](const char* s) { return Sexpr::symbol(s); };
  switch (f->kind) {
    case Formula::Kind::Atom: {
      std::vector<Sexpr> items{sym("atom"), Sexpr::symbol(f->rel)};
      for (const auto& t : f->args) items.push_back(term_to_sexpr(t, names));
      return Sexpr::list(std::move(items));
    }
    case Formula::Kind::St:
      return Sexpr::list({sym("st"), term_to_sexpr(f->term, names)});
    case Formula::Kind::InOmega:
      return Sexpr::list({sym("in-omega"), term_to_sexpr(f->term, names)});
    case Formula::Kind::ApproxEq:
      return Sexpr::list({sym("approx"), term_to_sexpr(f->lhs, names),
                          term_to_sexpr(f->rhs, names), f->type.to_sexpr()});
    case Formula::Kind::Not:
      return Sexpr::list({sym("not"), formula_to_sexpr(f->a, names)});
    case Formula::Kind::And:
      return Sexpr::list({sym("and"), formula_to_sexpr(f->a, names),
                          formula_to_sexpr(f->b, names)});
    case Formula::Kind::Or:
      return Sexpr::list({sym("or"), formula_to_sexpr(f->a, names),
                          formula_to_sexpr(f->b, names)});
    case Formula::Kind::Implies:
      return Sexpr::list({sym("implies"), formula_to_sexpr(f->a, names),
                          formula_to_sexpr(f->b, names)});
    case Formula::Kind::ForAll:
    case Formula::Kind::Exists:
    case Formula::Kind::ForAllSt:
    case Formula::Kind::ExistsSt: {
      const char* head = f->kind == Formula::Kind::ForAll     ? "forall"
                         : f->kind == Formula::Kind::Exists   ? "exists"
                         : f->kind == Formula::Kind::ForAllSt ? "forall-st"
                                                              : "exists-st";
      std::string n = fresh_name(f->name, names);
      names.push_back(n);
      Sexpr body = formula_to_sexpr(f->a, names);
      names.pop_back();
      return Sexpr::list(
          {sym(head), Sexpr::symbol(n), f->type.to_sexpr(), body});
    }
  }
  return sym("?");
}

std::string print_term(const TermPtr& t) {
  std::set<std::string> reserved;
  collect_params(t, reserved);
  ReservedGuard guard(&reserved);
  std::vector<std::string> names;
  return term_to_sexpr(t, names).to_string();
}

std::string print_formula(const FormulaPtr& f) {
  std::set<std::string> reserved;
  collect_params(f, reserved);
  ReservedGuard guard(&reserved);
  std::vector<std::string> names;
  return formula_to_sexpr(f, names).to_string();
}

}  // namespace nsx
