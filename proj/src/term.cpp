#include "nsx/term.hpp"

#include "nsx/error.hpp"

namespace nsx {

TermPtr Term::var(int index, std::string hint) {
  auto t = std::make_shared<Term>();
  t->kind = Kind::Var;
  t->index = index;
  t->name = std::move(hint);
  return t;
}

TermPtr Term::param(std::string name, FinType ty) {
  auto t = std::make_shared<Term>();
  t->kind = Kind::Param;
  t->name = std::move(name);
  t->type = std::move(ty);
  return t;
}

TermPtr Term::cnst(std::string name, FinType ty) {
  auto t = std::make_shared<Term>();
  t->kind = Kind::Const;
  t->name = std::move(name);
  t->type = std::move(ty);
  return t;
}

TermPtr Term::lit(Nat n) {
  auto t = std::make_shared<Term>();
  t->kind = Kind::Lit;
  t->nat = std::move(n);
  t->type = FinType::nat();
  return t;
}

TermPtr Term::lam(std::string hint, FinType ty, TermPtr body) {
  auto t = std::make_shared<Term>();
  t->kind = Kind::Lam;
  t->name = std::move(hint);
  t->type = std::move(ty);
  t->body = std::move(body);
  return t;
}

TermPtr Term::app(TermPtr f, TermPtr a) {
  auto t = std::make_shared<Term>();
  t->kind = Kind::App;
  t->fn = std::move(f);
  t->arg = std::move(a);
  return t;
}

TermPtr Term::apps(TermPtr f, const std::vector<TermPtr>& args) {
  TermPtr t = std::move(f);
  for (const auto& a : args) t = app(t, a);
  return t;
}

bool alpha_equal(const TermPtr& a, const TermPtr& b) {
  if (a == b) return true;
  if (!a || !b || a->kind != b->kind) return false;
  switch (a->kind) {
    case Term::Kind::Var:
      return a->index == b->index;
    case Term::Kind::Param:
      return a->name == b->name;
    case Term::Kind::Const:
      return a->name == b->name && a->type == b->type;
    case Term::Kind::Lit:
      return a->nat == b->nat;
    case Term::Kind::Lam:
      return a->type == b->type && alpha_equal(a->body, b->body);
    case Term::Kind::App:
      return alpha_equal(a->fn, b->fn) && alpha_equal(a->arg, b->arg);
  }
  return false;
}

TermPtr shift_term(const TermPtr& t, int d, int cutoff) {
  if (!t || d == 0) return t;
  switch (t->kind) {
    case Term::Kind::Var:
      if (t->index >= cutoff) return Term::var(t->index + d, t->name);
      return t;
    case Term::Kind::Param:
    case Term::Kind::Const:
    case Term::Kind::Lit:
      return t;
    case Term::Kind::Lam:
      return Term::lam(t->name, t->type, shift_term(t->body, d, cutoff + 1));
    case Term::Kind::App:
      return Term::app(shift_term(t->fn, d, cutoff),
                       shift_term(t->arg, d, cutoff));
  }
  return t;
}

TermPtr subst_term(const TermPtr& t, int idx, const TermPtr& repl) {
  if (!t) return t;
  switch (t->kind) {
    case Term::Kind::Var:
      if (t->index == idx) return repl;
      if (t->index > idx) return Term::var(t->index - 1, t->name);
      return t;
    case Term::Kind::Param:
    case Term::Kind::Const:
    case Term::Kind::Lit:
      return t;
    case Term::Kind::Lam:
      return Term::lam(t->name, t->type,
                       subst_term(t->body, idx + 1, shift_term(repl, 1)));
    case Term::Kind::App:
      return Term::app(subst_term(t->fn, idx, repl),
                       subst_term(t->arg, idx, repl));
  }
  return t;
}

TermPtr subst_param(const TermPtr& t, const std::string& name,
                    const TermPtr& repl) {
  if (!t) return t;
  switch (t->kind) {
    case Term::Kind::Param:
      if (t->name == name) return repl;
      return t;
    case Term::Kind::Var:
    case Term::Kind::Const:
    case Term::Kind::Lit:
      return t;
    case Term::Kind::Lam:
      return Term::lam(t->name, t->type,
                       subst_param(t->body, name, shift_term(repl, 1)));
    case Term::Kind::App:
      return Term::app(subst_param(t->fn, name, repl),
                       subst_param(t->arg, name, repl));
  }
  return t;
}

bool has_free_var(const TermPtr& t, int idx) {
  if (!t) return false;
  switch (t->kind) {
    case Term::Kind::Var:
      return t->index == idx;
    case Term::Kind::Param:
    case Term::Kind::Const:
    case Term::Kind::Lit:
      return false;
    case Term::Kind::Lam:
      return has_free_var(t->body, idx + 1);
    case Term::Kind::App:
      return has_free_var(t->fn, idx) || has_free_var(t->arg, idx);
  }
  return false;
}

int max_free_index(const TermPtr& t) {
  if (!t) return 0;
  switch (t->kind) {
    case Term::Kind::Var:
      return t->index + 1;
    case Term::Kind::Param:
    case Term::Kind::Const:
    case Term::Kind::Lit:
      return 0;
    case Term::Kind::Lam: {
      int b = max_free_index(t->body);
      return b > 0 ? b - 1 : 0;
    }
    case Term::Kind::App:
      return std::max(max_free_index(t->fn), max_free_index(t->arg));
  }
  return 0;
}

void collect_params(const TermPtr& t, std::set<std::string>& out) {
  if (!t) return;
  switch (t->kind) {
    case Term::Kind::Param:
      out.insert(t->name);
      return;
    case Term::Kind::Lam:
      collect_params(t->body, out);
      return;
    case Term::Kind::App:
      collect_params(t->fn, out);
      collect_params(t->arg, out);
      return;
    default:
      return;
  }
}

bool is_closed_term(const TermPtr& t) {
  std::set<std::string> ps;
  collect_params(t, ps);
  return max_free_index(t) == 0 && ps.empty();
}

size_t term_size(const TermPtr& t) {
  if (!t) return 0;
  switch (t->kind) {
    case Term::Kind::Lam:
      return 1 + term_size(t->body);
    case Term::Kind::App:
      return 1 + term_size(t->fn) + term_size(t->arg);
    default:
      return 1;
  }
}

namespace {

FinType s_nat(const FinType&) { return FinType::nat(); }
FinType s_nat1(const FinType&) {
  return FinType::arrow(FinType::nat(), FinType::nat());
}
FinType s_nat2(const FinType&) {
  auto n = FinType::nat();
  return FinType::arrow(n, FinType::arrow(n, n));
}
FinType s_rec(const FinType& a) {
  auto n = FinType::nat();
  // rec : 0 -> a -> (0 -> a -> a) -> a
  return FinType::arrow(
      n, FinType::arrow(a, FinType::arrow(
                               FinType::arrow(n, FinType::arrow(a, a)), a)));
}
FinType s_empty(const FinType& a) { return FinType::seq(a); }
FinType s_append(const FinType& a) {
  auto s = FinType::seq(a);
  return FinType::arrow(s, FinType::arrow(s, s));
}
FinType s_cons(const FinType& a) {
  auto s = FinType::seq(a);
  return FinType::arrow(a, FinType::arrow(s, s));
}
FinType s_len(const FinType& a) {
  return FinType::arrow(FinType::seq(a), FinType::nat());
}
FinType s_index(const FinType& a) {
  return FinType::arrow(FinType::seq(a),
                        FinType::arrow(FinType::nat(), a));
}
FinType s_maxnat(const FinType&) {
  return FinType::arrow(FinType::seq(FinType::nat()), FinType::nat());
}

const ConstInfo kConsts[] = {
    {"zero", false, s_nat},    {"succ", false, s_nat1},
    {"add", false, s_nat2},    {"mul", false, s_nat2},
    {"monus", false, s_nat2},  {"le", false, s_nat2},
    {"max", false, s_maxnat},
    {"rec", true, s_rec},      {"empty", true, s_empty},
    {"append", true, s_append},{"cons", true, s_cons},
    {"len", true, s_len},      {"index", true, s_index},
};

}  // namespace

const ConstInfo* lookup_const(const std::string& name) {
  for (const auto& c : kConsts)
    if (c.name == name) return &c;
  return nullptr;
}

FinType const_type(const std::string& name, const FinType& at) {
  const ConstInfo* c = lookup_const(name);
  if (!c) throw UnknownConstant(name);
  return c->scheme(at);
}

TermPtr t_zero() { return Term::lit(0); }
TermPtr t_succ(TermPtr t) {
  return Term::app(Term::cnst("succ", const_type("succ", FinType::nat())),
                   std::move(t));
}
static TermPtr bin(const char* name, TermPtr a, TermPtr b) {
  return Term::apps(Term::cnst(name, const_type(name, FinType::nat())),
                    {std::move(a), std::move(b)});
}
TermPtr t_add(TermPtr a, TermPtr b) { return bin("add", std::move(a), std::move(b)); }
TermPtr t_mul(TermPtr a, TermPtr b) { return bin("mul", std::move(a), std::move(b)); }
TermPtr t_monus(TermPtr a, TermPtr b) { return bin("monus", std::move(a), std::move(b)); }
TermPtr t_le(TermPtr a, TermPtr b) { return bin("le", std::move(a), std::move(b)); }
TermPtr t_maxnat(TermPtr s) {
  return Term::app(Term::cnst("max", const_type("max", FinType::nat())),
                   std::move(s));
}

}  // namespace nsx
