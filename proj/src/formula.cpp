#include "nsx/formula.hpp"

#include <functional>

#include "nsx/error.hpp"

namespace nsx {

namespace {

FormulaPtr mk(Formula::Kind k) {
  auto f = std::make_shared<Formula>();
  const_cast<Formula&>(*f).kind = k;
  return f;
}

Formula& mut(const FormulaPtr& f) { return const_cast<Formula&>(*f); }

int type_rank(const FinType& t) {
  switch (t.kind()) {
    case FinType::Kind::Nat:
      return 0;
    case FinType::Kind::Seq:
      return type_rank(t.elem());
    case FinType::Kind::Arrow:
      return std::max(type_rank(t.dom()) + 1, type_rank(t.cod()));
    default:
      return 0;
  }
}

}  // namespace

FormulaPtr Formula::atom(std::string rel, std::vector<TermPtr> args) {
  auto f = mk(Kind::Atom);
  mut(f).rel = std::move(rel);
  mut(f).args = std::move(args);
  return f;
}

FormulaPtr Formula::st(TermPtr t) {
  auto f = mk(Kind::St);
  mut(f).term = std::move(t);
  return f;
}

FormulaPtr Formula::negate(FormulaPtr x) {
  auto f = mk(Kind::Not);
  mut(f).a = std::move(x);
  return f;
}

FormulaPtr Formula::conj(FormulaPtr x, FormulaPtr y) {
  auto f = mk(Kind::And);
  mut(f).a = std::move(x);
  mut(f).b = std::move(y);
  return f;
}

FormulaPtr Formula::disj(FormulaPtr x, FormulaPtr y) {
  auto f = mk(Kind::Or);
  mut(f).a = std::move(x);
  mut(f).b = std::move(y);
  return f;
}

FormulaPtr Formula::implies(FormulaPtr x, FormulaPtr y) {
  auto f = mk(Kind::Implies);
  mut(f).a = std::move(x);
  mut(f).b = std::move(y);
  return f;
}

FormulaPtr Formula::forall(std::string hint, FinType ty, FormulaPtr body) {
  auto f = mk(Kind::ForAll);
  mut(f).name = std::move(hint);
  mut(f).type = std::move(ty);
  mut(f).a = std::move(body);
  return f;
}

FormulaPtr Formula::exists(std::string hint, FinType ty, FormulaPtr body) {
  auto f = mk(Kind::Exists);
  mut(f).name = std::move(hint);
  mut(f).type = std::move(ty);
  mut(f).a = std::move(body);
  return f;
}

FormulaPtr Formula::forall_st(std::string hint, FinType ty, FormulaPtr body) {
  auto f = mk(Kind::ForAllSt);
  mut(f).name = std::move(hint);
  mut(f).type = std::move(ty);
  mut(f).a = std::move(body);
  return f;
}

FormulaPtr Formula::exists_st(std::string hint, FinType ty, FormulaPtr body) {
  auto f = mk(Kind::ExistsSt);
  mut(f).name = std::move(hint);
  mut(f).type = std::move(ty);
  mut(f).a = std::move(body);
  return f;
}

FormulaPtr Formula::in_omega(TermPtr t) {
  auto f = mk(Kind::InOmega);
  mut(f).term = std::move(t);
  return f;
}

FormulaPtr Formula::approx_eq(TermPtr x, TermPtr y, FinType ty) {
  auto f = mk(Kind::ApproxEq);
  mut(f).lhs = std::move(x);
  mut(f).rhs = std::move(y);
  mut(f).type = std::move(ty);
  return f;
}

bool alpha_equal(const FormulaPtr& x, const FormulaPtr& y) {
  if (x == y) return true;
  if (!x || !y || x->kind != y->kind) return false;
  switch (x->kind) {
    case Formula::Kind::Atom: {
      if (x->rel != y->rel || x->args.size() != y->args.size()) return false;
      for (size_t i = 0; i < x->args.size(); ++i)
        if (!alpha_equal(x->args[i], y->args[i])) return false;
      return true;
    }
    case Formula::Kind::St:
    case Formula::Kind::InOmega:
      return alpha_equal(x->term, y->term);
    case Formula::Kind::ApproxEq:
      return x->type == y->type && alpha_equal(x->lhs, y->lhs) &&
             alpha_equal(x->rhs, y->rhs);
    case Formula::Kind::Not:
      return alpha_equal(x->a, y->a);
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Implies:
      return alpha_equal(x->a, y->a) && alpha_equal(x->b, y->b);
    case Formula::Kind::ForAll:
    case Formula::Kind::Exists:
    case Formula::Kind::ForAllSt:
    case Formula::Kind::ExistsSt:
      return x->type == y->type && alpha_equal(x->a, y->a);
  }
  return false;
}

namespace {

template <typename TermFn, typename Rec>
FormulaPtr map_formula(const FormulaPtr& f, int depth, TermFn on_term,
                       Rec rec) {
  switch (f->kind) {
    case Formula::Kind::Atom: {
      std::vector<TermPtr> args;
      args.reserve(f->args.size());
      for (const auto& t : f->args) args.push_back(on_term(t, depth));
      return Formula::atom(f->rel, std::move(args));
    }
    case Formula::Kind::St:
      return Formula::st(on_term(f->term, depth));
    case Formula::Kind::InOmega:
      return Formula::in_omega(on_term(f->term, depth));
    case Formula::Kind::ApproxEq:
      return Formula::approx_eq(on_term(f->lhs, depth), on_term(f->rhs, depth),
                                f->type);
    case Formula::Kind::Not:
      return Formula::negate(rec(f->a, depth));
    case Formula::Kind::And:
      return Formula::conj(rec(f->a, depth), rec(f->b, depth));
    case Formula::Kind::Or:
      return Formula::disj(rec(f->a, depth), rec(f->b, depth));
    case Formula::Kind::Implies:
      return Formula::implies(rec(f->a, depth), rec(f->b, depth));
    case Formula::Kind::ForAll:
      return Formula::forall(f->name, f->type, rec(f->a, depth + 1));
    case Formula::Kind::Exists:
      return Formula::exists(f->name, f->type, rec(f->a, depth + 1));
    case Formula::Kind::ForAllSt:
      return Formula::forall_st(f->name, f->type, rec(f->a, depth + 1));
    case Formula::Kind::ExistsSt:
      return Formula::exists_st(f->name, f->type, rec(f->a, depth + 1));
  }
  return f;
}

}  // namespace

FormulaPtr shift_formula(const FormulaPtr& f, int d, int cutoff) {
  if (!f || d == 0) return f;
  auto on_term = [d](const TermPtr& t, int depth) {
    return shift_term(t, d, depth);
  };
  std::function<FormulaPtr(const FormulaPtr&, int)> rec =
      [&](const FormulaPtr& g, int depth) -> FormulaPtr {
    return map_formula(g, depth, on_term, rec);
  };
  return rec(f, cutoff);
}

FormulaPtr subst_formula(const FormulaPtr& f, int idx, const TermPtr& repl) {
  auto on_term = [&repl, idx](const TermPtr& t, int depth) {
    return subst_term(t, idx + depth, shift_term(repl, depth));
  };
  std::function<FormulaPtr(const FormulaPtr&, int)> rec =
      [&](const FormulaPtr& g, int depth) -> FormulaPtr {
    return map_formula(g, depth, on_term, rec);
  };
  return rec(f, 0);
}

FormulaPtr subst_formula_param(const FormulaPtr& f, const std::string& name,
                               const TermPtr& repl) {
  auto on_term = [&](const TermPtr& t, int depth) {
    return subst_param(t, name, shift_term(repl, depth));
  };
  std::function<FormulaPtr(const FormulaPtr&, int)> rec =
      [&](const FormulaPtr& g, int depth) -> FormulaPtr {
    return map_formula(g, depth, on_term, rec);
  };
  return rec(f, 0);
}

namespace {

// (aparth2) unfolding: x ~ y at an arrow type becomes relativized universal
// quantifiers over the curried arguments with equality at type 0 inside.
FormulaPtr unfold_approx_arrow(const TermPtr& x, const TermPtr& y,
                               const FinType& ty) {
  if (type_rank(ty) > 2)
    throw UnsupportedType("approximate equality above rank 2: " +
                          ty.to_string());
  if (ty.final_codomain() != FinType::nat())
    throw UnsupportedType("approximate equality needs codomain nat: " +
                          ty.to_string());
  auto argtys = ty.argument_types();
  int k = static_cast<int>(argtys.size());
  TermPtr lx = shift_term(x, k);
  TermPtr ly = shift_term(y, k);
  for (int i = 0; i < k; ++i) {
    lx = Term::app(lx, Term::var(k - 1 - i, "z"));
    ly = Term::app(ly, Term::var(k - 1 - i, "z"));
  }
  FormulaPtr body = Formula::atom(kRelEq0, {lx, ly});
  for (int i = k - 1; i >= 0; --i)
    body = Formula::forall_st("z" + std::to_string(i + 1), argtys[i], body);
  return body;
}

}  // namespace

namespace {

FormulaPtr desugar_impl(const FormulaPtr& f, bool keep_approx) {
  switch (f->kind) {
    case Formula::Kind::ForAllSt: {
      FormulaPtr body = desugar_impl(f->a, keep_approx);
      return Formula::forall(
          f->name, f->type,
          Formula::implies(Formula::st(Term::var(0, f->name)), body));
    }
    case Formula::Kind::ExistsSt: {
      FormulaPtr body = desugar_impl(f->a, keep_approx);
      return Formula::exists(
          f->name, f->type,
          Formula::conj(Formula::st(Term::var(0, f->name)), body));
    }
    case Formula::Kind::InOmega:
      return Formula::negate(Formula::st(f->term));
    case Formula::Kind::ApproxEq: {
      if (keep_approx) return f;
      if (f->type == FinType::nat())
        return Formula::atom(kRelEq0, {f->lhs, f->rhs});
      if (f->type == type_real() || f->type.is_seq()) {
        // Fast-converging Cauchy reading: (forall-st n)(|x(n)-y(n)| <= 2^-n).
        TermPtr lx = shift_term(f->lhs, 1);
        TermPtr ly = shift_term(f->rhs, 1);
        FormulaPtr body =
            Formula::atom(kRelCauchyClose, {lx, ly, Term::var(0, "n")});
        return desugar_impl(Formula::forall_st("n", FinType::nat(), body),
                            keep_approx);
      }
      return desugar_impl(unfold_approx_arrow(f->lhs, f->rhs, f->type),
                          keep_approx);
    }
    case Formula::Kind::Atom:
    case Formula::Kind::St:
      return f;
    default: {
      auto on_term = [](const TermPtr& t, int) { return t; };
      std::function<FormulaPtr(const FormulaPtr&, int)> rec =
          [&](const FormulaPtr& g, int) -> FormulaPtr {
        return desugar_impl(g, keep_approx);
      };
      return map_formula(f, 0, on_term, rec);
    }
  }
}

}  // namespace

FormulaPtr desugar(const FormulaPtr& f) { return desugar_impl(f, false); }

FormulaPtr desugar_keep_approx(const FormulaPtr& f) {
  return desugar_impl(f, true);
}

bool is_internal(const FormulaPtr& f) {
  switch (f->kind) {
    case Formula::Kind::St:
      return false;
    case Formula::Kind::InOmega:
      return false;
    case Formula::Kind::ApproxEq:
      // The unfolding introduces relativized quantifiers, hence st nodes.
      return f->type == FinType::nat();
    case Formula::Kind::ForAllSt:
    case Formula::Kind::ExistsSt:
      return false;
    case Formula::Kind::Atom:
      return true;
    case Formula::Kind::Not:
      return is_internal(f->a);
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Implies:
      return is_internal(f->a) && is_internal(f->b);
    case Formula::Kind::ForAll:
    case Formula::Kind::Exists:
      return is_internal(f->a);
  }
  return true;
}

bool has_sugar(const FormulaPtr& f) {
  switch (f->kind) {
    case Formula::Kind::ForAllSt:
    case Formula::Kind::ExistsSt:
    case Formula::Kind::InOmega:
    case Formula::Kind::ApproxEq:
      return true;
    case Formula::Kind::Atom:
    case Formula::Kind::St:
      return false;
    case Formula::Kind::Not:
      return has_sugar(f->a);
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Implies:
      return has_sugar(f->a) || has_sugar(f->b);
    case Formula::Kind::ForAll:
    case Formula::Kind::Exists:
      return has_sugar(f->a);
  }
  return false;
}

bool mentions_index(const FormulaPtr& f, int idx) {
  switch (f->kind) {
    case Formula::Kind::Atom: {
      for (const auto& t : f->args)
        if (has_free_var(t, idx)) return true;
      return false;
    }
    case Formula::Kind::St:
    case Formula::Kind::InOmega:
      return has_free_var(f->term, idx);
    case Formula::Kind::ApproxEq:
      return has_free_var(f->lhs, idx) || has_free_var(f->rhs, idx);
    case Formula::Kind::Not:
      return mentions_index(f->a, idx);
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Implies:
      return mentions_index(f->a, idx) || mentions_index(f->b, idx);
    case Formula::Kind::ForAll:
    case Formula::Kind::Exists:
    case Formula::Kind::ForAllSt:
    case Formula::Kind::ExistsSt:
      return mentions_index(f->a, idx + 1);
  }
  return false;
}

int max_free_index(const FormulaPtr& f) {
  switch (f->kind) {
    case Formula::Kind::Atom: {
      int m = 0;
      for (const auto& t : f->args) m = std::max(m, max_free_index(t));
      return m;
    }
    case Formula::Kind::St:
    case Formula::Kind::InOmega:
      return max_free_index(f->term);
    case Formula::Kind::ApproxEq:
      return std::max(max_free_index(f->lhs), max_free_index(f->rhs));
    case Formula::Kind::Not:
      return max_free_index(f->a);
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Implies:
      return std::max(max_free_index(f->a), max_free_index(f->b));
    case Formula::Kind::ForAll:
    case Formula::Kind::Exists:
    case Formula::Kind::ForAllSt:
    case Formula::Kind::ExistsSt: {
      int m = max_free_index(f->a);
      return m > 0 ? m - 1 : 0;
    }
  }
  return 0;
}

void collect_params(const FormulaPtr& f, std::set<std::string>& out) {
  switch (f->kind) {
    case Formula::Kind::Atom:
      for (const auto& t : f->args) collect_params(t, out);
      return;
    case Formula::Kind::St:
    case Formula::Kind::InOmega:
      collect_params(f->term, out);
      return;
    case Formula::Kind::ApproxEq:
      collect_params(f->lhs, out);
      collect_params(f->rhs, out);
      return;
    case Formula::Kind::Not:
      collect_params(f->a, out);
      return;
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Implies:
      collect_params(f->a, out);
      collect_params(f->b, out);
      return;
    default:
      collect_params(f->a, out);
      return;
  }
}

size_t formula_size(const FormulaPtr& f) {
  switch (f->kind) {
    case Formula::Kind::Atom: {
      size_t n = 1;
      for (const auto& t : f->args) n += term_size(t);
      return n;
    }
    case Formula::Kind::St:
    case Formula::Kind::InOmega:
      return 1 + term_size(f->term);
    case Formula::Kind::ApproxEq:
      return 1 + term_size(f->lhs) + term_size(f->rhs);
    case Formula::Kind::Not:
      return 1 + formula_size(f->a);
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Implies:
      return 1 + formula_size(f->a) + formula_size(f->b);
    default:
      return 1 + formula_size(f->a);
  }
}

std::optional<QuantView> match_forall_st(const FormulaPtr& f) {
  if (f->kind != Formula::Kind::ForAll) return std::nullopt;
  const FormulaPtr& body = f->a;
  if (body->kind != Formula::Kind::Implies) return std::nullopt;
  const FormulaPtr& guard = body->a;
  if (guard->kind != Formula::Kind::St ||
      guard->term->kind != Term::Kind::Var || guard->term->index != 0)
    return std::nullopt;
  return QuantView{f->name, f->type, body->b};
}

std::optional<QuantView> match_exists_st(const FormulaPtr& f) {
  if (f->kind != Formula::Kind::Exists) return std::nullopt;
  const FormulaPtr& body = f->a;
  if (body->kind != Formula::Kind::And) return std::nullopt;
  const FormulaPtr& guard = body->a;
  if (guard->kind != Formula::Kind::St ||
      guard->term->kind != Term::Kind::Var || guard->term->index != 0)
    return std::nullopt;
  return QuantView{f->name, f->type, body->b};
}

namespace {

std::optional<BoundedView> match_bounded(const FormulaPtr& f,
                                         Formula::Kind quant,
                                         Formula::Kind conn) {
  if (f->kind != quant) return std::nullopt;
  const FormulaPtr& body = f->a;
  if (body->kind != conn) return std::nullopt;
  const FormulaPtr& guard = body->a;
  if (guard->kind != Formula::Kind::Atom || guard->rel != kRelInSeq ||
      guard->args.size() != 2)
    return std::nullopt;
  const TermPtr& elem = guard->args[0];
  if (elem->kind != Term::Kind::Var || elem->index != 0) return std::nullopt;
  const TermPtr& seq = guard->args[1];
  if (has_free_var(seq, 0)) return std::nullopt;
  return BoundedView{f->name, f->type, subst_term(seq, 0, Term::lit(0)),
                     body->b};
}

}  // namespace

std::optional<BoundedView> match_bounded_exists(const FormulaPtr& f) {
  return match_bounded(f, Formula::Kind::Exists, Formula::Kind::And);
}

std::optional<BoundedView> match_bounded_forall(const FormulaPtr& f) {
  return match_bounded(f, Formula::Kind::ForAll, Formula::Kind::Implies);
}

FormulaPtr bounded_exists(std::string hint, FinType ty, TermPtr seq,
                          FormulaPtr body) {
  auto guard = Formula::atom(
      kRelInSeq, {Term::var(0, hint), shift_term(std::move(seq), 1)});
  return Formula::exists(std::move(hint), std::move(ty),
                         Formula::conj(std::move(guard), std::move(body)));
}

FormulaPtr bounded_forall(std::string hint, FinType ty, TermPtr seq,
                          FormulaPtr body) {
  auto guard = Formula::atom(
      kRelInSeq, {Term::var(0, hint), shift_term(std::move(seq), 1)});
  return Formula::forall(std::move(hint), std::move(ty),
                         Formula::implies(std::move(guard), std::move(body)));
}

TermPtr abstract_param(const TermPtr& t, const std::string& name,
                       int start_depth) {
  std::function<TermPtr(const TermPtr&, int)> rec =
      [&](const TermPtr& u, int dep) -> TermPtr {
    if (!u) return u;
    switch (u->kind) {
      case Term::Kind::Param:
        if (u->name == name) return Term::var(dep, name);
        return u;
      case Term::Kind::Lam:
        return Term::lam(u->name, u->type, rec(u->body, dep + 1));
      case Term::Kind::App:
        return Term::app(rec(u->fn, dep), rec(u->arg, dep));
      default:
        return u;
    }
  };
  return rec(t, start_depth);
}

FormulaPtr abstract_param(const FormulaPtr& f, const std::string& name,
                          int start_depth) {
  std::function<FormulaPtr(const FormulaPtr&, int)> rec =
      [&](const FormulaPtr& g, int depth) -> FormulaPtr {
    switch (g->kind) {
      case Formula::Kind::Atom: {
        std::vector<TermPtr> args;
        for (const auto& t : g->args)
          args.push_back(abstract_param(t, name, depth));
        return Formula::atom(g->rel, std::move(args));
      }
      case Formula::Kind::St:
        return Formula::st(abstract_param(g->term, name, depth));
      case Formula::Kind::InOmega:
        return Formula::in_omega(abstract_param(g->term, name, depth));
      case Formula::Kind::ApproxEq:
        return Formula::approx_eq(abstract_param(g->lhs, name, depth),
                                  abstract_param(g->rhs, name, depth),
                                  g->type);
      case Formula::Kind::Not:
        return Formula::negate(rec(g->a, depth));
      case Formula::Kind::And:
        return Formula::conj(rec(g->a, depth), rec(g->b, depth));
      case Formula::Kind::Or:
        return Formula::disj(rec(g->a, depth), rec(g->b, depth));
      case Formula::Kind::Implies:
        return Formula::implies(rec(g->a, depth), rec(g->b, depth));
      case Formula::Kind::ForAll:
        return Formula::forall(g->name, g->type, rec(g->a, depth + 1));
      case Formula::Kind::Exists:
        return Formula::exists(g->name, g->type, rec(g->a, depth + 1));
      case Formula::Kind::ForAllSt:
        return Formula::forall_st(g->name, g->type, rec(g->a, depth + 1));
      case Formula::Kind::ExistsSt:
        return Formula::exists_st(g->name, g->type, rec(g->a, depth + 1));
    }
    return g;
  };
  return rec(f, start_depth);
}

size_t count_param(const FormulaPtr& f, const std::string& name) {
  size_t n = 0;
  std::function<void(const TermPtr&)> ct = [&](const TermPtr& t) {
    if (!t) return;
    switch (t->kind) {
      case Term::Kind::Param:
        if (t->name == name) ++n;
        return;
      case Term::Kind::Lam:
        ct(t->body);
        return;
      case Term::Kind::App:
        ct(t->fn);
        ct(t->arg);
        return;
      default:
        return;
    }
  };
  std::function<void(const FormulaPtr&)> cf = [&](const FormulaPtr& g) {
    switch (g->kind) {
      case Formula::Kind::Atom:
        for (const auto& t : g->args) ct(t);
        return;
      case Formula::Kind::St:
      case Formula::Kind::InOmega:
        ct(g->term);
        return;
      case Formula::Kind::ApproxEq:
        ct(g->lhs);
        ct(g->rhs);
        return;
      case Formula::Kind::Not:
        cf(g->a);
        return;
      case Formula::Kind::And:
      case Formula::Kind::Or:
      case Formula::Kind::Implies:
        cf(g->a);
        cf(g->b);
        return;
      default:
        cf(g->a);
        return;
    }
  };
  cf(f);
  return n;
}

FormulaPtr uniquify_hints(const FormulaPtr& f, std::set<std::string>& used) {
  std::function<FormulaPtr(const FormulaPtr&)> rec =
      [&](const FormulaPtr& g) -> FormulaPtr {
    switch (g->kind) {
      case Formula::Kind::ForAll:
      case Formula::Kind::Exists:
      case Formula::Kind::ForAllSt:
      case Formula::Kind::ExistsSt: {
        std::string base = g->name.empty() ? "x" : g->name;
        std::string n = base;
        int k = 0;
        while (used.count(n)) n = base + std::to_string(++k);
        used.insert(n);
        FormulaPtr body = rec(g->a);
        switch (g->kind) {
          case Formula::Kind::ForAll:
            return Formula::forall(n, g->type, body);
          case Formula::Kind::Exists:
            return Formula::exists(n, g->type, body);
          case Formula::Kind::ForAllSt:
            return Formula::forall_st(n, g->type, body);
          default:
            return Formula::exists_st(n, g->type, body);
        }
      }
      case Formula::Kind::Not:
        return Formula::negate(rec(g->a));
      case Formula::Kind::And:
        return Formula::conj(rec(g->a), rec(g->b));
      case Formula::Kind::Or:
        return Formula::disj(rec(g->a), rec(g->b));
      case Formula::Kind::Implies:
        return Formula::implies(rec(g->a), rec(g->b));
      default:
        return g;
    }
  };
  return rec(f);
}

}  // namespace nsx
