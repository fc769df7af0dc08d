#include "nsx/rules.hpp"

#include <algorithm>
#include <functional>

#include "nsx/error.hpp"
#include "nsx/ground.hpp"
#include "nsx/monotone.hpp"
#include "nsx/parser.hpp"

namespace nsx {

std::string RuleCtx::fresh(const std::string& base) const {
  return base + "_" + std::to_string((*counter)++);
}

const RelTable& RuleCtx::rel_table() const {
  return rels ? *rels : RelTable::builtins();
}

namespace {

void record(StepRecord& rec, const std::string& rule, const FormulaPtr& src,
            const FormulaPtr& tgt) {
  rec.rule = rule;
  rec.source = src;
  rec.target = tgt;
}

void wit_note(StepRecord& rec, const std::string& var, const TermPtr& t) {
  rec.transformer.emplace_back(var, print_term(t));
}

// Wraps a term in lambdas over the given (hint, type) list, abstracting the
// named parameters.
TermPtr lambda_close(TermPtr t,
                     const std::vector<std::pair<std::string, FinType>>& xs) {
  for (size_t i = xs.size(); i-- > 0;) {
    t = Term::lam(xs[i].first, xs[i].second,
                  abstract_param(t, xs[i].first, 0));
  }
  return t;
}

TermPtr singleton_seq(const TermPtr& elem, const FinType& ty) {
  return Term::apps(Term::cnst("cons", const_type("cons", ty)),
                    {elem, Term::cnst("empty", const_type("empty", ty))});
}

}  // namespace

std::pair<std::vector<PrefixItem>, FormulaPtr> open_standard_prefix(
    const FormulaPtr& f) {
  std::vector<PrefixItem> prefix;
  FormulaPtr cur = f;
  while (true) {
    if (auto v = match_forall_st(cur)) {
      prefix.push_back({true, v->hint, v->type});
      cur = subst_formula(v->body, 0, Term::param(v->hint, v->type));
      continue;
    }
    if (auto v = match_exists_st(cur)) {
      prefix.push_back({false, v->hint, v->type});
      cur = subst_formula(v->body, 0, Term::param(v->hint, v->type));
      continue;
    }
    break;
  }
  return {std::move(prefix), std::move(cur)};
}

FormulaPtr close_standard_prefix(const std::vector<PrefixItem>& prefix,
                                 const FormulaPtr& body) {
  FormulaPtr f = body;
  for (size_t i = prefix.size(); i-- > 0;) {
    const auto& p = prefix[i];
    FormulaPtr inner = abstract_param(f, p.hint, 0);
    if (p.universal)
      f = Formula::forall(
          p.hint, p.type,
          Formula::implies(Formula::st(Term::var(0, p.hint)), inner));
    else
      f = Formula::exists(
          p.hint, p.type,
          Formula::conj(Formula::st(Term::var(0, p.hint)), inner));
  }
  return f;
}

namespace {

// ---------------------------------------------------------------------------
// Internal quantifier spine: plain universal binders and internal guard
// implications, opened into parameters.

struct SpineItem {
  bool binder;
  std::string hint;   // binder
  FinType type;       // binder
  FormulaPtr guard;   // guard implication (param form)
};

std::pair<std::vector<SpineItem>, FormulaPtr> open_internal_spine(
    FormulaPtr body) {
  std::vector<SpineItem> spine;
  while (true) {
    if (match_forall_st(body)) break;
    if (body->kind == Formula::Kind::ForAll) {
      SpineItem it;
      it.binder = true;
      it.hint = body->name;
      it.type = body->type;
      FormulaPtr inner =
          subst_formula(body->a, 0, Term::param(body->name, body->type));
      spine.push_back(std::move(it));
      body = inner;
      continue;
    }
    if (body->kind == Formula::Kind::Implies && is_internal(body->a)) {
      SpineItem it;
      it.binder = false;
      it.guard = body->a;
      spine.push_back(std::move(it));
      body = body->b;
      continue;
    }
    break;
  }
  return {std::move(spine), std::move(body)};
}

FormulaPtr close_internal_spine(const std::vector<SpineItem>& spine,
                                FormulaPtr body) {
  for (size_t i = spine.size(); i-- > 0;) {
    const auto& it = spine[i];
    if (it.binder)
      body = Formula::forall(it.hint, it.type,
                             abstract_param(body, it.hint, 0));
    else
      body = Formula::implies(it.guard, body);
  }
  return body;
}

// Leading relativized existentials of a formula, opened to parameters.
std::pair<std::vector<std::pair<std::string, FinType>>, FormulaPtr>
open_exists_st_block(FormulaPtr f) {
  std::vector<std::pair<std::string, FinType>> vars;
  while (auto v = match_exists_st(f)) {
    vars.emplace_back(v->hint, v->type);
    f = subst_formula(v->body, 0, Term::param(v->hint, v->type));
  }
  return {std::move(vars), std::move(f)};
}

// Sequence-bounded existential chain, opened to parameters.
struct BoundedItem {
  std::string hint;
  FinType type;
  TermPtr bound;  // param form
};

std::pair<std::vector<BoundedItem>, FormulaPtr> open_bounded_chain(
    FormulaPtr f) {
  std::vector<BoundedItem> items;
  while (auto v = match_bounded_exists(f)) {
    items.push_back({v->hint, v->type, v->bound});
    f = subst_formula(v->body, 0, Term::param(v->hint, v->type));
  }
  return {std::move(items), std::move(f)};
}

FormulaPtr close_bounded_chain(const std::vector<BoundedItem>& items,
                               FormulaPtr body) {
  for (size_t i = items.size(); i-- > 0;) {
    const auto& it = items[i];
    body = bounded_exists(it.hint, it.type, it.bound,
                          abstract_param(body, it.hint, 0));
  }
  return body;
}

// Swaps de Bruijn indices d and d+1.
FormulaPtr swap_top(const FormulaPtr& f, int d = 0) {
  std::function<TermPtr(const TermPtr&, int)> st =
      [&](const TermPtr& t, int depth) -> TermPtr {
    if (!t) return t;
    switch (t->kind) {
      case Term::Kind::Var:
        if (t->index == depth) return Term::var(depth + 1, t->name);
        if (t->index == depth + 1) return Term::var(depth, t->name);
        return t;
      case Term::Kind::Lam:
        return Term::lam(t->name, t->type, st(t->body, depth + 1));
      case Term::Kind::App:
        return Term::app(st(t->fn, depth), st(t->arg, depth));
      default:
        return t;
    }
  };
  std::function<FormulaPtr(const FormulaPtr&, int)> sf =
      [&](const FormulaPtr& g, int depth) -> FormulaPtr {
    switch (g->kind) {
      case Formula::Kind::Atom: {
        std::vector<TermPtr> args;
        for (const auto& t : g->args) args.push_back(st(t, depth));
        return Formula::atom(g->rel, std::move(args));
      }
      case Formula::Kind::St:
        return Formula::st(st(g->term, depth));
      case Formula::Kind::InOmega:
        return Formula::in_omega(st(g->term, depth));
      case Formula::Kind::ApproxEq:
        return Formula::approx_eq(st(g->lhs, depth), st(g->rhs, depth),
                                  g->type);
      case Formula::Kind::Not:
        return Formula::negate(sf(g->a, depth));
      case Formula::Kind::And:
        return Formula::conj(sf(g->a, depth), sf(g->b, depth));
      case Formula::Kind::Or:
        return Formula::disj(sf(g->a, depth), sf(g->b, depth));
      case Formula::Kind::Implies:
        return Formula::implies(sf(g->a, depth), sf(g->b, depth));
      case Formula::Kind::ForAll:
        return Formula::forall(g->name, g->type, sf(g->a, depth + 1));
      case Formula::Kind::Exists:
        return Formula::exists(g->name, g->type, sf(g->a, depth + 1));
      case Formula::Kind::ForAllSt:
        return Formula::forall_st(g->name, g->type, sf(g->a, depth + 1));
      case Formula::Kind::ExistsSt:
        return Formula::exists_st(g->name, g->type, sf(g->a, depth + 1));
    }
    return g;
  };
  return sf(f, d);
}

}  // namespace

// ---------------------------------------------------------------------------
// pull-st

namespace {

struct Puller {
  bool h_mode;
  int moves = 0;

  // Rebuilders for desugared relativized quantifiers.
  static FormulaPtr fa_st(const std::string& h, const FinType& ty,
                          const FormulaPtr& body) {
    return Formula::forall(h, ty,
                           Formula::implies(Formula::st(Term::var(0, h)), body));
  }
  static FormulaPtr ex_st(const std::string& h, const FinType& ty,
                          const FormulaPtr& body) {
    return Formula::exists(h, ty,
                           Formula::conj(Formula::st(Term::var(0, h)), body));
  }

  FormulaPtr pull(const FormulaPtr& f) {
    if (auto v = match_forall_st(f)) return fa_st(v->hint, v->type, pull(v->body));
    if (auto v = match_exists_st(f)) return ex_st(v->hint, v->type, pull(v->body));
    switch (f->kind) {
      case Formula::Kind::ForAll: {
        if (match_bounded_forall(f)) {
          // Bounded chains count as matrix structure; do not pull through.
          return f;
        }
        FormulaPtr body = pull(f->a);
        // (forall z)(forall-st y)B  =>  (forall-st y)(forall z)B
        if (auto v = match_forall_st(body)) {
          ++moves;
          return pull(fa_st(v->hint, v->type,
                            Formula::forall(f->name, f->type, swap_top(v->body))));
        }
        return Formula::forall(f->name, f->type, body);
      }
      case Formula::Kind::Exists: {
        if (match_bounded_exists(f)) return f;
        FormulaPtr body = pull(f->a);
        // (exists z)(exists-st y)B  =>  (exists-st y)(exists z)B
        if (auto v = match_exists_st(body)) {
          ++moves;
          return pull(ex_st(v->hint, v->type,
                            Formula::exists(f->name, f->type, swap_top(v->body))));
        }
        // (exists z)(forall-st y)B  =>  (forall-st y)(exists z)B
        if (auto v = match_forall_st(body)) {
          ++moves;
          return pull(fa_st(v->hint, v->type,
                            Formula::exists(f->name, f->type, swap_top(v->body))));
        }
        return Formula::exists(f->name, f->type, body);
      }
      case Formula::Kind::Implies: {
        FormulaPtr a = pull(f->a);
        FormulaPtr b = pull(f->b);
        // consequent: (A -> (forall-st y)B) => (forall-st y)(A -> B)
        if (auto v = match_forall_st(b)) {
          ++moves;
          return pull(fa_st(v->hint, v->type,
                            Formula::implies(shift_formula(a, 1), v->body)));
        }
        // consequent: (A -> (exists-st y)B) => (exists-st y)(A -> B), classical
        if (!h_mode) {
          if (auto v = match_exists_st(b)) {
            ++moves;
            return pull(ex_st(v->hint, v->type,
                              Formula::implies(shift_formula(a, 1), v->body)));
          }
        }
        // antecedent: ((exists-st y)A -> B) => (forall-st y)(A -> B)
        if (auto v = match_exists_st(a)) {
          ++moves;
          return pull(fa_st(v->hint, v->type,
                            Formula::implies(v->body, shift_formula(b, 1))));
        }
        // antecedent: ((forall-st y)A -> B) => (exists-st y)(A -> B), classical
        if (!h_mode) {
          if (auto v = match_forall_st(a)) {
            ++moves;
            return pull(ex_st(v->hint, v->type,
                              Formula::implies(v->body, shift_formula(b, 1))));
          }
        }
        return Formula::implies(a, b);
      }
      case Formula::Kind::And:
      case Formula::Kind::Or: {
        bool conj = f->kind == Formula::Kind::And;
        FormulaPtr a = pull(f->a);
        FormulaPtr b = pull(f->b);
        auto rebuild = [&](const FormulaPtr& x, const FormulaPtr& y) {
          return conj ? Formula::conj(x, y) : Formula::disj(x, y);
        };
        if (auto v = match_forall_st(a)) {
          ++moves;
          return pull(fa_st(v->hint, v->type,
                            rebuild(v->body, shift_formula(b, 1))));
        }
        if (auto v = match_forall_st(b)) {
          ++moves;
          return pull(fa_st(v->hint, v->type,
                            rebuild(shift_formula(a, 1), v->body)));
        }
        if (auto v = match_exists_st(a)) {
          ++moves;
          return pull(ex_st(v->hint, v->type,
                            rebuild(v->body, shift_formula(b, 1))));
        }
        if (auto v = match_exists_st(b)) {
          ++moves;
          return pull(ex_st(v->hint, v->type,
                            rebuild(shift_formula(a, 1), v->body)));
        }
        return rebuild(a, b);
      }
      case Formula::Kind::Not: {
        FormulaPtr a = pull(f->a);
        if (auto v = match_exists_st(a)) {
          ++moves;
          return pull(fa_st(v->hint, v->type, Formula::negate(v->body)));
        }
        if (!h_mode) {
          if (auto v = match_forall_st(a)) {
            ++moves;
            return pull(ex_st(v->hint, v->type, Formula::negate(v->body)));
          }
        }
        return Formula::negate(a);
      }
      default:
        return f;
    }
  }
};

}  // namespace

FormulaPtr rule_pull_st(const FormulaPtr& f, RuleCtx& ctx, StepRecord& rec) {
  Puller p{ctx.h_mode};
  FormulaPtr out = p.pull(f);
  record(rec, "pull-st", f, out);
  rec.side_conditions.push_back(
      (ctx.h_mode ? std::string("intuitionistic moves only; ")
                  : std::string("classical moves; ")) +
      std::to_string(p.moves) + " hoists");
  return out;
}

// ---------------------------------------------------------------------------
// resolve-approx

FormulaPtr rule_resolve_approx(const FormulaPtr& f, const std::string& rel,
                               const std::vector<std::string>& names,
                               RuleCtx& ctx, StepRecord& rec) {
  int count = 0;
  size_t name_i = 0;
  std::function<FormulaPtr(const FormulaPtr&)> go =
      [&](const FormulaPtr& g) -> FormulaPtr {
    switch (g->kind) {
      case Formula::Kind::ApproxEq: {
        ++count;
        if (g->type == FinType::nat())
          return Formula::atom(kRelEq0, {g->lhs, g->rhs});
        if (g->type == type_real() || g->type.is_seq()) {
          std::string n = name_i < names.size() ? names[name_i++]
                                                : ctx.fresh("n");
          std::string use_rel = rel.empty() ? kRelCauchyClose : rel;
          if (!rel.empty()) {
            const RelSig* sig = ctx.rel_table().find(rel);
            if (!sig || sig->argtypes.size() != 3 ||
                sig->argtypes[2] != FinType::nat())
              throw UnsupportedType("distance relation '" + rel +
                                    "' must take (x, y, nat)");
          }
          FormulaPtr atom = Formula::atom(
              use_rel, {shift_term(g->lhs, 1), shift_term(g->rhs, 1),
                        Term::var(0, n)});
          return Formula::forall(
              n, FinType::nat(),
              Formula::implies(Formula::st(Term::var(0, n)), atom));
        }
        // Higher types: the extensional unfolding (rank <= 2 enforced by
        // the desugarer).
        return desugar(g);
      }
      case Formula::Kind::Atom:
      case Formula::Kind::St:
      case Formula::Kind::InOmega:
        return g;
      case Formula::Kind::Not:
        return Formula::negate(go(g->a));
      case Formula::Kind::And: {
        FormulaPtr a = go(g->a);  // left-to-right: name assignment order
        FormulaPtr b = go(g->b);
        return Formula::conj(a, b);
      }
      case Formula::Kind::Or: {
        FormulaPtr a = go(g->a);
        FormulaPtr b = go(g->b);
        return Formula::disj(a, b);
      }
      case Formula::Kind::Implies: {
        FormulaPtr a = go(g->a);
        FormulaPtr b = go(g->b);
        return Formula::implies(a, b);
      }
      case Formula::Kind::ForAll:
        return Formula::forall(g->name, g->type, go(g->a));
      case Formula::Kind::Exists:
        return Formula::exists(g->name, g->type, go(g->a));
      case Formula::Kind::ForAllSt:
        return Formula::forall_st(g->name, g->type, go(g->a));
      case Formula::Kind::ExistsSt:
        return Formula::exists_st(g->name, g->type, go(g->a));
    }
    return g;
  };
  FormulaPtr out = go(f);
  record(rec, "resolve-approx", f, out);
  rec.side_conditions.push_back(std::to_string(count) +
                                " approximate equalities resolved");
  return out;
}

// ---------------------------------------------------------------------------
// idealize-contra and ncr

namespace {

FormulaPtr idealize_like(const FormulaPtr& f, bool require_internal,
                         const char* name, RuleCtx& ctx, StepRecord& rec) {
  auto [prefix, body0] = open_standard_prefix(f);
  auto [spine, core] = open_internal_spine(body0);
  if (spine.empty())
    throw PatternMismatch(std::string(name) +
                          ": no internal universal quantifier to idealize past");
  auto [exvars, inner] = open_exists_st_block(core);
  if (exvars.empty())
    throw PatternMismatch(std::string(name) +
                          ": no standard existential behind the internal prefix");
  if (require_internal && !is_internal(inner))
    throw NonInternalMatrix(std::string(name) + ": matrix " +
                            print_formula(inner));
  // New sequence variables, one per existential (componentwise
  // Herbrandization of the tuple).
  std::vector<PrefixItem> newpref = prefix;
  std::vector<BoundedItem> bitems;
  for (const auto& [yn, yt] : exvars) {
    std::string w = ctx.fresh(yn + "s");
    newpref.push_back({false, w, FinType::seq(yt)});
    bitems.push_back({yn, yt, Term::param(w, FinType::seq(yt))});
    if (ctx.witnesses) {
      auto it = ctx.witnesses->find(yn);
      if (it != ctx.witnesses->end()) {
        // A single standard witness becomes the singleton candidate list.
        std::set<std::string> used;
        collect_params(it->second, used);
        for (const auto& s : spine)
          if (s.binder && used.count(s.hint))
            throw ScriptError(std::string(name) + ": witness for " + yn +
                              " depends on internal variable " + s.hint);
        TermPtr w_term = singleton_seq(it->second, yt);
        (*ctx.witnesses)[w] = w_term;
        ctx.witnesses->erase(yn);
        wit_note(rec, w, w_term);
      }
    }
  }
  FormulaPtr rebuilt =
      close_standard_prefix(newpref, close_internal_spine(spine, close_bounded_chain(bitems, inner)));
  record(rec, name, f, rebuilt);
  rec.side_conditions.push_back(require_internal ? "matrix internal"
                                                 : "matrix unrestricted");
  rec.path = "under " + std::to_string(prefix.size()) +
             " standard quantifiers";
  return rebuilt;
}

}  // namespace

FormulaPtr rule_idealize_contra(const FormulaPtr& f, RuleCtx& ctx,
                                StepRecord& rec) {
  if (ctx.h_mode)
    throw ScriptError(
        "idealize-contra uses the classical contraposition of idealisation; "
        "use ncr in H mode");
  return idealize_like(f, true, "idealize-contra", ctx, rec);
}

FormulaPtr rule_ncr(const FormulaPtr& f, RuleCtx& ctx, StepRecord& rec) {
  return idealize_like(f, false, "ncr", ctx, rec);
}

// ---------------------------------------------------------------------------
// monotone-max / bound-max

namespace {

struct CollapseTarget {
  size_t bounded_index;       // position in the bounded chain
  std::string head;           // prefix variable heading the bound
  std::vector<TermPtr> args;  // application arguments (param form)
};

// Locates the collapse targets among the bounded existentials.
std::vector<CollapseTarget> find_targets(
    const std::vector<BoundedItem>& bitems,
    const std::vector<PrefixItem>& prefix,
    const std::vector<std::string>& vars, const char* rule) {
  std::vector<CollapseTarget> out;
  for (const auto& v : vars) {
    bool found = false;
    for (size_t i = 0; i < bitems.size(); ++i) {
      if (bitems[i].hint != v) continue;
      if (bitems[i].type != FinType::nat())
        throw PatternMismatch(std::string(rule) + ": variable " + v +
                              " is not of type nat");
      // Unwind the bound's application spine.
      TermPtr head = bitems[i].bound;
      std::vector<TermPtr> args;
      while (head->kind == Term::Kind::App) {
        args.push_back(head->arg);
        head = head->fn;
      }
      std::reverse(args.begin(), args.end());
      if (head->kind != Term::Kind::Param)
        throw PatternMismatch(std::string(rule) + ": bound of " + v +
                              " is not headed by a prefix variable");
      bool in_prefix = false;
      for (const auto& p : prefix)
        if (!p.universal && p.hint == head->name) in_prefix = true;
      if (!in_prefix)
        throw PatternMismatch(std::string(rule) + ": bound head " +
                              head->name +
                              " is not a standard existential of the prefix");
      out.push_back({i, head->name, std::move(args)});
      found = true;
      break;
    }
    if (!found)
      throw PatternMismatch(std::string(rule) + ": no bounded existential '" +
                            v + "'");
  }
  return out;
}

FinType seq_fun_to_nat_fun(const FinType& t) {
  if (t.is_seq()) return FinType::nat();
  if (t.is_arrow()) return FinType::arrow(t.dom(), seq_fun_to_nat_fun(t.cod()));
  throw PatternMismatch("collapse head is not sequence-valued: " + t.to_string());
}

FinType prefix_type(const std::vector<PrefixItem>& prefix,
                    const std::string& hint) {
  for (const auto& p : prefix)
    if (p.hint == hint) return p.type;
  throw PatternMismatch("unknown prefix variable " + hint);
}

}  // namespace

FormulaPtr rule_monotone_max(const FormulaPtr& f,
                             const std::vector<std::string>& vars,
                             const std::string& out_name, bool sampled,
                             RuleCtx& ctx, StepRecord& rec) {
  if (vars.empty()) throw ScriptError("monotone-max: no variables given");
  auto [prefix, body0] = open_standard_prefix(f);
  auto [spine, core] = open_internal_spine(body0);
  auto [bitems, inner] = open_bounded_chain(core);
  auto targets = find_targets(bitems, prefix, vars, "monotone-max");

  // Certificate: the matrix (with the remaining bounded chain re-closed)
  // must be upward monotone in every collapsed position.
  for (size_t t = 0; t < targets.size(); ++t) {
    const std::string& v = vars[t];
    FormulaPtr residual = inner;
    for (size_t i = bitems.size(); i-- > 0;) {
      bool is_target = false;
      for (const auto& tg : targets)
        if (tg.bounded_index == i) is_target = true;
      if (!is_target)
        residual = bounded_exists(bitems[i].hint, bitems[i].type,
                                  bitems[i].bound,
                                  abstract_param(residual, bitems[i].hint, 0));
    }
    FormulaPtr closed = abstract_param(residual, v, 0);
    if (!monotone_up(closed, 0, ctx.rel_table())) {
      if (!sampled)
        throw MonotonicityNotEstablished(
            "monotone-max: matrix not syntactically monotone in " + v);
      // Sampled fallback: flags, does not prove.
      GroundModel gm;
      gm.nat_max = 6;
      gm.seq_max = 3;
      bool counterexample = false;
      try {
        for (long long a = 0; a + 1 <= gm.nat_max && !counterexample; ++a) {
          std::vector<ValuePtr> env{Value::nat_v(a)};
          std::vector<ValuePtr> env2{Value::nat_v(a + 1)};
          FormulaPtr probe = closed;
          if (eval_ground(probe, gm, env) && !eval_ground(probe, gm, env2))
            counterexample = true;
        }
      } catch (const Error&) {
        throw MonotonicityNotEstablished(
            "monotone-max: matrix in " + v +
            " is not ground-checkable; no certificate");
      }
      if (counterexample)
        throw MonotonicityNotEstablished(
            "monotone-max: sampled check found a violation in " + v);
      rec.side_conditions.push_back("monotonicity of " + v +
                                    " sampled only (not proved)");
    } else {
      rec.side_conditions.push_back("monotone-up certificate for " + v);
    }
  }

  // All collapsed heads are merged into a single maximum variable.
  const std::string& primary = vars[0];
  const CollapseTarget& tg0 = targets[0];
  FinType head_ty = prefix_type(prefix, tg0.head);
  FinType new_ty = seq_fun_to_nat_fun(head_ty);
  for (const auto& tg : targets) {
    if (tg.args.size() != tg0.args.size())
      throw PatternMismatch(
          "monotone-max: merged bounds take different argument lists");
  }

  // New prefix: the primary head's position holds the collapsed variable;
  // other merged heads are dropped.
  std::vector<PrefixItem> newpref;
  std::set<std::string> drop;
  for (size_t t = 1; t < targets.size(); ++t) drop.insert(targets[t].head);
  std::string collapsed = out_name.empty() ? ctx.fresh(primary) : out_name;
  for (const auto& p : prefix) {
    if (p.hint == tg0.head) {
      newpref.push_back({false, collapsed, new_ty});
    } else if (!drop.count(p.hint)) {
      newpref.push_back(p);
    }
  }

  // Matrix: target variables replaced by the collapsed bound applied to the
  // same arguments; non-target bounded entries kept.
  FormulaPtr matrix = inner;
  for (size_t t = 0; t < targets.size(); ++t) {
    TermPtr repl = Term::param(collapsed, new_ty);
    for (const auto& a : targets[t].args) repl = Term::app(repl, a);
    matrix = subst_formula_param(matrix, vars[t], repl);
  }
  std::vector<BoundedItem> rest;
  for (size_t i = 0; i < bitems.size(); ++i) {
    bool is_target = false;
    for (const auto& tg : targets)
      if (tg.bounded_index == i) is_target = true;
    if (!is_target) rest.push_back(bitems[i]);
  }
  FormulaPtr out = close_standard_prefix(
      newpref, close_internal_spine(spine, close_bounded_chain(rest, matrix)));

  // Witness: the maximum of the concatenated candidate lists.
  if (ctx.witnesses) {
    bool have_all = true;
    for (const auto& tg : targets)
      if (!ctx.witnesses->count(tg.head)) have_all = false;
    if (have_all) {
      std::vector<std::pair<std::string, FinType>> lams;
      auto argtys = head_ty.argument_types();
      std::vector<TermPtr> argvars;
      for (size_t i = 0; i < tg0.args.size(); ++i) {
        std::string an = ctx.fresh("a");
        lams.emplace_back(an, argtys[i]);
        argvars.push_back(Term::param(an, argtys[i]));
      }
      TermPtr acc;
      for (const auto& tg : targets) {
        TermPtr w = Term::apps((*ctx.witnesses)[tg.head], argvars);
        acc = acc ? Term::apps(Term::cnst("append",
                                          const_type("append", FinType::nat())),
                               {acc, w})
                  : w;
      }
      TermPtr wit = lambda_close(t_maxnat(acc), lams);
      for (const auto& tg : targets) ctx.witnesses->erase(tg.head);
      (*ctx.witnesses)[collapsed] = wit;
      wit_note(rec, collapsed, wit);
    } else {
      for (const auto& tg : targets) ctx.witnesses->erase(tg.head);
    }
  }
  record(rec, "monotone-max", f, out);
  return out;
}

FormulaPtr rule_bound_max(const FormulaPtr& f,
                          const std::vector<std::string>& vars,
                          const std::string& out_name, RuleCtx& ctx,
                          StepRecord& rec) {
  if (vars.empty()) throw ScriptError("bound-max: no variables given");
  auto [prefix, body0] = open_standard_prefix(f);
  auto [spine, core] = open_internal_spine(body0);
  auto [bitems, inner] = open_bounded_chain(core);
  auto targets = find_targets(bitems, prefix, vars, "bound-max");

  const CollapseTarget& tg0 = targets[0];
  FinType head_ty = prefix_type(prefix, tg0.head);
  FinType new_ty = seq_fun_to_nat_fun(head_ty);
  for (const auto& tg : targets)
    if (tg.args.size() != tg0.args.size())
      throw PatternMismatch(
          "bound-max: merged bounds take different argument lists");

  std::vector<PrefixItem> newpref;
  std::set<std::string> drop;
  for (size_t t = 1; t < targets.size(); ++t) drop.insert(targets[t].head);
  std::string gname = out_name.empty() ? ctx.fresh(tg0.head + "b") : out_name;
  for (const auto& p : prefix) {
    if (p.hint == tg0.head)
      newpref.push_back({false, gname, new_ty});
    else if (!drop.count(p.hint))
      newpref.push_back(p);
  }

  // Rebuild the chain: targets become <=-bounded plain existentials.
  FormulaPtr matrix = inner;
  for (size_t i = bitems.size(); i-- > 0;) {
    bool is_target = false;
    const CollapseTarget* tg = nullptr;
    for (const auto& t : targets)
      if (t.bounded_index == i) {
        is_target = true;
        tg = &t;
      }
    if (is_target) {
      TermPtr bound = Term::param(gname, new_ty);
      for (const auto& a : tg->args) bound = Term::app(bound, a);
      FormulaPtr guard = Formula::atom(
          kRelLe0, {Term::var(0, bitems[i].hint), shift_term(bound, 1)});
      matrix = Formula::exists(
          bitems[i].hint, FinType::nat(),
          Formula::conj(guard, abstract_param(matrix, bitems[i].hint, 0)));
    } else {
      matrix = bounded_exists(bitems[i].hint, bitems[i].type, bitems[i].bound,
                              abstract_param(matrix, bitems[i].hint, 0));
    }
  }
  FormulaPtr out = close_standard_prefix(
      newpref, close_internal_spine(spine, matrix));

  if (ctx.witnesses) {
    bool have_all = true;
    for (const auto& tg : targets)
      if (!ctx.witnesses->count(tg.head)) have_all = false;
    if (have_all) {
      std::vector<std::pair<std::string, FinType>> lams;
      auto argtys = head_ty.argument_types();
      std::vector<TermPtr> argvars;
      for (size_t i = 0; i < tg0.args.size(); ++i) {
        std::string an = ctx.fresh("a");
        lams.emplace_back(an, argtys[i]);
        argvars.push_back(Term::param(an, argtys[i]));
      }
      TermPtr acc;
      for (const auto& tg : targets) {
        TermPtr w = Term::apps((*ctx.witnesses)[tg.head], argvars);
        acc = acc ? Term::apps(Term::cnst("append",
                                          const_type("append", FinType::nat())),
                               {acc, w})
                  : w;
      }
      TermPtr wit = lambda_close(t_maxnat(acc), lams);
      for (const auto& tg : targets) ctx.witnesses->erase(tg.head);
      (*ctx.witnesses)[gname] = wit;
      wit_note(rec, gname, wit);
    } else {
      for (const auto& tg : targets) ctx.witnesses->erase(tg.head);
    }
  }
  record(rec, "bound-max", f, out);
  rec.side_conditions.push_back("bounded weakening (no certificate needed)");
  return out;
}

// ---------------------------------------------------------------------------
// hac-int

FormulaPtr rule_hac_int(const FormulaPtr& f,
                        const std::vector<std::string>& names, RuleCtx& ctx,
                        StepRecord& rec) {
  auto [prefix, body] = open_standard_prefix(f);
  if (!is_internal(body))
    throw PatternMismatch("hac-int: matrix is not internal: " +
                          print_formula(body));
  // Split the prefix: outer context, then a universal block, then the
  // trailing existential block this rule consumes.
  size_t end = prefix.size();
  size_t ex_start = end;
  while (ex_start > 0 && !prefix[ex_start - 1].universal) --ex_start;
  if (ex_start == end)
    throw PatternMismatch("hac-int: no trailing standard existentials");
  size_t fa_start = ex_start;
  while (fa_start > 0 && prefix[fa_start - 1].universal) --fa_start;

  std::vector<PrefixItem> outer(prefix.begin(), prefix.begin() + fa_start);
  std::vector<PrefixItem> fa(prefix.begin() + fa_start,
                             prefix.begin() + ex_start);
  std::vector<PrefixItem> ex(prefix.begin() + ex_start, prefix.end());

  std::vector<std::pair<std::string, FinType>> xs;
  for (const auto& p : fa) xs.emplace_back(p.hint, p.type);

  std::vector<PrefixItem> newpref = outer;
  std::vector<BoundedItem> bitems;
  size_t name_i = 0;
  for (const auto& e : ex) {
    FinType fty = FinType::seq(e.type);
    for (size_t i = xs.size(); i-- > 0;)
      fty = FinType::arrow(xs[i].second, fty);
    std::string F = name_i < names.size() ? names[name_i++]
                                          : ctx.fresh(e.hint + "F");
    newpref.push_back({false, F, fty});
    TermPtr bound = Term::param(F, fty);
    for (const auto& [xn, xt] : xs) bound = Term::app(bound, Term::param(xn, xt));
    bitems.push_back({e.hint, e.type, bound});
    if (ctx.witnesses) {
      auto it = ctx.witnesses->find(e.hint);
      if (it != ctx.witnesses->end()) {
        TermPtr wit = lambda_close(singleton_seq(it->second, e.type), xs);
        ctx.witnesses->erase(e.hint);
        (*ctx.witnesses)[F] = wit;
        wit_note(rec, F, wit);
      }
    }
  }
  for (const auto& p : fa) newpref.push_back(p);
  FormulaPtr out =
      close_standard_prefix(newpref, close_bounded_chain(bitems, body));
  record(rec, "hac-int", f, out);
  rec.side_conditions.push_back("matrix internal");
  return out;
}

// ---------------------------------------------------------------------------
// hgmp-st / hip-forallst

FormulaPtr rule_hgmp_st(const FormulaPtr& f, RuleCtx& ctx, StepRecord& rec) {
  auto [prefix, body] = open_standard_prefix(f);
  if (body->kind != Formula::Kind::Implies)
    throw PatternMismatch("hgmp-st: body is not an implication");
  // Collect the relativized universal block of the antecedent.
  std::vector<std::pair<std::string, FinType>> xs;
  FormulaPtr ant = body->a;
  while (auto v = match_forall_st(ant)) {
    xs.emplace_back(v->hint, v->type);
    ant = subst_formula(v->body, 0, Term::param(v->hint, v->type));
  }
  if (xs.empty())
    throw PatternMismatch(
        "hgmp-st: antecedent has no relativized universal quantifier");
  if (!is_internal(ant) || !is_internal(body->b))
    throw NonInternalParts("hgmp-st: phi and psi must be internal");

  std::vector<PrefixItem> newpref = prefix;
  FormulaPtr guarded = ant;
  for (size_t i = xs.size(); i-- > 0;) {
    const auto& [xn, xt] = xs[i];
    std::string xsq = ctx.fresh(xn + "s");
    newpref.push_back({false, xsq, FinType::seq(xt)});
    guarded = bounded_forall(xn, xt, Term::param(xsq, FinType::seq(xt)),
                             abstract_param(guarded, xn, 0));
  }
  FormulaPtr out = close_standard_prefix(
      newpref, Formula::implies(guarded, body->b));
  record(rec, "hgmp-st", f, out);
  rec.side_conditions.push_back("antecedent matrix and conclusion internal");
  return out;
}

FormulaPtr rule_hip_forallst(const FormulaPtr& f, RuleCtx& ctx,
                             StepRecord& rec) {
  auto [prefix, body] = open_standard_prefix(f);
  if (body->kind != Formula::Kind::Implies)
    throw PatternMismatch("hip-forallst: body is not an implication");
  FormulaPtr ant = body->a;
  {
    FormulaPtr scan = ant;
    bool saw = false;
    while (auto v = match_forall_st(scan)) {
      saw = true;
      scan = v->body;
    }
    if (!saw || !is_internal(scan))
      throw PatternMismatch(
          "hip-forallst: premise must be a relativized universal over an "
          "internal matrix");
  }
  auto [ys, concl] = open_exists_st_block(body->b);
  if (ys.empty())
    throw PatternMismatch(
        "hip-forallst: conclusion has no relativized existential");

  std::vector<PrefixItem> newpref = prefix;
  std::vector<BoundedItem> bitems;
  for (const auto& [yn, yt] : ys) {
    std::string ysq = ctx.fresh(yn + "s");
    newpref.push_back({false, ysq, FinType::seq(yt)});
    bitems.push_back({yn, yt, Term::param(ysq, FinType::seq(yt))});
    if (ctx.witnesses) {
      auto it = ctx.witnesses->find(yn);
      if (it != ctx.witnesses->end()) {
        TermPtr wit = singleton_seq(it->second, yt);
        ctx.witnesses->erase(yn);
        (*ctx.witnesses)[ysq] = wit;
        wit_note(rec, ysq, wit);
      }
    }
  }
  FormulaPtr out = close_standard_prefix(
      newpref, Formula::implies(ant, close_bounded_chain(bitems, concl)));
  record(rec, "hip-forallst", f, out);
  rec.side_conditions.push_back("premise internal relativized universal");
  return out;
}

// ---------------------------------------------------------------------------
// overspill / underspill

FormulaPtr rule_overspill(const FormulaPtr& f, RuleCtx& ctx, StepRecord& rec) {
  auto [prefix, body] = open_standard_prefix(f);
  // The innermost relativized universal of the prefix is the one spilled.
  if (prefix.empty() || !prefix.back().universal)
    throw PatternMismatch("overspill: no leading relativized universal");
  if (!is_internal(body))
    throw NonInternalMatrix("overspill: matrix " + print_formula(body));
  PrefixItem x = prefix.back();
  prefix.pop_back();
  std::string y = ctx.fresh(x.hint + "inf");
  FormulaPtr spilled = Formula::exists(
      y, x.type,
      Formula::conj(Formula::negate(Formula::st(Term::var(0, y))),
                    abstract_param(subst_formula_param(
                                       body, x.hint, Term::param(y, x.type)),
                                   y, 0)));
  if (ctx.taints) ctx.taints->insert(y);
  FormulaPtr out = close_standard_prefix(prefix, spilled);
  record(rec, "overspill", f, out);
  rec.side_conditions.push_back("matrix internal; witness '" + y +
                                "' is nonstandard (tainted)");
  return out;
}

FormulaPtr rule_underspill(const FormulaPtr& f, const std::string& out_name,
                           RuleCtx& ctx, StepRecord& rec) {
  auto [prefix, body] = open_standard_prefix(f);
  // (forall N)(N in Omega -> phi(N))  ~>  (exists-st n)(forall N >= n)phi(N)
  if (body->kind != Formula::Kind::ForAll || body->type != FinType::nat())
    throw PatternMismatch("underspill: expected a universal over nat");
  FormulaPtr inner = body->a;
  if (inner->kind != Formula::Kind::Implies ||
      inner->a->kind != Formula::Kind::Not ||
      inner->a->a->kind != Formula::Kind::St)
    throw PatternMismatch("underspill: expected an in-omega guard");
  const TermPtr& g = inner->a->a->term;
  if (g->kind != Term::Kind::Var || g->index != 0)
    throw PatternMismatch("underspill: guard does not bind the quantifier");
  FormulaPtr phi = inner->b;
  if (!is_internal(phi))
    throw NonInternalMatrix("underspill: matrix must be internal");
  // Restricted to decidable atoms at type 0.
  std::function<void(const FormulaPtr&)> check = [&](const FormulaPtr& h) {
    switch (h->kind) {
      case Formula::Kind::Atom:
        if (h->rel != kRelEq0 && h->rel != kRelLe0 && h->rel != kRelLt0 &&
            h->rel != kRelInSeq)
          throw UnsupportedType(
              "underspill: matrix uses a non-decidable atom '" + h->rel + "'");
        return;
      case Formula::Kind::Not:
        check(h->a);
        return;
      case Formula::Kind::And:
      case Formula::Kind::Or:
      case Formula::Kind::Implies:
        check(h->a);
        check(h->b);
        return;
      case Formula::Kind::ForAll:
      case Formula::Kind::Exists:
        check(h->a);
        return;
      default:
        return;
    }
  };
  check(phi);
  std::string n = out_name.empty() ? ctx.fresh(body->name + "0") : out_name;
  std::vector<PrefixItem> newpref = prefix;
  newpref.push_back({false, n, FinType::nat()});
  FormulaPtr guard = Formula::atom(
      kRelLe0,
      {Term::param(n, FinType::nat()), Term::var(0, body->name)});
  FormulaPtr out = close_standard_prefix(
      newpref,
      Formula::forall(body->name, FinType::nat(),
                      Formula::implies(guard, phi)));
  record(rec, "underspill", f, out);
  rec.side_conditions.push_back(
      "type-0 matrix with decidable atoms (least threshold is standard)");
  return out;
}

FormulaPtr rule_omega_unfold(const FormulaPtr& f,
                             const std::vector<std::string>& names,
                             RuleCtx& ctx, StepRecord& rec) {
  int count = 0;
  size_t name_i = 0;
  std::function<FormulaPtr(const FormulaPtr&)> go =
      [&](const FormulaPtr& g) -> FormulaPtr {
    if (g->kind == Formula::Kind::Implies &&
        g->a->kind == Formula::Kind::Not &&
        g->a->a->kind == Formula::Kind::St) {
      ++count;
      const TermPtr& t = g->a->a->term;
      std::string m = name_i < names.size() ? names[name_i++] : ctx.fresh("m");
      FormulaPtr guard = Formula::forall(
          m, FinType::nat(),
          Formula::implies(
              Formula::st(Term::var(0, m)),
              Formula::atom(kRelLe0, {Term::var(0, m), shift_term(t, 1)})));
      return Formula::implies(guard, go(g->b));
    }
    switch (g->kind) {
      case Formula::Kind::Not:
        return Formula::negate(go(g->a));
      case Formula::Kind::And:
        return Formula::conj(go(g->a), go(g->b));
      case Formula::Kind::Or:
        return Formula::disj(go(g->a), go(g->b));
      case Formula::Kind::Implies:
        return Formula::implies(go(g->a), go(g->b));
      case Formula::Kind::ForAll:
        return Formula::forall(g->name, g->type, go(g->a));
      case Formula::Kind::Exists:
        return Formula::exists(g->name, g->type, go(g->a));
      default:
        return g;
    }
  };
  FormulaPtr out = go(f);
  record(rec, "omega-unfold", f, out);
  rec.side_conditions.push_back(std::to_string(count) +
                                " in-omega guards unfolded");
  return out;
}

// ---------------------------------------------------------------------------
// omega-nf

FormulaPtr rule_omega_nf(const FormulaPtr& f,
                         const std::vector<std::string>& names, RuleCtx& ctx,
                         StepRecord& rec) {
  auto [prefix, body] = open_standard_prefix(f);
  if (body->kind != Formula::Kind::ForAll || body->type != FinType::nat())
    throw PatternMismatch("omega-nf: expected (forall N in Omega)(...)");
  FormulaPtr inner = body->a;
  if (inner->kind != Formula::Kind::Implies ||
      inner->a->kind != Formula::Kind::Not ||
      inner->a->a->kind != Formula::Kind::St ||
      inner->a->a->term->kind != Term::Kind::Var ||
      inner->a->a->term->index != 0)
    throw PatternMismatch("omega-nf: expected an in-omega guard");
  std::string N = body->name;
  FormulaPtr rest = subst_formula(inner->b, 0, Term::param(N, FinType::nat()));

  // Inner shape: (forall-st x)...(internal spine)(exists-st y)...(matrix).
  auto [pref2, rest2] = open_standard_prefix(rest);
  size_t split = 0;
  while (split < pref2.size() && pref2[split].universal) ++split;
  std::vector<PrefixItem> xs(pref2.begin(), pref2.begin() + split);
  std::vector<PrefixItem> trailing(pref2.begin() + split, pref2.end());
  for (const auto& p : trailing)
    if (p.universal)
      throw PatternMismatch("omega-nf: inner formula is not a normal form");
  FormulaPtr inner2 = close_standard_prefix(trailing, rest2);
  auto [spine, core] = open_internal_spine(inner2);
  auto [ys, matrix0] = open_exists_st_block(core);
  if (ys.empty())
    throw PatternMismatch("omega-nf: no standard existential inside");
  if (!is_internal(matrix0))
    throw PatternMismatch("omega-nf: inner matrix is not internal");

  // (forall-st x)(exists-st l, v)(forall N)[l <= N -> spine (exists y in v) phi]
  std::vector<PrefixItem> newpref = prefix;
  for (const auto& x : xs) newpref.push_back(x);
  size_t name_i = 0;
  std::string l = name_i < names.size() ? names[name_i++] : ctx.fresh("l");
  newpref.push_back({false, l, FinType::nat()});
  std::vector<BoundedItem> bitems;
  for (const auto& [yn, yt] : ys) {
    std::string v = name_i < names.size() ? names[name_i++]
                                          : ctx.fresh(yn + "s");
    newpref.push_back({false, v, FinType::seq(yt)});
    bitems.push_back({yn, yt, Term::param(v, FinType::seq(yt))});
  }
  FormulaPtr matrix =
      close_internal_spine(spine, close_bounded_chain(bitems, matrix0));
  FormulaPtr guard = Formula::atom(
      kRelLe0, {Term::param(l, FinType::nat()), Term::param(N, FinType::nat())});
  FormulaPtr quantN =
      Formula::forall(N, FinType::nat(),
                      abstract_param(Formula::implies(guard, matrix), N, 0));
  FormulaPtr out = close_standard_prefix(newpref, quantN);
  record(rec, "omega-nf", f, out);
  rec.side_conditions.push_back(
      "threshold variable " + l +
      " takes the maximum of the index entries; candidate lists keep the "
      "witness entries");
  return out;
}

// ---------------------------------------------------------------------------
// omega-ca

FormulaPtr rule_omega_ca(const FormulaPtr& f, const TermPtr& fn,
                         const TermPtr& stable_bound, RuleCtx& ctx,
                         StepRecord& rec) {
  // Premise: (forall-st x)(forall N, M)(N, M in Omega -> F(x,N) = F(x,M)).
  auto [prefix, body] = open_standard_prefix(f);
  if (prefix.empty() || !prefix.back().universal)
    throw PremiseMismatch("omega-ca: premise lacks the standard universal");
  PrefixItem xq = prefix.back();
  auto [spine, core] = open_internal_spine(body);
  std::vector<std::pair<std::string, FinType>> ns;
  for (const auto& s : spine)
    if (s.binder) ns.emplace_back(s.hint, s.type);
  if (ns.size() != 2 || ns[0].second != FinType::nat() ||
      ns[1].second != FinType::nat())
    throw PremiseMismatch("omega-ca: premise must quantify two naturals");
  // The guards must make both nonstandard; the core must equate the two
  // applications of F.
  bool guard_ok = false;
  for (const auto& s : spine) {
    if (s.binder) continue;
    const FormulaPtr& g = s.guard;
    if (g->kind == Formula::Kind::And && g->a->kind == Formula::Kind::Not &&
        g->b->kind == Formula::Kind::Not)
      guard_ok = true;
  }
  if (core->kind == Formula::Kind::Implies && core->a->kind == Formula::Kind::And)
    guard_ok = true;  // guard folded into the core implication
  FormulaPtr eq = core;
  if (eq->kind == Formula::Kind::Implies) eq = eq->b;
  if (!guard_ok || eq->kind != Formula::Kind::Atom || eq->rel != kRelEq0)
    throw PremiseMismatch(
        "omega-ca: premise is not an Omega-invariance statement");
  TermPtr xp = Term::param(xq.hint, xq.type);
  TermPtr n0 = Term::param(ns[0].first, FinType::nat());
  TermPtr n1 = Term::param(ns[1].first, FinType::nat());
  TermPtr fxn = Term::apps(fn, {xp, n0});
  TermPtr fxm = Term::apps(fn, {xp, n1});
  bool direct = alpha_equal(eq->args[0], fxn) && alpha_equal(eq->args[1], fxm);
  bool swapped = alpha_equal(eq->args[0], fxm) && alpha_equal(eq->args[1], fxn);
  if (!direct && !swapped)
    throw PremiseMismatch("omega-ca: premise does not equate F(x,N) and F(x,M)");

  // Macro replay: underspill gives a standard stabilization bound, hac-int a
  // candidate list Phi, the maximum collapse Psi, and G(x) := F(x, Psi(x)).
  TermPtr bx = Term::app(stable_bound, Term::var(0, "x"));
  TermPtr phi = singleton_seq(bx, FinType::nat());
  TermPtr psi = t_maxnat(phi);
  TermPtr g_term = Term::lam("x", xq.type,
                             Term::apps(shift_term(fn, 1), {Term::var(0, "x"), psi}));

  std::string G = ctx.fresh("G");
  FinType g_ty = FinType::arrow(xq.type, FinType::nat());
  std::string N = ctx.fresh("N");
  FormulaPtr matrix = Formula::atom(
      kRelEq0, {Term::app(Term::param(G, g_ty), Term::param(xq.hint, xq.type)),
                Term::apps(fn, {Term::param(xq.hint, xq.type),
                                Term::param(N, FinType::nat())})});
  FormulaPtr inner = Formula::forall(
      N, FinType::nat(),
      Formula::implies(
          Formula::negate(Formula::st(Term::var(0, N))),
          abstract_param(matrix, N, 0)));
  std::vector<PrefixItem> newpref(prefix.begin(), prefix.end() - 1);
  newpref.push_back({false, G, g_ty});
  newpref.push_back({true, xq.hint, xq.type});
  FormulaPtr out = close_standard_prefix(newpref, inner);

  if (ctx.witnesses) {
    (*ctx.witnesses)[G] = g_term;
    wit_note(rec, G, g_term);
  }
  record(rec, "omega-ca", f, out);
  rec.side_conditions.push_back(
      "macro: underspill, hac-int, monotone collapse; G(x) = F(x, max Phi(x))");
  return out;
}

}  // namespace nsx
