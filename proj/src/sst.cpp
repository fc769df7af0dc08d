#include "nsx/sst.hpp"

#include <functional>

#include "nsx/error.hpp"
#include "nsx/parser.hpp"
#include "nsx/typecheck.hpp"

namespace nsx {

FormulaPtr NormalForm::render() const {
  FormulaPtr f = matrix;
  for (size_t i = exists_block.size(); i-- > 0;) {
    const auto& [n, ty] = exists_block[i];
    f = Formula::exists(n, ty,
                        Formula::conj(Formula::st(Term::var(0, n)), f));
  }
  for (size_t i = forall_block.size(); i-- > 0;) {
    const auto& [n, ty] = forall_block[i];
    f = Formula::forall(n, ty,
                        Formula::implies(Formula::st(Term::var(0, n)), f));
  }
  return f;
}

std::vector<FinType> NormalForm::binder_types() const {
  std::vector<FinType> out;
  for (const auto& [n, t] : forall_block) out.push_back(t);
  for (const auto& [n, t] : exists_block) out.push_back(t);
  return out;
}

bool alpha_equal(const NormalForm& a, const NormalForm& b) {
  if (a.forall_block.size() != b.forall_block.size() ||
      a.exists_block.size() != b.exists_block.size())
    return false;
  for (size_t i = 0; i < a.forall_block.size(); ++i)
    if (a.forall_block[i].second != b.forall_block[i].second) return false;
  for (size_t i = 0; i < a.exists_block.size(); ++i)
    if (a.exists_block[i].second != b.exists_block[i].second) return false;
  return alpha_equal(a.matrix, b.matrix);
}

DetectResult detect_normal_form(const FormulaPtr& f0) {
  FormulaPtr f = desugar(f0);
  NormalForm nf;
  std::string path;
  while (auto v = match_forall_st(f)) {
    nf.forall_block.emplace_back(v->hint, v->type);
    f = v->body;
    path += "/forall-st";
  }
  while (auto v = match_exists_st(f)) {
    nf.exists_block.emplace_back(v->hint, v->type);
    f = v->body;
    path += "/exists-st";
  }
  if (match_forall_st(f)) {
    return DetectResult{std::nullopt, "universal standard quantifier after an existential one (blocks out of order)", path};
  }
  if (!is_internal(f)) {
    return DetectResult{std::nullopt, "matrix is not internal", path + "/matrix"};
  }
  nf.matrix = f;
  return DetectResult{std::move(nf), "", ""};
}

namespace {

// ---------------------------------------------------------------------------
// Matrix simplification.  Only the shapes produced by the clause recursion
// are rewritten; user-supplied internal formulas pass through untouched
// except for involutive double-negation removal.

bool is_eq_rel(const std::string& r) { return r == kRelEq0 || r == kRelEq; }

// Negation push limited to the generated connective/bounded-quantifier
// fragment; returns nullopt when an unpushable node is hit so the caller
// keeps the original negation.
std::optional<FormulaPtr> push_not(const FormulaPtr& f) {
  switch (f->kind) {
    case Formula::Kind::Not:
      return f->a;
    case Formula::Kind::Or: {
      auto a = push_not(f->a), b = push_not(f->b);
      if (!a || !b) return std::nullopt;
      return Formula::conj(*a, *b);
    }
    case Formula::Kind::And: {
      auto a = push_not(f->a), b = push_not(f->b);
      if (!a || !b) return std::nullopt;
      return Formula::disj(*a, *b);
    }
    case Formula::Kind::ForAll: {
      if (auto bv = match_bounded_forall(f)) {
        auto nb = push_not(bv->body);
        if (!nb) return std::nullopt;
        return bounded_exists(bv->hint, bv->type, bv->bound, *nb);
      }
      auto nb = push_not(f->a);
      if (!nb) return std::nullopt;
      return Formula::exists(f->name, f->type, *nb);
    }
    case Formula::Kind::Exists: {
      if (auto bv = match_bounded_exists(f)) {
        auto nb = push_not(bv->body);
        if (!nb) return std::nullopt;
        return bounded_forall(bv->hint, bv->type, bv->bound, *nb);
      }
      auto nb = push_not(f->a);
      if (!nb) return std::nullopt;
      return Formula::forall(f->name, f->type, *nb);
    }
    case Formula::Kind::Atom:
      return Formula::negate(f);
    default:
      // Implications and the remaining shapes stay under the negation; the
      // push is all-or-nothing so a later double negation restores them.
      return std::nullopt;
  }
}

// One-point rules.  The guard literal sits leftmost on the disjunction or
// conjunction spine, possibly below a chain of bounded quantifiers.
//
//   (forall x)(chain)(x != t \/ B)  ~>  (chain)(B[x := t])
//   (exists x)(chain)(x == t /\ B)  ~>  (chain)(B[x := t])
//
// The guard may mention chain binders; the rewrite stays an equivalence.
struct OnePoint {
  FormulaPtr rewritten;
};

std::optional<TermPtr> eq_partner(const FormulaPtr& atomf, int var_depth) {
  if (atomf->kind != Formula::Kind::Atom || !is_eq_rel(atomf->rel) ||
      atomf->args.size() != 2)
    return std::nullopt;
  const TermPtr &a = atomf->args[0], &b = atomf->args[1];
  auto is_target = [&](const TermPtr& t) {
    return t->kind == Term::Kind::Var && t->index == var_depth;
  };
  if (is_target(a) && !has_free_var(b, var_depth)) return b;
  if (is_target(b) && !has_free_var(a, var_depth)) return a;
  return std::nullopt;
}

// Attempts the one-point rewrite for the binder introduced at depth `d`
// relative to `body` (d = 0 directly under the quantifier).
std::optional<FormulaPtr> one_point_body(const FormulaPtr& body, int d,
                                         bool universal) {
  // Walk through bounded quantifier chains.
  if (universal) {
    if (auto bv = match_bounded_forall(body)) {
      if (!has_free_var(bv->bound, d)) {
        auto inner = one_point_body(bv->body, d + 1, universal);
        if (inner)
          return bounded_forall(bv->hint, bv->type, bv->bound, *inner);
      }
    }
    if (auto bv = match_bounded_exists(body)) {
      if (!has_free_var(bv->bound, d)) {
        auto inner = one_point_body(bv->body, d + 1, universal);
        if (inner)
          return bounded_exists(bv->hint, bv->type, bv->bound, *inner);
      }
    }
    // x != t \/ B   or   (x == t) -> B
    if (body->kind == Formula::Kind::Or &&
        body->a->kind == Formula::Kind::Not) {
      if (auto t = eq_partner(body->a->a, d))
        return subst_formula(body->b, d, *t);
    }
    if (body->kind == Formula::Kind::Implies) {
      if (auto t = eq_partner(body->a, d))
        return subst_formula(body->b, d, *t);
    }
    return std::nullopt;
  }
  if (auto bv = match_bounded_forall(body)) {
    if (!has_free_var(bv->bound, d)) {
      auto inner = one_point_body(bv->body, d + 1, universal);
      if (inner) return bounded_forall(bv->hint, bv->type, bv->bound, *inner);
    }
  }
  if (auto bv = match_bounded_exists(body)) {
    if (!has_free_var(bv->bound, d)) {
      auto inner = one_point_body(bv->body, d + 1, universal);
      if (inner) return bounded_exists(bv->hint, bv->type, bv->bound, *inner);
    }
  }
  if (body->kind == Formula::Kind::And) {
    if (auto t = eq_partner(body->a, d)) return subst_formula(body->b, d, *t);
  }
  return std::nullopt;
}

FormulaPtr simplify_matrix(const FormulaPtr& f) {
  // Bottom-up, iterated to a fixed point (formulas are small).
  std::function<FormulaPtr(const FormulaPtr&)> go =
      [&](const FormulaPtr& g) -> FormulaPtr {
    FormulaPtr h = g;
    switch (g->kind) {
      case Formula::Kind::Not:
        h = Formula::negate(go(g->a));
        break;
      case Formula::Kind::And:
        h = Formula::conj(go(g->a), go(g->b));
        break;
      case Formula::Kind::Or:
        h = Formula::disj(go(g->a), go(g->b));
        break;
      case Formula::Kind::Implies:
        h = Formula::implies(go(g->a), go(g->b));
        break;
      case Formula::Kind::ForAll:
        h = Formula::forall(g->name, g->type, go(g->a));
        break;
      case Formula::Kind::Exists:
        h = Formula::exists(g->name, g->type, go(g->a));
        break;
      default:
        return g;
    }
    // Local rewrites at this node.
    if (h->kind == Formula::Kind::Not) {
      if (h->a->kind == Formula::Kind::Not) return h->a->a;
      if (h->a->kind == Formula::Kind::ForAll ||
          h->a->kind == Formula::Kind::Exists ||
          h->a->kind == Formula::Kind::Or ||
          h->a->kind == Formula::Kind::And) {
        if (auto p = push_not(h->a)) return go(*p);
      }
    }
    if (h->kind == Formula::Kind::ForAll) {
      // Plain universal binder (not st-guarded, not sequence-bounded).
      if (!match_bounded_forall(h) && !match_forall_st(h)) {
        if (auto r = one_point_body(h->a, 0, true)) return go(*r);
      }
    }
    if (h->kind == Formula::Kind::Exists) {
      if (!match_bounded_exists(h) && !match_exists_st(h)) {
        if (auto r = one_point_body(h->a, 0, false)) return go(*r);
      }
    }
    return h;
  };
  FormulaPtr cur = f;
  for (int i = 0; i < 8; ++i) {
    FormulaPtr next = go(cur);
    if (alpha_equal(next, cur)) break;
    cur = next;
  }
  return cur;
}

// ---------------------------------------------------------------------------
// The clause recursion works on an "opened" representation: block variables
// are unique parameters, converted to de Bruijn binders once at the end.

struct OpenNF {
  std::vector<std::pair<std::string, FinType>> fa, ex;
  FormulaPtr matrix;
};

struct Translator {
  int counter = 0;
  std::vector<SstTraceEntry>* trace = nullptr;

  std::string fresh(const std::string& base) {
    return "$" + base + std::to_string(counter++);
  }

  void note(const char* clause, const FormulaPtr& at) {
    if (!trace) return;
    std::string s = print_formula(at);
    if (s.size() > 64) s = s.substr(0, 61) + "...";
    trace->push_back({clause, s});
  }

  static bool param_occurs(const FormulaPtr& f, const std::string& name) {
    std::set<std::string> ps;
    collect_params(f, ps);
    return ps.count(name) > 0;
  }

  OpenNF normalize(OpenNF nf) {
    nf.matrix = simplify_matrix(nf.matrix);
    // Drop vacuous binders.
    auto sweep = [&](std::vector<std::pair<std::string, FinType>>& blk) {
      std::vector<std::pair<std::string, FinType>> kept;
      for (auto& p : blk)
        if (param_occurs(nf.matrix, p.first)) kept.push_back(p);
      blk = std::move(kept);
    };
    sweep(nf.fa);
    sweep(nf.ex);
    // Collapse singleton sequence binders: a block variable of sequence type
    // whose sole use is the bound of the leading bounded quantifier becomes
    // an element-typed block variable.
    bool changed = true;
    while (changed) {
      changed = false;
      if (auto bv = match_bounded_forall(nf.matrix)) {
        if (bv->bound->kind == Term::Kind::Param) {
          for (auto& p : nf.fa) {
            if (p.first == bv->bound->name &&
                count_param(nf.matrix, p.first) == 1) {
              std::string e = fresh("w");
              p = {e, bv->type};
              nf.matrix =
                  simplify_matrix(subst_formula(bv->body, 0, Term::param(e, bv->type)));
              changed = true;
              break;
            }
          }
        }
      }
      if (changed) continue;
      if (auto bv = match_bounded_exists(nf.matrix)) {
        if (bv->bound->kind == Term::Kind::Param) {
          for (auto& p : nf.ex) {
            if (p.first == bv->bound->name &&
                count_param(nf.matrix, p.first) == 1) {
              std::string e = fresh("w");
              p = {e, bv->type};
              nf.matrix =
                  simplify_matrix(subst_formula(bv->body, 0, Term::param(e, bv->type)));
              changed = true;
              break;
            }
          }
        }
      }
    }
    sweep(nf.fa);
    sweep(nf.ex);
    return nf;
  }

  OpenNF translate(const FormulaPtr& f) {
    if (is_internal(f)) {
      note("internal", f);
      return {{}, {}, f};
    }
    switch (f->kind) {
      case Formula::Kind::St: {
        note("st", f);
        FinType ty = typecheck_term(f->term).type;
        std::string w = fresh("x");
        const char* rel = ty == FinType::nat() ? kRelEq0 : kRelEq;
        return normalize(
            {{},
             {{w, ty}},
             Formula::atom(rel, {f->term, Term::param(w, ty)})});
      }
      case Formula::Kind::Not: {
        note("not", f);
        OpenNF a = translate(f->a);
        OpenNF out;
        // Herbrandized functionals Y_j over the universal block of a.
        std::vector<std::string> ynames;
        for (const auto& [yn, yt] : a.ex) {
          FinType fty = FinType::seq(yt);
          for (size_t i = a.fa.size(); i-- > 0;)
            fty = FinType::arrow(a.fa[i].second, fty);
          std::string Y = fresh("Y");
          out.fa.emplace_back(Y, fty);
          ynames.push_back(Y);
        }
        out.ex = a.fa;
        // Matrix: (forall y_j in Y_j(x)) not phi.
        FormulaPtr m = Formula::negate(a.matrix);
        for (size_t j = a.ex.size(); j-- > 0;) {
          const auto& [yn, yt] = a.ex[j];
          FinType fty = FinType::seq(yt);
          for (size_t i = a.fa.size(); i-- > 0;)
            fty = FinType::arrow(a.fa[i].second, fty);
          TermPtr bound = Term::param(ynames[j], fty);
          for (const auto& [xn, xt] : a.fa)
            bound = Term::app(bound, Term::param(xn, xt));
          m = bounded_forall(yn, yt, bound, abstract_param(m, yn, 0));
        }
        out.matrix = m;
        return normalize(std::move(out));
      }
      case Formula::Kind::Or: {
        note("or", f);
        OpenNF a = translate(f->a);
        OpenNF b = translate(f->b);
        OpenNF out;
        out.fa = a.fa;
        out.fa.insert(out.fa.end(), b.fa.begin(), b.fa.end());
        out.ex = a.ex;
        out.ex.insert(out.ex.end(), b.ex.begin(), b.ex.end());
        out.matrix = Formula::disj(a.matrix, b.matrix);
        return normalize(std::move(out));
      }
      case Formula::Kind::ForAll: {
        note("forall", f);
        std::string z = fresh("z");
        FormulaPtr body = subst_formula(f->a, 0, Term::param(z, f->type));
        OpenNF a = translate(body);
        OpenNF out;
        out.fa = a.fa;
        FormulaPtr m = a.matrix;
        // (forall z)(exists y' in y) phi: every existential witness becomes
        // a finite sequence of candidates.
        for (size_t j = a.ex.size(); j-- > 0;) {
          const auto& [yn, yt] = a.ex[j];
          std::string v = fresh("v");
          out.ex.emplace_back(v, FinType::seq(yt));
          m = bounded_exists(yn, yt, Term::param(v, FinType::seq(yt)),
                             abstract_param(m, yn, 0));
        }
        std::reverse(out.ex.begin(), out.ex.end());
        m = Formula::forall(f->name, f->type, abstract_param(m, z, 0));
        out.matrix = m;
        return normalize(std::move(out));
      }
      // Classical expansion of the remaining connectives.
      case Formula::Kind::And:
        return translate(Formula::negate(
            Formula::disj(Formula::negate(f->a), Formula::negate(f->b))));
      case Formula::Kind::Implies:
        return translate(Formula::disj(Formula::negate(f->a), f->b));
      case Formula::Kind::Exists:
        return translate(Formula::negate(
            Formula::forall(f->name, f->type, Formula::negate(f->a))));
      default:
        throw UnsupportedConnective("sugar node survived desugaring: " +
                                    print_formula(f));
    }
  }
};

NormalForm close_open(const OpenNF& o) {
  NormalForm nf;
  FormulaPtr m = o.matrix;
  // Bind exists block innermost-first, then the forall block.
  std::vector<std::pair<std::string, FinType>> all = o.fa;
  all.insert(all.end(), o.ex.begin(), o.ex.end());
  for (size_t i = all.size(); i-- > 0;)
    m = abstract_param(m, all[i].first, static_cast<int>(all.size() - 1 - i));
  for (const auto& [n, t] : o.fa) nf.forall_block.emplace_back(n.substr(1), t);
  for (const auto& [n, t] : o.ex) nf.exists_block.emplace_back(n.substr(1), t);
  nf.matrix = m;
  return nf;
}

}  // namespace

NormalForm s_st_translate_traced(const FormulaPtr& f,
                                 std::vector<SstTraceEntry>* trace) {
  Translator tr;
  tr.trace = trace;
  OpenNF o = tr.translate(desugar(f));
  o = tr.normalize(std::move(o));
  return close_open(o);
}

NormalForm s_st_translate(const FormulaPtr& f) {
  return s_st_translate_traced(f, nullptr);
}

}  // namespace nsx
