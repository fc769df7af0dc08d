#include "nsx/typecheck.hpp"

#include <functional>

#include "nsx/error.hpp"
#include "nsx/parser.hpp"

namespace nsx {

const RelSig* RelTable::find(const std::string& name) const {
  auto it = rels.find(name);
  return it == rels.end() ? nullptr : &it->second;
}

const RelTable& RelTable::builtins() {
  static const RelTable t = [] {
    RelTable t;
    auto n = FinType::nat();
    t.rels["eq0"] = RelSig{{n, n}, {}};
    t.rels["le0"] = RelSig{{n, n}, {{1, Mono::Down}, {2, Mono::Up}}};
    t.rels["lt0"] = RelSig{{n, n}, {{1, Mono::Down}, {2, Mono::Up}}};
    // eq, in-seq and cauchy-close are typed structurally in the checker.
    return t;
  }();
  return t;
}

namespace {

class Checker {
 public:
  explicit Checker(const RelTable& rels) : rels_(rels) {}

  FinType resolve(const FinType& t) {
    switch (t.kind()) {
      case FinType::Kind::Nat:
        return t;
      case FinType::Kind::Meta: {
        auto it = sol_.find(t.meta_id());
        if (it == sol_.end()) return t;
        FinType r = resolve(it->second);
        sol_[t.meta_id()] = r;
        return r;
      }
      case FinType::Kind::Arrow:
        return FinType::arrow(resolve(t.dom()), resolve(t.cod()));
      case FinType::Kind::Seq:
        return FinType::seq(resolve(t.elem()));
    }
    return t;
  }

  bool occurs(int id, const FinType& t) {
    switch (t.kind()) {
      case FinType::Kind::Meta:
        return t.meta_id() == id;
      case FinType::Kind::Arrow:
        return occurs(id, t.dom()) || occurs(id, t.cod());
      case FinType::Kind::Seq:
        return occurs(id, t.elem());
      default:
        return false;
    }
  }

  void unify(const FinType& a0, const FinType& b0, const std::string& what) {
    FinType a = resolve(a0), b = resolve(b0);
    if (a == b) return;
    if (a.is_meta()) {
      if (occurs(a.meta_id(), b))
        throw TypeMismatch("cyclic type in " + what);
      sol_[a.meta_id()] = b;
      return;
    }
    if (b.is_meta()) {
      unify(b, a, what);
      return;
    }
    if (a.is_arrow() && b.is_arrow()) {
      unify(a.dom(), b.dom(), what);
      unify(a.cod(), b.cod(), what);
      return;
    }
    if (a.is_seq() && b.is_seq()) {
      unify(a.elem(), b.elem(), what);
      return;
    }
    throw TypeMismatch(what + ": expected " + a.to_string() + ", found " +
                       b.to_string());
  }

  FinType check_term(const TermPtr& t, std::vector<FinType>& ctx) {
    switch (t->kind) {
      case Term::Kind::Var: {
        int pos = static_cast<int>(ctx.size()) - 1 - t->index;
        if (pos < 0) throw UnboundVariable(t->name + "#" + std::to_string(t->index));
        return ctx[pos];
      }
      case Term::Kind::Param:
      case Term::Kind::Const:
        return t->type;
      case Term::Kind::Lit:
        return FinType::nat();
      case Term::Kind::Lam: {
        ctx.push_back(t->type);
        FinType body = check_term(t->body, ctx);
        ctx.pop_back();
        return FinType::arrow(t->type, body);
      }
      case Term::Kind::App: {
        FinType fty = resolve(check_term(t->fn, ctx));
        FinType aty = check_term(t->arg, ctx);
        if (fty.is_meta()) {
          FinType cod = fresh();
          unify(fty, FinType::arrow(aty, cod), "application");
          return cod;
        }
        if (!fty.is_arrow())
          throw TypeMismatch("applied non-function " + print_term(t->fn) +
                             " of type " + fty.to_string());
        unify(fty.dom(), aty, "argument of " + print_term(t->fn));
        return fty.cod();
      }
    }
    throw TypeMismatch("malformed term");
  }

  void check_formula(const FormulaPtr& f, std::vector<FinType>& ctx) {
    switch (f->kind) {
      case Formula::Kind::Atom: {
        std::vector<FinType> argty;
        for (const auto& t : f->args) argty.push_back(check_term(t, ctx));
        if (f->rel == kRelEq) {
          if (argty.size() != 2) throw TypeMismatch("eq needs two arguments");
          unify(argty[0], argty[1], "eq");
          return;
        }
        if (f->rel == kRelInSeq) {
          if (argty.size() != 2)
            throw TypeMismatch("in-seq needs two arguments");
          unify(FinType::seq(argty[0]), argty[1], "in-seq");
          return;
        }
        if (f->rel == kRelCauchyClose) {
          if (argty.size() != 3)
            throw TypeMismatch("cauchy-close needs three arguments");
          unify(argty[0], argty[1], "cauchy-close");
          unify(argty[2], FinType::nat(), "cauchy-close index");
          return;
        }
        const RelSig* sig = rels_.find(f->rel);
        if (!sig) throw TypeMismatch("unknown relation '" + f->rel + "'");
        if (sig->argtypes.size() != argty.size())
          throw TypeMismatch("relation '" + f->rel + "' arity mismatch");
        for (size_t i = 0; i < argty.size(); ++i)
          unify(sig->argtypes[i], argty[i],
                "argument " + std::to_string(i + 1) + " of " + f->rel);
        return;
      }
      case Formula::Kind::St:
      case Formula::Kind::InOmega:
        check_term(f->term, ctx);
        return;
      case Formula::Kind::ApproxEq: {
        FinType l = check_term(f->lhs, ctx);
        FinType r = check_term(f->rhs, ctx);
        unify(l, f->type, "approx lhs");
        unify(r, f->type, "approx rhs");
        return;
      }
      case Formula::Kind::Not:
        check_formula(f->a, ctx);
        return;
      case Formula::Kind::And:
      case Formula::Kind::Or:
      case Formula::Kind::Implies:
        check_formula(f->a, ctx);
        check_formula(f->b, ctx);
        return;
      case Formula::Kind::ForAll:
      case Formula::Kind::Exists:
      case Formula::Kind::ForAllSt:
      case Formula::Kind::ExistsSt:
        ctx.push_back(f->type);
        check_formula(f->a, ctx);
        ctx.pop_back();
        return;
    }
  }

  FinType fresh() { return FinType::meta(next_meta_++); }

  TermPtr zonk_term(const TermPtr& t) {
    switch (t->kind) {
      case Term::Kind::Var:
      case Term::Kind::Lit:
        return t;
      case Term::Kind::Param:
        return t;
      case Term::Kind::Const: {
        FinType r = resolve(t->type);
        if (!r.is_concrete())
          throw TypeMismatch("ambiguous type for constant '" + t->name +
                             "'; annotate it");
        return Term::cnst(t->name, r);
      }
      case Term::Kind::Lam:
        return Term::lam(t->name, t->type, zonk_term(t->body));
      case Term::Kind::App:
        return Term::app(zonk_term(t->fn), zonk_term(t->arg));
    }
    return t;
  }

  FormulaPtr zonk_formula(const FormulaPtr& f) {
    switch (f->kind) {
      case Formula::Kind::Atom: {
        std::vector<TermPtr> args;
        for (const auto& t : f->args) args.push_back(zonk_term(t));
        return Formula::atom(f->rel, std::move(args));
      }
      case Formula::Kind::St:
        return Formula::st(zonk_term(f->term));
      case Formula::Kind::InOmega:
        return Formula::in_omega(zonk_term(f->term));
      case Formula::Kind::ApproxEq:
        return Formula::approx_eq(zonk_term(f->lhs), zonk_term(f->rhs),
                                  f->type);
      case Formula::Kind::Not:
        return Formula::negate(zonk_formula(f->a));
      case Formula::Kind::And:
        return Formula::conj(zonk_formula(f->a), zonk_formula(f->b));
      case Formula::Kind::Or:
        return Formula::disj(zonk_formula(f->a), zonk_formula(f->b));
      case Formula::Kind::Implies:
        return Formula::implies(zonk_formula(f->a), zonk_formula(f->b));
      case Formula::Kind::ForAll:
        return Formula::forall(f->name, f->type, zonk_formula(f->a));
      case Formula::Kind::Exists:
        return Formula::exists(f->name, f->type, zonk_formula(f->a));
      case Formula::Kind::ForAllSt:
        return Formula::forall_st(f->name, f->type, zonk_formula(f->a));
      case Formula::Kind::ExistsSt:
        return Formula::exists_st(f->name, f->type, zonk_formula(f->a));
    }
    return f;
  }

  FinType finish(const FinType& t) {
    FinType r = resolve(t);
    if (!r.is_concrete())
      throw TypeMismatch("ambiguous type " + r.to_string() + "; annotate");
    return r;
  }

 private:
  const RelTable& rels_;
  std::map<int, FinType> sol_;
  int next_meta_ = 1 << 20;  // clear of parser-allocated metas
};

}  // namespace

TypedTerm typecheck_term(const TermPtr& t, const std::vector<FinType>& ctx) {
  Checker c(RelTable::builtins());
  std::vector<FinType> scope = ctx;
  FinType ty = c.check_term(t, scope);
  return TypedTerm{c.zonk_term(t), c.finish(ty)};
}

FormulaPtr typecheck_formula(const FormulaPtr& f, const RelTable& rels,
                             const std::vector<FinType>& ctx) {
  Checker c(rels);
  std::vector<FinType> scope = ctx;
  c.check_formula(f, scope);
  return c.zonk_formula(f);
}

}  // namespace nsx
