#include "nsx/monotone.hpp"

namespace nsx {

Polarity flip(Polarity p) {
  switch (p) {
    case Polarity::Up:
      return Polarity::Down;
    case Polarity::Down:
      return Polarity::Up;
    default:
      return p;
  }
}

Polarity join(Polarity a, Polarity b) {
  if (a == Polarity::Const) return b;
  if (b == Polarity::Const) return a;
  if (a == b) return a;
  return Polarity::Unknown;
}

Polarity term_polarity(const TermPtr& t, int depth) {
  if (!t) return Polarity::Const;
  switch (t->kind) {
    case Term::Kind::Var:
      return t->index == depth ? Polarity::Up : Polarity::Const;
    case Term::Kind::Param:
    case Term::Kind::Const:
    case Term::Kind::Lit:
      return Polarity::Const;
    case Term::Kind::Lam:
      return has_free_var(t, depth) ? Polarity::Unknown : Polarity::Const;
    case Term::Kind::App: {
      // Unwind the spine; only the arithmetic primitives are understood.
      std::vector<TermPtr> args;
      TermPtr head = t;
      while (head->kind == Term::Kind::App) {
        args.push_back(head->arg);
        head = head->fn;
      }
      std::reverse(args.begin(), args.end());
      if (head->kind == Term::Kind::Const) {
        const std::string& n = head->name;
        if ((n == "succ" || n == "add" || n == "mul" || n == "max") ) {
          Polarity p = Polarity::Const;
          for (const auto& a : args) p = join(p, term_polarity(a, depth));
          return p;
        }
        if (n == "monus" && args.size() == 2)
          return join(term_polarity(args[0], depth),
                      flip(term_polarity(args[1], depth)));
      }
      return has_free_var(t, depth) ? Polarity::Unknown : Polarity::Const;
    }
  }
  return Polarity::Unknown;
}

Polarity formula_polarity(const FormulaPtr& f, int depth,
                          const RelTable& rels) {
  switch (f->kind) {
    case Formula::Kind::Atom: {
      Polarity acc = Polarity::Const;
      const RelSig* sig = rels.find(f->rel);
      for (size_t i = 0; i < f->args.size(); ++i) {
        Polarity tp = term_polarity(f->args[i], depth);
        if (tp == Polarity::Const) continue;
        Mono m = Mono::None;
        if (sig) {
          auto it = sig->mono.find(static_cast<int>(i) + 1);
          if (it != sig->mono.end()) m = it->second;
        }
        if (m == Mono::None) return Polarity::Unknown;
        Polarity rp = (m == Mono::Up) ? tp : flip(tp);
        acc = join(acc, rp);
        if (acc == Polarity::Unknown) return acc;
      }
      return acc;
    }
    case Formula::Kind::St:
    case Formula::Kind::InOmega:
      return has_free_var(f->term, depth) ? Polarity::Unknown
                                          : Polarity::Const;
    case Formula::Kind::ApproxEq:
      return (has_free_var(f->lhs, depth) || has_free_var(f->rhs, depth))
                 ? Polarity::Unknown
                 : Polarity::Const;
    case Formula::Kind::Not:
      return flip(formula_polarity(f->a, depth, rels));
    case Formula::Kind::And:
    case Formula::Kind::Or:
      return join(formula_polarity(f->a, depth, rels),
                  formula_polarity(f->b, depth, rels));
    case Formula::Kind::Implies:
      return join(flip(formula_polarity(f->a, depth, rels)),
                  formula_polarity(f->b, depth, rels));
    case Formula::Kind::ForAll:
    case Formula::Kind::Exists:
    case Formula::Kind::ForAllSt:
    case Formula::Kind::ExistsSt:
      return formula_polarity(f->a, depth + 1, rels);
  }
  return Polarity::Unknown;
}

bool monotone_up(const FormulaPtr& matrix, int depth, const RelTable& rels) {
  Polarity p = formula_polarity(matrix, depth, rels);
  return p == Polarity::Up || p == Polarity::Const;
}

}  // namespace nsx
