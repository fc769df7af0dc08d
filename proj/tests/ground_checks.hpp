// Desk-scale transformer-soundness enumeration for the named rewrite rules:
// each instance applies the real rule code to a small formula with concrete
// witness data, then evaluates source and target instances in the finite
// ground model.  The oracle side (enumeration and evaluation) is independent
// of the rule implementations it checks.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "nsx/error.hpp"
#include "nsx/eval.hpp"
#include "nsx/ground.hpp"
#include "nsx/parser.hpp"
#include "nsx/rules.hpp"
#include "nsx/script.hpp"

namespace nsx_ground {

using namespace nsx;

struct RuleCheck {
  std::string rule;
  long long instances = 0;
  long long violations = 0;
  std::vector<std::string> notes;
};

namespace detail {

inline TermPtr lit(long long n) { return Term::lit(Nat(n)); }

inline TermPtr seq_lit(const std::vector<long long>& xs) {
  TermPtr t = Term::cnst("empty", const_type("empty", FinType::nat()));
  for (size_t i = xs.size(); i-- > 0;)
    t = Term::apps(Term::cnst("cons", const_type("cons", FinType::nat())),
                   {lit(xs[i]), t});
  return t;
}

// Replaces witnessed standard existentials of the prefix by their terms so
// the instance can be evaluated in the ground model.
inline FormulaPtr instantiate(const FormulaPtr& f, const WitnessMap& wit) {
  auto [prefix, body] = open_standard_prefix(f);
  std::vector<PrefixItem> kept;
  for (const auto& p : prefix) {
    if (!p.universal) {
      auto it = wit.find(p.hint);
      if (it != wit.end()) {
        body = subst_formula_param(body, p.hint, it->second);
        continue;
      }
    }
    kept.push_back(p);
  }
  return close_standard_prefix(kept, body);
}

inline bool holds(const FormulaPtr& f, const GroundModel& m) {
  return eval_ground(desugar(f), m);
}

struct Harness {
  GroundModel model;
  RuleCheck* out;
  int counter = 0;

  RuleCtx ctx(WitnessMap* w, std::set<std::string>* taints = nullptr) {
    RuleCtx c;
    c.counter = &counter;
    c.witnesses = w;
    c.taints = taints;
    return c;
  }

  // Source-true implies target-true for the given witness data; the target
  // must also typecheck (schema typing).
  void check_pair(const FormulaPtr& src, const FormulaPtr& tgt,
                  const WitnessMap& wsrc, const WitnessMap& wtgt,
                  const std::string& what) {
    ++out->instances;
    try {
      typecheck_formula(tgt);
    } catch (const Error& e) {
      ++out->violations;
      out->notes.push_back(what + ": target fails to typecheck: " + e.what());
      return;
    }
    bool s, t;
    try {
      s = holds(instantiate(src, wsrc), model);
      t = holds(instantiate(tgt, wtgt), model);
    } catch (const Error& e) {
      ++out->violations;
      out->notes.push_back(what + ": evaluation failed: " + e.what());
      return;
    }
    if (s && !t) {
      ++out->violations;
      if (out->notes.size() < 4)
        out->notes.push_back(what + ": source holds but target fails");
    }
  }
};

}  // namespace detail

inline RuleCheck check_idealize_contra(const GroundModel& model) {
  using namespace detail;
  RuleCheck rc{"idealize-contra"};
  Harness h{model, &rc};
  for (long long c1 = 0; c1 <= 4; ++c1) {
    for (long long c2 = 0; c2 <= 4; ++c2) {
      for (int wkind = 0; wkind < 3; ++wkind) {
        // (forall-st k)(forall z)(exists-st y)[z <= c1 -> k - y <= c2]
        FormulaPtr f = desugar(parse_formula(
            "(forall-st k nat (forall z nat (exists-st y nat "
            "(implies (atom le0 z " + std::to_string(c1) +
            ") (atom le0 (app monus k y) " + std::to_string(c2) + ")))))"));
        WitnessMap w;
        TermPtr wy = wkind == 0   ? Term::param("k", FinType::nat())
                     : wkind == 1 ? t_monus(Term::param("k", FinType::nat()), lit(1))
                                  : lit(c2);
        w["y"] = wy;
        StepRecord rec;
        RuleCtx cx = h.ctx(&w);
        FormulaPtr tgt;
        try {
          tgt = rule_idealize_contra(f, cx, rec);
        } catch (const Error& e) {
          ++rc.violations;
          rc.notes.push_back(std::string("rule failed: ") + e.what());
          continue;
        }
        // The source witness sits behind the internal quantifier; build the
        // witnessed source instance by hand.
        FormulaPtr src_inst = desugar(parse_formula(
            "(forall-st k nat (forall z nat "
            "(implies (atom le0 z " + std::to_string(c1) +
            ") (atom le0 (app monus k " + print_term(wy) + ") " +
            std::to_string(c2) + "))))",
            ParamEnv{{"k", FinType::nat()}}));
        ++rc.instances;
        bool s = holds(src_inst, model);
        bool t = holds(instantiate(tgt, w), model);
        if (s && !t) {
          ++rc.violations;
          if (rc.notes.size() < 4)
            rc.notes.push_back("idealize c1=" + std::to_string(c1) +
                               " c2=" + std::to_string(c2) +
                               ": source holds but target fails");
        }
      }
    }
  }
  return rc;
}

inline RuleCheck check_monotone_max(const GroundModel& model, bool bounded) {
  using namespace detail;
  RuleCheck rc{bounded ? "bound-max" : "monotone-max"};
  Harness h{model, &rc};
  // Enumerate every sequence with length <= seq_max and entries <= nat_max.
  std::vector<std::vector<long long>> seqs{{}};
  {
    std::vector<std::vector<long long>> frontier{{}};
    for (int len = 1; len <= model.seq_max; ++len) {
      std::vector<std::vector<long long>> next;
      for (const auto& s : frontier) {
        for (long long v = 0; v <= model.nat_max; ++v) {
          auto t = s;
          t.push_back(v);
          seqs.push_back(t);
          next.push_back(std::move(t));
        }
      }
      frontier = std::move(next);
    }
  }
  for (int mkind = 0; mkind < 2; ++mkind) {
    std::string matrix =
        mkind == 0
            ? "(atom le0 (app monus z 1) N)"
            : "(or (atom le0 z N) (atom lt0 z 1))";
    // Source: (exists-st w)(forall z)(exists N in w) matrix
    FormulaPtr f = desugar(parse_formula(
        "(exists-st w (seq nat) (forall z nat (exists-in N nat w " + matrix +
        ")))"));
    for (const auto& sv : seqs) {
      WitnessMap w;
      w["w"] = seq_lit(sv);
      StepRecord rec;
      RuleCtx cx = h.ctx(&w);
      FormulaPtr tgt;
      try {
        tgt = bounded ? rule_bound_max(f, {"N"}, "Nb", cx, rec)
                      : rule_monotone_max(f, {"N"}, "Nm", false, cx, rec);
      } catch (const Error& e) {
        ++rc.violations;
        rc.notes.push_back(std::string("rule failed: ") + e.what());
        break;
      }
      WitnessMap wsrc;
      wsrc["w"] = seq_lit(sv);
      h.check_pair(f, tgt, wsrc, w, "seq size " + std::to_string(sv.size()));
    }
  }
  // The equality matrix must be rejected by the certificate.
  if (!bounded) {
    FormulaPtr f = desugar(parse_formula(
        "(exists-st w (seq nat) (forall z nat (exists-in N nat w "
        "(atom eq0 N z))))"));
    WitnessMap w;
    w["w"] = seq_lit({1, 2});
    StepRecord rec;
    RuleCtx cx = h.ctx(&w);
    ++rc.instances;
    try {
      rule_monotone_max(f, {"N"}, "Nm", false, cx, rec);
      ++rc.violations;
      rc.notes.push_back("equality matrix accepted by the certificate");
    } catch (const MonotonicityNotEstablished&) {
      // expected
    }
  }
  return rc;
}

inline RuleCheck check_hac_int(const GroundModel& model) {
  using namespace detail;
  RuleCheck rc{"hac-int"};
  Harness h{model, &rc};
  for (long long c = 0; c <= 6; ++c) {
    for (int wkind = 0; wkind < 3; ++wkind) {
      FormulaPtr f = desugar(parse_formula(
          "(forall-st k nat (exists-st y nat (atom le0 (app monus k " +
          std::to_string(c) + ") y)))"));
      TermPtr wy = wkind == 0   ? Term::param("k", FinType::nat())
                   : wkind == 1 ? t_monus(Term::param("k", FinType::nat()), lit(c))
                                : lit(c);
      WitnessMap w;
      w["y"] = wy;
      StepRecord rec;
      RuleCtx cx = h.ctx(&w);
      FormulaPtr tgt;
      try {
        tgt = rule_hac_int(f, {"F"}, cx, rec);
      } catch (const Error& e) {
        ++rc.violations;
        rc.notes.push_back(std::string("rule failed: ") + e.what());
        continue;
      }
      WitnessMap wsrc;
      wsrc["y"] = wy;
      h.check_pair(f, tgt, wsrc, w, "hac c=" + std::to_string(c));
    }
  }
  return rc;
}

#define REQUIRE_LIKE(cond, rc, msg) \
  do {                              \
    if (!(cond)) {                  \
      ++(rc).violations;            \
      (rc).notes.push_back(msg);    \
      continue;                     \
    }                               \
  } while (0)

inline RuleCheck check_hgmp(const GroundModel& model) {
  using namespace detail;
  RuleCheck rc{"hgmp-st"};
  Harness h{model, &rc};
  for (long long c = 0; c <= 8; ++c) {
    for (long long d = 0; d <= 4; ++d) {
      // [(forall-st x)(x <= c) -> (d <= 2)]
      FormulaPtr f = desugar(parse_formula(
          "(implies (forall-st x nat (atom le0 x " + std::to_string(c) +
          ")) (atom le0 " + std::to_string(d) + " 2))"));
      StepRecord rec;
      WitnessMap w;
      RuleCtx cx = h.ctx(&w);
      FormulaPtr tgt;
      try {
        tgt = rule_hgmp_st(f, cx, rec);
      } catch (const Error& e) {
        ++rc.violations;
        rc.notes.push_back(std::string("rule failed: ") + e.what());
        continue;
      }
      // The Herbrand list carries the full standard domain: with it the
      // bounded antecedent coincides with the relativized one.
      auto [prefix, body] = open_standard_prefix(tgt);
      REQUIRE_LIKE(prefix.size() == 1, rc, "hgmp: expected one new existential");
      std::vector<long long> dom;
      for (long long i = 0; i <= model.standard_cut; ++i) dom.push_back(i);
      WitnessMap wt;
      wt[prefix[0].hint] = seq_lit(dom);
      ++rc.instances;
      bool s = holds(f, model);
      bool t = holds(instantiate(tgt, wt), model);
      if (s != t) {
        ++rc.violations;
        rc.notes.push_back("hgmp: full-domain Herbrandization changed truth");
      }
    }
  }
  return rc;
}

inline RuleCheck check_hip(const GroundModel& model) {
  using namespace detail;
  RuleCheck rc{"hip-forallst"};
  Harness h{model, &rc};
  for (long long c = 0; c <= 8; ++c) {
    for (long long y0 = 0; y0 <= 4; ++y0) {
      FormulaPtr f = desugar(parse_formula(
          "(implies (forall-st x nat (atom le0 x " + std::to_string(c) +
          ")) (exists-st y nat (atom le0 " + std::to_string(y0) + " y)))"));
      WitnessMap w;
      w["y"] = lit(y0);
      StepRecord rec;
      RuleCtx cx = h.ctx(&w);
      FormulaPtr tgt;
      try {
        tgt = rule_hip_forallst(f, cx, rec);
      } catch (const Error& e) {
        ++rc.violations;
        rc.notes.push_back(std::string("rule failed: ") + e.what());
        continue;
      }
      WitnessMap wsrc;
      wsrc["y"] = lit(y0);
      // Instantiating the source existential needs it in prefix position;
      // here the source keeps y inside the implication, so evaluate as is.
      ++rc.instances;
      bool s = holds(f, model);
      bool t = holds(instantiate(tgt, w), model);
      if (s && !t) {
        ++rc.violations;
        rc.notes.push_back("hip: source holds but target fails");
      }
    }
  }
  return rc;
}

inline RuleCheck check_ncr(const GroundModel& model) {
  using namespace detail;
  RuleCheck rc{"ncr"};
  Harness h{model, &rc};
  for (long long c = 0; c <= 6; ++c) {
    for (int wkind = 0; wkind < 2; ++wkind) {
      // (forall y)(exists-st x)[y <= x \/ y = c] with an external twist in
      // half the instances (st x as a conjunct is fine for NCR).
      std::string mat = wkind == 0
                            ? "(or (atom le0 y x) (atom eq0 y " +
                                  std::to_string(c) + "))"
                            : "(and (st x) (atom le0 (app monus y " +
                                  std::to_string(c) + ") x))";
      FormulaPtr f = desugar(parse_formula(
          "(forall y nat (exists-st x nat " + mat + "))"));
      WitnessMap w;
      w["x"] = lit(model.standard_cut);  // a standard cap
      StepRecord rec;
      RuleCtx cx = h.ctx(&w);
      FormulaPtr tgt;
      try {
        tgt = rule_ncr(f, cx, rec);
      } catch (const Error& e) {
        ++rc.violations;
        rc.notes.push_back(std::string("rule failed: ") + e.what());
        continue;
      }
      // Witnessed source instance, rebuilt from the matrix text with the
      // witness substituted for x.
      ++rc.instances;
      bool s;
      {
        ParamEnv env{{"x", FinType::nat()}};
        FormulaPtr inst = desugar(parse_formula("(forall y nat " + mat + ")", env));
        inst = subst_formula_param(inst, "x", lit(model.standard_cut));
        s = holds(inst, model);
      }
      bool t = holds(instantiate(tgt, w), model);
      if (s && !t) {
        ++rc.violations;
        rc.notes.push_back("ncr: source holds but target fails");
      }
    }
  }
  return rc;
}

inline RuleCheck check_overspill(const GroundModel& model) {
  using namespace detail;
  RuleCheck rc{"overspill"};
  Harness h{model, &rc};
  for (long long c = 0; c <= 8; ++c) {
    FormulaPtr f = desugar(parse_formula(
        "(forall-st n nat (atom le0 (app monus n n) " + std::to_string(c) +
        "))"));
    std::set<std::string> taints;
    WitnessMap w;
    StepRecord rec;
    RuleCtx cx = h.ctx(&w, &taints);
    ++rc.instances;
    FormulaPtr tgt;
    try {
      tgt = rule_overspill(f, cx, rec);
    } catch (const Error& e) {
      ++rc.violations;
      rc.notes.push_back(std::string("rule failed: ") + e.what());
      continue;
    }
    // No transformer: the step records provenance and taints its witness.
    bool shape = tgt->kind == Formula::Kind::Exists &&
                 tgt->a->kind == Formula::Kind::And &&
                 tgt->a->a->kind == Formula::Kind::Not;
    if (!shape || taints.empty()) {
      ++rc.violations;
      rc.notes.push_back("overspill: wrong target shape or missing taint");
    }
  }
  return rc;
}

inline RuleCheck check_underspill(const GroundModel& model) {
  using namespace detail;
  RuleCheck rc{"underspill"};
  Harness h{model, &rc};
  // Thresholds within the standard cut keep the model faithful.
  for (long long c = 0; c <= model.standard_cut; ++c) {
    FormulaPtr f = desugar(parse_formula(
        "(forall N nat (implies (in-omega N) (atom le0 " + std::to_string(c) +
        " N)))"));
    WitnessMap w;
    StepRecord rec;
    RuleCtx cx = h.ctx(&w);
    ++rc.instances;
    FormulaPtr tgt;
    try {
      tgt = rule_underspill(f, "n0", cx, rec);
    } catch (const Error& e) {
      ++rc.violations;
      rc.notes.push_back(std::string("rule failed: ") + e.what());
      continue;
    }
    bool s = holds(f, model);
    bool t = holds(tgt, model);  // the existential is enumerated directly
    if (s && !t) {
      ++rc.violations;
      rc.notes.push_back("underspill: threshold form fails at c=" +
                         std::to_string(c));
    }
  }
  return rc;
}

inline RuleCheck check_omega_nf(const GroundModel& model) {
  using namespace detail;
  RuleCheck rc{"omega-nf"};
  Harness h{model, &rc};
  for (long long c = 0; c <= 4; ++c) {
    FormulaPtr f = desugar(parse_formula(
        "(forall N nat (implies (in-omega N) (forall-st x nat "
        "(exists-st y nat (and (atom le0 (app monus x " + std::to_string(c) +
        ") y) (atom le0 (app monus x " + std::to_string(c) + ") N))))))"));
    WitnessMap w;
    StepRecord rec;
    RuleCtx cx = h.ctx(&w);
    ++rc.instances;
    FormulaPtr tgt;
    try {
      tgt = rule_omega_nf(f, {"l", "v"}, cx, rec);
    } catch (const Error& e) {
      ++rc.violations;
      rc.notes.push_back(std::string("rule failed: ") + e.what());
      continue;
    }
    // Schema and typing: the target is a certified normal form whose
    // candidate list has the sequence type.
    DetectResult det = detect_normal_form(tgt);
    bool ok = det.ok();
    if (ok) {
      bool has_l = false, has_v = false;
      for (auto& [n, t] : det.nf->exists_block) {
        if (t == FinType::nat()) has_l = true;
        if (t == FinType::seq(FinType::nat())) has_v = true;
      }
      ok = has_l && has_v;
      try {
        typecheck_formula(tgt);
      } catch (const Error&) {
        ok = false;
      }
    }
    if (!ok) {
      ++rc.violations;
      rc.notes.push_back("omega-nf: target not a typed threshold normal form");
    }
  }
  rc.notes.push_back(
      "threshold semantics exercised end to end by the ftc oracle");
  return rc;
}

inline RuleCheck check_omega_ca(const GroundModel& base_model) {
  using namespace detail;
  RuleCheck rc{"omega-ca"};
  // Omega must start above the largest stabilization bound of the fixture.
  GroundModel model = base_model;
  model.standard_cut = 6;
  model.nat_max = 13;
  Harness h{model, &rc};
  // F(x, n) stabilizes beyond b: F(x, n) = x + min(n, b + 1).
  for (long long b = 0; b <= 6; ++b) {
    std::string fb =
        "(lam a nat (lam n nat (app add a (app (lam h nat (app add (app mul h "
        "(app succ " + std::to_string(b) + ")) (app mul (app monus 1 h) n))) "
        "(app le (app succ " + std::to_string(b) + ") n)))))";
    // F(x,n) = x + (if b+1 <= n then b+1 else n)
    TermPtr F = typecheck_term(parse_term(fb)).term;
    TermPtr bound = typecheck_term(parse_term(
        "(lam a nat " + std::to_string(b + 1) + ")")).term;
    // Premise formula with the same F spelled inline.
    FormulaPtr prem;
    {
      ParamEnv env;
      MetaSupply metas;
      std::vector<std::pair<std::string, FinType>> scope;
      prem = desugar(parse_formula(
          "(forall-st x nat (forall N nat (forall M nat (implies "
          "(and (in-omega N) (in-omega M)) (atom eq0 (app " + fb +
          " x N) (app " + fb + " x M))))))"));
    }
    WitnessMap w;
    StepRecord rec;
    RuleCtx cx = h.ctx(&w);
    ++rc.instances;
    FormulaPtr tgt;
    try {
      tgt = rule_omega_ca(prem, F, bound, cx, rec);
    } catch (const Error& e) {
      ++rc.violations;
      rc.notes.push_back(std::string("rule failed: ") + e.what());
      continue;
    }
    if (w.size() != 1) {
      ++rc.violations;
      rc.notes.push_back("omega-ca: no witness composed");
      continue;
    }
    TermPtr G = w.begin()->second;
    // Matrix check: G(x) = F(x, N) for x <= 6 and every nonstandard N.
    bool ok = true;
    for (long long x = 0; x <= 6 && ok; ++x) {
      Fuel fuel;
      ValuePtr gx = apply_value(evaluate(G, fuel, {}), Value::nat_v(x), fuel);
      for (long long N = model.standard_cut + 1; N <= model.nat_max; ++N) {
        ValuePtr fxn = apply_value(
            apply_value(evaluate(F, fuel, {}), Value::nat_v(x), fuel),
            Value::nat_v(N), fuel);
        if (!value_equal(gx, fxn)) ok = false;
      }
    }
    if (!ok) {
      ++rc.violations;
      rc.notes.push_back("omega-ca: G disagrees with F on Omega at b=" +
                         std::to_string(b));
    }
  }
  return rc;
}

inline RuleCheck check_resolve_approx(const GroundModel& model) {
  using namespace detail;
  RuleCheck rc{"resolve-approx"};
  Harness h{model, &rc};
  // Def-2.14 shape at the real representation.
  {
    ++rc.instances;
    ParamEnv env{{"xr", type_real()}};
    FormulaPtr f = parse_formula("(approx xr xr (-> nat nat))", env);
    WitnessMap w;
    StepRecord rec;
    RuleCtx cx = h.ctx(&w);
    FormulaPtr out = rule_resolve_approx(desugar_keep_approx(f), "", {"n"}, cx, rec);
    auto v = match_forall_st(desugar(out));
    if (!v || v->body->kind != Formula::Kind::Atom ||
        v->body->rel != kRelCauchyClose) {
      ++rc.violations;
      rc.notes.push_back("resolve-approx: wrong Cauchy shape");
    }
  }
  // Instance truth at type nat: x ~ x becomes a true equation.
  for (long long x = 0; x <= model.nat_max; ++x) {
    ++rc.instances;
    FormulaPtr f = Formula::approx_eq(lit(x), lit(x), FinType::nat());
    WitnessMap w;
    StepRecord rec;
    RuleCtx cx = h.ctx(&w);
    FormulaPtr out = rule_resolve_approx(f, "", {}, cx, rec);
    if (!holds(out, model)) {
      ++rc.violations;
      rc.notes.push_back("resolve-approx: reflexive instance false");
    }
  }
  return rc;
}

inline RuleCheck check_nf_mp(const GroundModel& model) {
  using namespace detail;
  RuleCheck rc{"nf-mp"};
  // Identity implication: the composed transformer passes the witness
  // through; check the extracted statement instance on small inputs.
  auto scripts = parse_script_text(R"((script idmp
    (system P0)
    (track ant
      (assume (forall-st k nat (exists-st N nat (atom le0 k N))))
      (step hac-int (as gf))
      (step monotone-max N (as g)))
    (track con
      (assume (forall-st kp nat (exists-st Np nat (atom le0 kp Np)))))
    (combine nf-mp main (antecedents ant) (consequent con))
    (goal main
      (forall-st g (-> nat nat) (forall-st kp nat (exists-st k nat
        (exists-st Np nat
          (implies (atom le0 k (app g k)) (atom le0 kp Np)))))))))");
  ExtractedWitness ew = run_script(scripts[0]);
  TermPtr np;
  for (auto& [n, t] : ew.terms)
    if (n == "Np") np = t;
  for (long long c = 0; c <= 2; ++c) {
    // g(x) = x + c tables
    ValuePtr g = Value::native_v("g", [c](const ValuePtr& x) {
      return Value::nat_v(nat_of(x) + c);
    });
    for (long long kp = 0; kp <= model.nat_max; ++kp) {
      ++rc.instances;
      Fuel fuel;
      ValuePtr r = apply_value(apply_value(evaluate(np, fuel, {}), g, fuel),
                               Value::nat_v(kp), fuel);
      // Consequent instance: kp <= Np must hold whenever the antecedent
      // instance does (here the witness is g(kp) = kp + c >= kp).
      if (nat_of(r) < Nat(kp)) {
        ++rc.violations;
        rc.notes.push_back("nf-mp identity: witness below input");
      }
    }
  }
  return rc;
}

inline std::vector<RuleCheck> run_ground_checks(const GroundModel& model) {
  std::vector<RuleCheck> out;
  out.push_back(check_idealize_contra(model));
  out.push_back(check_hac_int(model));
  out.push_back(check_hgmp(model));
  out.push_back(check_hip(model));
  out.push_back(check_ncr(model));
  out.push_back(check_overspill(model));
  out.push_back(check_omega_nf(model));
  out.push_back(check_omega_ca(model));
  out.push_back(check_nf_mp(model));
  out.push_back(check_resolve_approx(model));
  out.push_back(check_monotone_max(model, false));
  out.push_back(check_monotone_max(model, true));   // bound-max variant
  out.push_back(check_underspill(model));
  return out;
}

}  // namespace nsx_ground
