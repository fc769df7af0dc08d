#include <algorithm>
#include <functional>
#include <optional>

#include "nsx/error.hpp"
#include "nsx/monotone.hpp"
#include "nsx/parser.hpp"
#include "nsx/script.hpp"
#include "nsx/corpus.hpp"
#include "nsx/typecheck.hpp"

namespace nsx {

namespace {

constexpr size_t kTermSizeCap = 100000;

TermPtr lambda_close(TermPtr t,
                     const std::vector<std::pair<std::string, FinType>>& xs) {
  for (size_t i = xs.size(); i-- > 0;)
    t = Term::lam(xs[i].first, xs[i].second, abstract_param(t, xs[i].first, 0));
  return t;
}

TermPtr singleton_seq(const TermPtr& elem, const FinType& ty) {
  return Term::apps(Term::cnst("cons", const_type("cons", ty)),
                    {elem, Term::cnst("empty", const_type("empty", ty))});
}

struct TrackState {
  FormulaPtr formula;
  WitnessMap witnesses;
};

// Normal-form view with blocks opened to parameters.
struct NFView {
  std::vector<std::pair<std::string, FinType>> fa, ex;
  FormulaPtr matrix;
};

NFView nf_view(const FormulaPtr& f, const std::string& what) {
  auto [prefix, body] = open_standard_prefix(f);
  NFView v;
  bool seen_ex = false;
  for (auto& p : prefix) {
    if (p.universal) {
      if (seen_ex)
        throw ScriptError(what + ": standard quantifier blocks out of order");
      v.fa.emplace_back(p.hint, p.type);
    } else {
      seen_ex = true;
      v.ex.emplace_back(p.hint, p.type);
    }
  }
  if (!is_internal(body))
    throw ScriptError(what + ": matrix is not internal: " + print_formula(body));
  v.matrix = body;
  return v;
}

struct CombineInfo {
  std::vector<std::pair<std::string, FinType>> forall_vars;
  std::vector<std::pair<std::string, FinType>> herb_vars;  // from the antecedents
  std::vector<std::pair<std::string, FinType>> cons_ex;
  const CombineSpec* spec = nullptr;
  FormulaPtr pre_mode_formula;  // after idealisation, before collapse modes
  std::string unified_hint;     // herbrandise unified-max variable
};

struct Pipeline {
  const ProofScript& s;
  bool herb;
  int counter = 0;
  std::set<std::string> used_names;
  std::set<std::string> taints;
  std::map<std::string, TrackState> states;
  std::vector<StepRecord> trace;
  std::optional<CombineInfo> last_combine;

  Pipeline(const ProofScript& script, bool herb_mode)
      : s(script), herb(herb_mode) {
    for (const auto& [n, t] : s.params) used_names.insert(n);
  }

  RuleCtx mk_ctx(WitnessMap* w) {
    RuleCtx c;
    c.rels = &s.rels;
    c.counter = &counter;
    c.h_mode = (s.system == "H");
    c.witnesses = w;
    c.taints = &taints;
    return c;
  }

  TermPtr parse_in_env(const Sexpr& e, const ParamEnv& extra) {
    ParamEnv env = s.params;
    for (const auto& [n, t] : extra) env[n] = t;
    MetaSupply metas;
    std::vector<std::pair<std::string, FinType>> scope;
    TermPtr t = parse_term(e, env, metas, scope);
    return typecheck_term(t).term;
  }

  void check(const FormulaPtr& f, const char* where) {
    try {
      typecheck_formula(f, s.rels);
    } catch (const Error& err) {
      throw ScriptError(std::string(where) + ": result fails to typecheck: " +
                        err.what());
    }
  }

  void run_track(const Track& t) {
    FormulaPtr f = desugar_keep_approx(t.assume);
    f = uniquify_hints(f, used_names);
    typecheck_formula(f, s.rels);
    TrackState st;
    st.formula = f;
    int stepno = 0;
    for (const auto& step : t.steps) {
      ++stepno;
      StepRecord rec;
      try {
        if (step.rule == "witness") {
          seed_witness(step, st);
          rec.rule = "witness";
          rec.transformer.emplace_back(step.vars[0],
                                       print_term(st.witnesses[step.vars[0]]));
        } else {
          RuleCtx ctx = mk_ctx(&st.witnesses);
          st.formula = apply_step(step, st.formula, ctx, rec);
          check(st.formula, "step");
        }
      } catch (const Error& e) {
        throw StepMismatch(stepno, "track " + t.name + ", rule " + step.rule +
                                       ": " + e.what());
      }
      rec.path = "track " + t.name;
      trace.push_back(std::move(rec));
    }
    states[t.name] = std::move(st);
  }

  void seed_witness(const ScriptStep& step, TrackState& st) {
    const std::string& var = step.vars.at(0);
    auto [prefix, body] = open_standard_prefix(st.formula);
    ParamEnv env;
    std::map<std::string, FinType> exty;
    for (const auto& p : prefix) {
      if (p.universal)
        env[p.hint] = p.type;
      else
        exty[p.hint] = p.type;
    }
    auto it = exty.find(var);
    if (it == exty.end())
      throw ScriptError("witness for unknown existential '" + var + "'");
    TermPtr w = parse_in_env(*step.fn, env);
    FinType got = typecheck_term(w).type;
    if (got != it->second)
      throw TypeMismatch("witness for " + var + " has type " +
                         got.to_string() + ", expected " +
                         it->second.to_string());
    st.witnesses[var] = w;
  }

  FormulaPtr apply_step(const ScriptStep& step, const FormulaPtr& f,
                        RuleCtx& ctx, StepRecord& rec) {
    const std::string& r = step.rule;
    if (r == "pull-st") return rule_pull_st(f, ctx, rec);
    if (r == "resolve-approx")
      return rule_resolve_approx(f, step.rel, step.as_names, ctx, rec);
    if (r == "idealize-contra") return rule_idealize_contra(f, ctx, rec);
    if (r == "monotone-max")
      return rule_monotone_max(
          f, step.vars, step.as_names.empty() ? "" : step.as_names[0],
          step.sampled, ctx, rec);
    if (r == "bound-max")
      return rule_bound_max(f, step.vars,
                            step.as_names.empty() ? "" : step.as_names[0], ctx,
                            rec);
    if (r == "hac-int") return rule_hac_int(f, step.as_names, ctx, rec);
    if (r == "hgmp-st") return rule_hgmp_st(f, ctx, rec);
    if (r == "hip-forallst") return rule_hip_forallst(f, ctx, rec);
    if (r == "ncr") return rule_ncr(f, ctx, rec);
    if (r == "overspill") return rule_overspill(f, ctx, rec);
    if (r == "underspill")
      return rule_underspill(f, step.as_names.empty() ? "" : step.as_names[0],
                             ctx, rec);
    if (r == "omega-unfold") return rule_omega_unfold(f, step.as_names, ctx, rec);
    if (r == "fix") {
      // Promote a leading standard existential to a free parameter ("let g
      // be such that ..."); the goal then reads it as a script parameter.
      if (step.vars.empty()) throw ScriptError("fix: no variable named");
      const std::string& var = step.vars[0];
      auto pit = s.params.find(var);
      if (pit == s.params.end())
        throw ScriptError("fix: declare (param " + var +
                          " ...) so the goal can mention it");
      auto [prefix, body] = open_standard_prefix(f);
      if (prefix.empty() || prefix.front().universal ||
          prefix.front().hint != var)
        throw PatternMismatch("fix: '" + var +
                              "' is not the leading standard existential");
      if (prefix.front().type != pit->second)
        throw TypeMismatch("fix: declared parameter type " +
                           pit->second.to_string() + " does not match " +
                           prefix.front().type.to_string());
      std::vector<PrefixItem> rest(prefix.begin() + 1, prefix.end());
      rec.rule = "fix";
      rec.side_conditions.push_back("standard witness '" + var +
                                    "' fixed as a parameter");
      rec.source = f;
      FormulaPtr out = close_standard_prefix(rest, body);
      rec.target = out;
      return out;
    }
    if (r == "omega-nf") return rule_omega_nf(f, step.as_names, ctx, rec);
    if (r == "omega-ca") {
      if (!step.fn || !step.stable_bound)
        throw CertificateMissing("omega-ca needs (fn F) and (bound b)");
      TermPtr fn = parse_in_env(*step.fn, {});
      TermPtr b = parse_in_env(*step.stable_bound, {});
      return rule_omega_ca(f, fn, b, ctx, rec);
    }
    throw ScriptError("unknown rule '" + r + "'");
  }

  // Removes the sequence bound of an idealized existential, forgetting the
  // candidate list.
  FormulaPtr slacken(const FormulaPtr& f, const std::string& var,
                     WitnessMap& wit, StepRecord& rec) {
    auto [prefix, body0] = open_standard_prefix(f);
    // Walk to the bounded existential with this hint.
    std::function<std::optional<FormulaPtr>(const FormulaPtr&)> go =
        [&](const FormulaPtr& g) -> std::optional<FormulaPtr> {
      if (auto v = match_bounded_exists(g)) {
        if (v->hint == var) {
          if (v->bound->kind != Term::Kind::Param)
            throw PatternMismatch("slacken: bound of " + var +
                                  " is not a prefix variable");
          return Formula::exists(v->hint, v->type, v->body);
        }
        auto inner = go(v->body);
        if (!inner) return std::nullopt;
        return bounded_exists(v->hint, v->type, v->bound, *inner);
      }
      switch (g->kind) {
        case Formula::Kind::ForAll:
          if (auto inner = go(g->a))
            return Formula::forall(g->name, g->type, *inner);
          return std::nullopt;
        case Formula::Kind::Exists:
          if (auto inner = go(g->a))
            return Formula::exists(g->name, g->type, *inner);
          return std::nullopt;
        case Formula::Kind::Implies:
          if (auto inner = go(g->b))
            return Formula::implies(g->a, *inner);
          return std::nullopt;
        default:
          return std::nullopt;
      }
    };
    // Identify the sequence variable feeding the bound before rewriting.
    std::string seq_var;
    {
      std::function<void(const FormulaPtr&)> find = [&](const FormulaPtr& g) {
        if (auto v = match_bounded_exists(g)) {
          if (v->hint == var && v->bound->kind == Term::Kind::Param)
            seq_var = v->bound->name;
          find(v->body);
          return;
        }
        switch (g->kind) {
          case Formula::Kind::ForAll:
          case Formula::Kind::Exists:
            find(g->a);
            return;
          case Formula::Kind::Implies:
            find(g->b);
            return;
          default:
            return;
        }
      };
      find(body0);
    }
    auto rewritten = go(body0);
    if (!rewritten)
      throw PatternMismatch("slacken: no bounded existential '" + var + "'");
    std::vector<PrefixItem> newpref;
    for (const auto& p : prefix)
      if (p.hint != seq_var) newpref.push_back(p);
    wit.erase(seq_var);
    FormulaPtr out = close_standard_prefix(newpref, *rewritten);
    rec.rule = "nf-mp/slacken";
    rec.side_conditions.push_back("candidate list for " + var + " forgotten");
    rec.source = f;
    rec.target = out;
    return out;
  }

  void run_combine(const CombineSpec& c) {
    std::vector<const TrackState*> ants;
    for (const auto& an : c.antecedents) {
      auto it = states.find(an);
      if (it == states.end())
        throw ScriptError("combine " + c.name + ": unknown track " + an);
      ants.push_back(&it->second);
    }
    auto itc = states.find(c.consequent);
    if (itc == states.end())
      throw ScriptError("combine " + c.name + ": unknown track " + c.consequent);

    // Antecedents come in the Herbrandized shape
    // (exists-st functionals)(forall-st inputs)(internal matrix).
    struct AntView {
      std::vector<std::pair<std::string, FinType>> g, x;
      FormulaPtr matrix;
    };
    std::vector<AntView> antv;
    for (size_t i = 0; i < ants.size(); ++i) {
      auto [prefix, body] = open_standard_prefix(ants[i]->formula);
      AntView av;
      bool in_fa = false;
      for (const auto& p : prefix) {
        if (!p.universal) {
          if (in_fa)
            throw ScriptError("combine antecedent " + c.antecedents[i] +
                              ": existentials must precede the universal "
                              "block (run hac-int in the track first)");
          av.g.emplace_back(p.hint, p.type);
        } else {
          in_fa = true;
          av.x.emplace_back(p.hint, p.type);
        }
      }
      if (!is_internal(body))
        throw ScriptError("combine antecedent " + c.antecedents[i] +
                          ": matrix is not internal");
      av.matrix = body;
      antv.push_back(std::move(av));
    }
    NFView consv = nf_view(itc->second.formula, "combine consequent " + c.consequent);

    CombineInfo info;
    info.spec = &c;
    StepRecord rec;
    rec.rule = "nf-mp";
    rec.path = "combine " + c.name;

    FormulaPtr ant_conj;
    for (size_t i = 0; i < antv.size(); ++i) {
      for (const auto& gv : antv[i].g) info.forall_vars.push_back(gv);
      for (const auto& xv : antv[i].x) info.herb_vars.push_back(xv);
      ant_conj = ant_conj ? Formula::conj(ant_conj, antv[i].matrix)
                          : antv[i].matrix;
      rec.side_conditions.push_back(
          "antecedent " + c.antecedents[i] + ": " +
          std::to_string(antv[i].g.size()) + " functionals, " +
          std::to_string(antv[i].x.size()) + " Herbrand inputs");
    }
    for (const auto& [xn, xt] : consv.fa) info.forall_vars.emplace_back(xn, xt);
    info.cons_ex = consv.ex;

    FormulaPtr matrix = Formula::implies(ant_conj, consv.matrix);

    // Close: forall-st block, internal parameters, exists-st block, matrix.
    std::vector<PrefixItem> expart;
    for (const auto& [n, t] : info.herb_vars) expart.push_back({false, n, t});
    for (const auto& [n, t] : info.cons_ex) expart.push_back({false, n, t});
    FormulaPtr body = close_standard_prefix(expart, matrix);
    for (size_t i = c.internals.size(); i-- > 0;) {
      const auto& ip = c.internals[i];
      FormulaPtr inner = body;
      if (ip.guard) inner = Formula::implies(ip.guard, inner);
      body = Formula::forall(ip.name, ip.type,
                             abstract_param(inner, ip.name, 0));
    }
    std::vector<PrefixItem> fapart;
    for (const auto& [n, t] : info.forall_vars) fapart.push_back({true, n, t});
    FormulaPtr f = close_standard_prefix(fapart, body);
    check(f, "combine");

    // Bridge witnesses for the combined existential block.
    TrackState st;
    ParamEnv benv;
    for (const auto& [n, t] : info.forall_vars) benv[n] = t;
    std::map<std::string, FinType> exty;
    for (const auto& [n, t] : info.herb_vars) exty[n] = t;
    for (const auto& [n, t] : info.cons_ex) exty[n] = t;
    if (!c.bridge.empty()) {
      for (const auto& [var, se] : c.bridge) {
        auto it = exty.find(var);
        if (it == exty.end())
          throw ScriptError("bridge names unknown variable '" + var + "'");
        TermPtr b = parse_in_env(se, benv);
        FinType got = typecheck_term(b).type;
        if (got != it->second)
          throw TypeMismatch("bridge term for " + var + " has type " +
                             got.to_string() + ", expected " +
                             it->second.to_string());
        st.witnesses[var] = b;
        rec.transformer.emplace_back(var, print_term(b));
      }
    } else if (ants.size() == 1 && antv[0].x.size() == consv.fa.size() &&
               antv[0].g.size() == consv.ex.size()) {
      // Identity implication: pass the inputs straight through and read the
      // witness off the Herbrandized functional.
      bool ok = true;
      for (size_t j = 0; j < antv[0].x.size(); ++j)
        if (antv[0].x[j].second != consv.fa[j].second) ok = false;
      if (ok) {
        for (size_t j = 0; j < info.herb_vars.size(); ++j) {
          st.witnesses[info.herb_vars[j].first] =
              Term::param(consv.fa[j].first, consv.fa[j].second);
          rec.transformer.emplace_back(
              info.herb_vars[j].first,
              print_term(st.witnesses[info.herb_vars[j].first]));
        }
        for (size_t j = 0; j < info.cons_ex.size(); ++j) {
          TermPtr app = Term::param(antv[0].g[j].first, antv[0].g[j].second);
          for (const auto& [xn, xt] : consv.fa)
            app = Term::app(app, Term::param(xn, xt));
          if (antv[0].g[j].second.final_codomain().is_seq())
            app = t_maxnat(app);
          st.witnesses[info.cons_ex[j].first] = app;
          rec.transformer.emplace_back(info.cons_ex[j].first, print_term(app));
        }
      }
    }

    rec.source = Formula::implies(ants[0]->formula, itc->second.formula);
    rec.target = f;
    trace.push_back(rec);

    WitnessMap bridge_wit = st.witnesses;  // pre-idealisation components

    // Idealize over the internal parameters.  The classical route goes
    // through the contraposition of idealisation; in H the same shape comes
    // from ncr.
    if (!c.internals.empty()) {
      RuleCtx ctx = mk_ctx(&st.witnesses);
      StepRecord irec;
      f = (s.system == "H") ? rule_ncr(f, ctx, irec)
                            : rule_idealize_contra(f, ctx, irec);
      irec.path = "combine " + c.name;
      check(f, "combine idealisation");
      trace.push_back(std::move(irec));
    }
    info.pre_mode_formula = f;

    if (!herb) {
      // Collapse consequent witnesses first; slackening a Herbrand input
      // earlier would bury later bounded existentials under a plain one.
      for (const auto& [n, t] : info.cons_ex) apply_mode(c, n, f, st);
      for (const auto& [n, t] : info.herb_vars) apply_mode(c, n, f, st);
    } else if (c.herb_mode == "unified-max") {
      st.witnesses = bridge_wit;
      f = build_unified_max(c, info, consv, ant_conj, st);
    }
    // keep-tuple: the pre-mode formula is already the herbrandised form.

    st.formula = f;
    states[c.name] = std::move(st);
    last_combine = info;
    if (herb && c.herb_mode == "unified-max")
      last_combine->unified_hint = unified_hint_;
  }

  void apply_mode(const CombineSpec& c, const std::string& var, FormulaPtr& f,
                  TrackState& st) {
    auto it = c.modes.find(var);
    if (it == c.modes.end() || it->second == "keep") return;
    RuleCtx ctx = mk_ctx(&st.witnesses);
    StepRecord rec;
    if (it->second == "max") {
      if (c.internals.empty()) return;  // nothing idealized to collapse
      f = rule_monotone_max(f, {var}, var, false, ctx, rec);
    } else if (it->second == "slacken") {
      if (c.internals.empty()) return;
      f = slacken(f, var, st.witnesses, rec);
    } else {
      throw ScriptError("unknown collapse mode '" + it->second + "' for " + var);
    }
    rec.path = "combine " + c.name;
    check(f, "collapse mode");
    trace.push_back(std::move(rec));
  }

  std::string unified_hint_;

  FormulaPtr build_unified_max(const CombineSpec& c, CombineInfo& info,
                               const NFView& consv, const FormulaPtr& ant_conj,
                               TrackState& st) {
    // All combined existentials must be naturals and the consequent matrix
    // monotone in its witnesses.
    for (const auto& [n, t] : info.herb_vars)
      if (t != FinType::nat())
        throw ShapeMismatch("unified-max herbrandisation needs nat variables; " +
                            n + " has type " + t.to_string());
    for (const auto& [n, t] : info.cons_ex) {
      if (t != FinType::nat())
        throw ShapeMismatch("unified-max herbrandisation needs nat variables; " +
                            n + " has type " + t.to_string());
      if (!monotone_up(abstract_param(consv.matrix, n, 0), 0, s.rels))
        throw MonotonicityNotEstablished(
            "unified-max: consequent not monotone in " + n);
    }
    std::string sv;
    {
      RuleCtx ctx = mk_ctx(nullptr);
      sv = ctx.fresh("s");
    }
    unified_hint_ = sv;
    TermPtr sp = Term::param(sv, FinType::nat());
    // Bounded antecedent: each Herbrand variable ranges below s.
    FormulaPtr ant = ant_conj;
    for (size_t j = info.herb_vars.size(); j-- > 0;) {
      const auto& [kn, kt] = info.herb_vars[j];
      FormulaPtr guard =
          Formula::atom(kRelLe0, {Term::var(0, kn), shift_term(sp, 1)});
      ant = Formula::forall(kn, kt,
                            Formula::implies(guard, abstract_param(ant, kn, 0)));
    }
    FormulaPtr cons = consv.matrix;
    for (const auto& [n, t] : info.cons_ex)
      cons = subst_formula_param(cons, n, sp);
    FormulaPtr matrix = Formula::implies(ant, cons);
    FormulaPtr body = matrix;
    for (size_t i = c.internals.size(); i-- > 0;) {
      const auto& ip = c.internals[i];
      FormulaPtr inner = body;
      if (ip.guard) inner = Formula::implies(ip.guard, inner);
      body = Formula::forall(ip.name, ip.type,
                             abstract_param(inner, ip.name, 0));
    }
    std::vector<PrefixItem> pref;
    for (const auto& [n, t] : info.forall_vars) pref.push_back({true, n, t});
    pref.push_back({false, sv, FinType::nat()});
    FormulaPtr f = close_standard_prefix(pref, body);
    check(f, "herbrandise unified-max");

    // Witness: the maximum over every bridge component.
    std::vector<TermPtr> comps;
    for (const auto& [n, t] : info.herb_vars) {
      auto it = st.witnesses.find(n);
      if (it == st.witnesses.end())
        throw CertificateMissing("herbrandise: no bridge term for " + n);
      comps.push_back(it->second);
    }
    for (const auto& [n, t] : info.cons_ex) {
      auto it = st.witnesses.find(n);
      if (it == st.witnesses.end())
        throw CertificateMissing("herbrandise: no bridge term for " + n);
      comps.push_back(it->second);
    }
    TermPtr list = Term::cnst("empty", const_type("empty", FinType::nat()));
    for (size_t i = comps.size(); i-- > 0;)
      list = Term::apps(Term::cnst("cons", const_type("cons", FinType::nat())),
                        {comps[i], list});
    WitnessMap wm;
    wm[sv] = t_maxnat(list);
    st.witnesses = std::move(wm);

    StepRecord rec;
    rec.rule = "nf-mp/herbrandise";
    rec.path = "combine " + c.name;
    rec.side_conditions.push_back(
        "unified bound: antecedent instances kept below the extracted term");
    rec.transformer.emplace_back(sv, print_term(st.witnesses[sv]));
    rec.target = f;
    trace.push_back(std::move(rec));
    return f;
  }

  void run() {
    for (const auto& t : s.tracks) run_track(t);
    for (const auto& c : s.combines) run_combine(c);
  }

  ExtractedWitness extract() {
    auto it = states.find(s.goal_track);
    if (it == states.end())
      throw ScriptError("goal track '" + s.goal_track + "' was never produced");
    const TrackState& st = it->second;

    if (!herb && s.goal) {
      FormulaPtr want = desugar(s.goal);
      typecheck_formula(want, s.rels);
      if (!alpha_equal(desugar(st.formula), want))
        throw GoalShapeMismatch("final formula\n  " +
                                print_formula(st.formula) +
                                "\ndoes not match the declared goal\n  " +
                                print_formula(want));
    }

    DetectResult det = detect_normal_form(st.formula);
    if (!det.ok())
      throw GoalShapeMismatch("final formula is not a normal form: " +
                              det.reason + " at " + det.path);

    ExtractedWitness ew;
    ew.name = s.name;
    ew.system = s.system;
    ew.herbrandised = herb;
    ew.goal = *det.nf;
    ew.trace = trace;
    ew.steps = static_cast<int>(trace.size());

    const auto& fa = ew.goal.forall_block;
    for (const auto& [hint, ty] : ew.goal.exists_block) {
      auto w = st.witnesses.find(hint);
      if (w == st.witnesses.end())
        throw CertificateMissing(
            "no witness term composed for existential '" + hint +
            "'; supply a (witness ...) or a (bridge ...)");
      if (taints.count(hint))
        throw TaintedWitness("existential '" + hint +
                             "' was produced by overspill");
      std::set<std::string> ps;
      collect_params(w->second, ps);
      for (const auto& p : ps) {
        if (taints.count(p))
          throw TaintedWitness("witness for '" + hint +
                               "' mentions nonstandard '" + p + "'");
      }
      TermPtr closed = lambda_close(w->second, fa);
      if (!is_closed_term(closed))
        throw ScriptError("witness for '" + hint +
                          "' is not closed after abstraction: " +
                          print_term(closed));
      FinType want = ty;
      for (size_t i = fa.size(); i-- > 0;)
        want = FinType::arrow(fa[i].second, want);
      FinType got = typecheck_term(closed).type;
      if (got != want)
        throw TypeMismatch("witness for " + hint + " has type " +
                           got.to_string() + ", expected " + want.to_string());
      if (term_size(closed) > kTermSizeCap)
        throw ScriptError("extracted term exceeds the size cap");
      ew.terms.emplace_back(hint, closed);
      ew.term_nodes += term_size(closed);
    }

    // Single-term view.
    if (ew.terms.size() == 1) {
      ew.term = ew.terms[0].second;
    } else if (!ew.terms.empty()) {
      bool all_nat = true;
      for (const auto& [n, t] : ew.goal.exists_block)
        if (t != FinType::nat()) all_nat = false;
      if (all_nat) {
        // Tuple as a sequence, components in block order.
        TermPtr list = Term::cnst("empty", const_type("empty", FinType::nat()));
        for (size_t i = ew.terms.size(); i-- > 0;) {
          TermPtr applied = ew.terms[i].second;
          std::vector<TermPtr> vars;
          for (size_t j = 0; j < fa.size(); ++j)
            vars.push_back(Term::param(fa[j].first, fa[j].second));
          applied = Term::apps(applied, vars);
          list = Term::apps(
              Term::cnst("cons", const_type("cons", FinType::nat())),
              {applied, list});
        }
        ew.term = lambda_close(list, fa);
      }
    }

    ew.statement = build_statement(st, ew);
    check(ew.statement, "statement");
    if (!is_internal(ew.statement))
      throw ScriptError("extracted statement is not internal");

    if (s.system == "P0") {
      std::function<void(const TermPtr&)> scan = [&](const TermPtr& t) {
        if (!t) return;
        if (t->kind == Term::Kind::Const && t->name == "rec") {
          FinType at = t->type.cod().dom();
          if (at != FinType::nat())
            ew.warnings.push_back(
                "P0 advisory: recursor at type " + at.to_string() +
                " appears in an extracted term (beyond primitive recursion "
                "on nat)");
        }
        scan(t->fn);
        scan(t->arg);
        scan(t->body);
      };
      for (const auto& [n, t] : ew.terms) scan(t);
    }
    return ew;
  }

  FormulaPtr build_statement(const TrackState& st, const ExtractedWitness& ew) {
    auto [prefix, body] = open_standard_prefix(st.formula);
    // body has block variables as parameters.
    FormulaPtr stmt = body;
    if (herb && last_combine && last_combine->spec->herb_mode == "unified-max") {
      // Direct substitution: the bounded-antecedent display.
      for (const auto& [hint, term] : ew.terms) {
        TermPtr applied = term;
        for (const auto& [fn, ft] : ew.goal.forall_block)
          applied = Term::app(applied, Term::param(fn, ft));
        stmt = subst_formula_param(stmt, hint, applied);
      }
    } else {
      // eq-(2.3) display: existentials bounded by the extracted candidate
      // sequences.
      for (size_t i = ew.terms.size(); i-- > 0;) {
        const auto& [hint, term] = ew.terms[i];
        const FinType& ty = ew.goal.exists_block[i].second;
        TermPtr bound_term = term;
        bool already_seq = ty.is_seq();
        if (!already_seq) {
          // Wrap the scalar witness into a singleton candidate list.
          TermPtr inner = term;
          std::vector<std::pair<std::string, FinType>> fas =
              ew.goal.forall_block;
          std::vector<TermPtr> vars;
          for (const auto& [fn, ft] : fas)
            vars.push_back(Term::param(fn, ft));
          TermPtr applied = Term::apps(inner, vars);
          bound_term = lambda_close(singleton_seq(applied, ty), fas);
        }
        TermPtr applied = bound_term;
        for (const auto& [fn, ft] : ew.goal.forall_block)
          applied = Term::app(applied, Term::param(fn, ft));
        if (already_seq) {
          // The variable is itself the candidate sequence; bind it to the
          // extracted term by direct substitution.
          stmt = subst_formula_param(stmt, hint, applied);
        } else {
          stmt = bounded_exists(hint, ty, applied,
                                abstract_param(stmt, hint, 0));
        }
      }
    }
    for (size_t i = ew.goal.forall_block.size(); i-- > 0;) {
      const auto& [fn, ft] = ew.goal.forall_block[i];
      stmt = Formula::forall(fn, ft, abstract_param(stmt, fn, 0));
    }
    return stmt;
  }
};

}  // namespace

ExtractedWitness run_script(const ProofScript& s) {
  Pipeline p(s, false);
  p.run();
  return p.extract();
}

ExtractedWitness herbrandise(const ProofScript& s) {
  Pipeline p(s, true);
  p.run();
  return p.extract();
}

TranslationReport run_translation(const ProofScript& s) {
  Pipeline p(s, false);
  p.run();
  auto it = p.states.find(s.goal_track);
  if (it == p.states.end())
    throw ScriptError("goal track '" + s.goal_track + "' was never produced");
  TranslationReport tr;
  tr.trace = p.trace;
  tr.goal_matched = true;
  if (s.goal) {
    FormulaPtr want = desugar(s.goal);
    typecheck_formula(want, s.rels);
    tr.goal_matched = alpha_equal(desugar(it->second.formula), want);
  }
  DetectResult det = detect_normal_form(it->second.formula);
  if (!det.ok())
    throw GoalShapeMismatch("final formula is not a normal form: " +
                            det.reason + " at " + det.path);
  typecheck_formula(it->second.formula, s.rels);
  tr.nf = *det.nf;
  return tr;
}

ReverseReport reverse_check(const ExtractedWitness& h, const ProofScript& s) {
  ReverseReport rep;
  auto line = [&](bool ok, const std::string& what) {
    rep.lines.push_back(std::string(ok ? "pass" : "FAIL") + ": " + what);
    if (!ok) rep.pass = false;
  };
  rep.pass = true;

  // 1. Every extracted component is a closed term of the internal language,
  //    hence standard once re-read inside the nonstandard system.
  bool closed = !h.terms.empty() || h.goal.exists_block.empty();
  for (const auto& [n, t] : h.terms)
    if (!is_closed_term(t)) closed = false;
  line(closed, "extracted components are closed internal terms (standard)");

  // 2. Replay: applying the plain collapse modes to the herbrandised
  //    pre-collapse formula reproduces the declared goal normal form.
  try {
    Pipeline plain(s, false);
    plain.run();
    plain.extract();  // anchors the goal check
    if (!s.combines.empty()) {
      Pipeline hp(s, true);
      hp.run();
      if (!hp.last_combine)
        throw ShapeMismatch("no combine information recorded");
      FormulaPtr replay = hp.last_combine->pre_mode_formula;
      const CombineSpec& c = *hp.last_combine->spec;
      TrackState tmp;
      for (const auto& [n, t] : hp.last_combine->cons_ex)
        hp.apply_mode(c, n, replay, tmp);
      for (const auto& [n, t] : hp.last_combine->herb_vars)
        hp.apply_mode(c, n, replay, tmp);
      bool match =
          alpha_equal(desugar(replay),
                      desugar(plain.states.at(s.goal_track).formula));
      line(match,
           "re-relativized (st-marked) herbrandisation re-brackets to the "
           "goal normal form");
    } else {
      line(alpha_equal(h.statement, run_script(s).statement),
           "no combine step: herbrandisation equals plain extraction");
    }
    // 3. The bounded antecedent (unified-max mode) references the extracted
    //    component.
    if (!s.combines.empty() &&
        s.combines.back().herb_mode == "unified-max" && h.herbrandised) {
      bool found = false;
      std::function<void(const FormulaPtr&)> scan = [&](const FormulaPtr& g) {
        if (g->kind == Formula::Kind::Atom && g->rel == kRelLe0 &&
            g->args.size() == 2)
          found = true;  // guard shape present
        switch (g->kind) {
          case Formula::Kind::Not:
            scan(g->a);
            return;
          case Formula::Kind::And:
          case Formula::Kind::Or:
          case Formula::Kind::Implies:
            scan(g->a);
            scan(g->b);
            return;
          case Formula::Kind::ForAll:
          case Formula::Kind::Exists:
            scan(g->a);
            return;
          default:
            return;
        }
      };
      scan(h.statement);
      line(found && h.terms.size() == 1,
           "bounded antecedent references a component of the extracted term");
    }
  } catch (const Error& e) {
    line(false, std::string("replay failed: ") + e.what());
  }
  return rep;
}

}  // namespace nsx
