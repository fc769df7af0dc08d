#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "nsx/formula.hpp"
#include "nsx/sst.hpp"
#include "nsx/typecheck.hpp"

namespace nsx {

// Witness terms for exists-st variables of the current assertion, keyed by
// binder hint (the engine keeps hints unique).  Terms may refer to other
// prefix variables through Param nodes named after their hints.
using WitnessMap = std::map<std::string, TermPtr>;

// One applied rewrite: rule name, the position it acted at, verified side
// conditions and the witness transformer instances it recorded.
struct StepRecord {
  std::string rule;
  std::string path;
  std::vector<std::string> side_conditions;
  std::vector<std::pair<std::string, std::string>> transformer;
  FormulaPtr source, target;
};

struct RuleCtx {
  const RelTable* rels = nullptr;
  int* counter = nullptr;  // fresh-hint supply shared by the whole run
  bool h_mode = false;     // restrict classically-valid-only moves
  WitnessMap* witnesses = nullptr;
  std::set<std::string>* taints = nullptr;

  std::string fresh(const std::string& base) const;
  const RelTable& rel_table() const;
};

// The leading block of relativized quantifiers of an assertion, opened into
// parameters named after the binder hints.
struct PrefixItem {
  bool universal;
  std::string hint;
  FinType type;
};
std::pair<std::vector<PrefixItem>, FormulaPtr> open_standard_prefix(
    const FormulaPtr& f);
FormulaPtr close_standard_prefix(const std::vector<PrefixItem>& prefix,
                                 const FormulaPtr& body);

// Structural prenexing of relativized quantifiers (classical moves only in
// P mode; the intuitionistically valid subset in H mode).
FormulaPtr rule_pull_st(const FormulaPtr& f, RuleCtx& ctx, StepRecord& rec);

// Expands approximate-equality nodes; `rel` optionally names the declared
// distance relation used at the real representation (default cauchy-close),
// and `names` the introduced precision variables in traversal order.
FormulaPtr rule_resolve_approx(const FormulaPtr& f, const std::string& rel,
                               const std::vector<std::string>& names,
                               RuleCtx& ctx, StepRecord& rec);

// Contraposed idealisation: standard existentials behind internal universals
// become a finite-sequence existential in front.
FormulaPtr rule_idealize_contra(const FormulaPtr& f, RuleCtx& ctx,
                                StepRecord& rec);

// Monotone collapse: replaces sequence-bounded existentials by the maximum
// of the sequence; requires the syntactic monotonicity certificate (or an
// explicitly requested sampled check, which flags rather than proves).
FormulaPtr rule_monotone_max(const FormulaPtr& f,
                             const std::vector<std::string>& vars,
                             const std::string& out_name, bool sampled,
                             RuleCtx& ctx, StepRecord& rec);

// Bounded weakening: (exists y in F(x))psi  ~>  (exists y <= g(x))psi with
// g the componentwise maximum; no monotonicity needed.
FormulaPtr rule_bound_max(const FormulaPtr& f,
                          const std::vector<std::string>& vars,
                          const std::string& out_name, RuleCtx& ctx,
                          StepRecord& rec);

// Herbrandized choice: (forall-st x)(exists-st y)phi gives a standard
// functional returning finite candidate sequences.
FormulaPtr rule_hac_int(const FormulaPtr& f,
                        const std::vector<std::string>& names, RuleCtx& ctx,
                        StepRecord& rec);

// The three constructive axioms.
FormulaPtr rule_hgmp_st(const FormulaPtr& f, RuleCtx& ctx, StepRecord& rec);
FormulaPtr rule_hip_forallst(const FormulaPtr& f, RuleCtx& ctx,
                             StepRecord& rec);
FormulaPtr rule_ncr(const FormulaPtr& f, RuleCtx& ctx, StepRecord& rec);

// Overspill; the produced witness is nonstandard and gets tainted.
FormulaPtr rule_overspill(const FormulaPtr& f, RuleCtx& ctx, StepRecord& rec);

// Derived: underspill at type 0 (least witness + standardness of the least).
// Emits the threshold form (exists-st n)(forall N >= n)phi(N).
FormulaPtr rule_underspill(const FormulaPtr& f, const std::string& out_name,
                           RuleCtx& ctx, StepRecord& rec);

// Unfolds in-omega guards: (not st(N)) -> phi becomes
// ((forall-st m)(m <= N)) -> phi, turning the guard internal-ready for
// prenexing and idealisation.
FormulaPtr rule_omega_unfold(const FormulaPtr& f,
                             const std::vector<std::string>& names,
                             RuleCtx& ctx, StepRecord& rec);

// Omega-prefixed normal form: (forall N in Omega)(forall-st x)(exists-st y)
// phi(x,y,N) gets the equivalent threshold normal form.
FormulaPtr rule_omega_nf(const FormulaPtr& f,
                         const std::vector<std::string>& names, RuleCtx& ctx,
                         StepRecord& rec);

// Omega-CA macro over an invariance premise; `fn` is the nonstandard object
// F and `stable_bound` the script-supplied stabilization bound b(x).
FormulaPtr rule_omega_ca(const FormulaPtr& f, const TermPtr& fn,
                         const TermPtr& stable_bound, RuleCtx& ctx,
                         StepRecord& rec);

}  // namespace nsx
