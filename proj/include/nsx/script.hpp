#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nsx/parser.hpp"
#include "nsx/rules.hpp"
#include "nsx/sst.hpp"

namespace nsx {

// One named rule application inside a track.  Term arguments are kept as
// S-expressions: they may mention engine-introduced functionals whose types
// only become known mid-run.
struct ScriptStep {
  std::string rule;
  std::vector<std::string> vars;  // monotone-max / bound-max targets
  std::string rel;                // resolve-approx distance relation
  std::vector<std::string> as_names;  // chosen names for introduced variables
  bool sampled = false;           // monotone-max sampled certificate
  std::optional<Sexpr> fn, stable_bound;  // omega-ca arguments
};

// A normalization track: a declared source formula and the ordered rule
// applications.  Witness declarations are ordered items too (rule name
// "witness"): they attach a witnessing term to a standard existential of the
// formula at that point of the derivation.
struct Track {
  std::string name;
  FormulaPtr assume;
  std::vector<ScriptStep> steps;
};

// An internally quantified object at the implication level of a combine.
struct InternalParam {
  std::string name;
  FinType type;
  FormulaPtr guard;  // optional, internal
};

// Normal-form modus ponens.  Antecedent tracks must already be in the
// Herbrandized shape (exists-st functionals)(forall-st inputs)(internal
// matrix) -- tracks reach it through hac-int and the maximum collapse.  The
// combine prenexes the implication, idealizes over the internal parameters
// and collapses/slackens the combined existential block per the declared
// modes.  The bridge carries the witnessing terms of the underlying
// internal implication.
struct CombineSpec {
  std::string name;
  std::vector<std::string> antecedents;
  std::string consequent;
  std::vector<InternalParam> internals;
  std::map<std::string, std::string> modes;  // var -> max|slacken|keep
  std::vector<std::pair<std::string, Sexpr>> bridge;
  std::string herb_mode = "unified-max";  // or "keep-tuple"
};

struct ProofScript {
  std::string name;
  std::string system = "P0";  // P | P0 | H
  long long dyadic_scale = -1;
  ParamEnv params;
  RelTable rels;
  std::vector<Track> tracks;
  std::vector<CombineSpec> combines;
  std::string goal_track;
  FormulaPtr goal;
  std::string source_path;
};

ProofScript parse_script(const Sexpr& e);
std::vector<ProofScript> parse_script_text(const std::string& text);
std::vector<ProofScript> load_scripts(const std::string& path);

// ---------------------------------------------------------------------------
// Extraction results

struct ExtractedWitness {
  std::string name;
  std::string system;
  bool herbrandised = false;
  NormalForm goal;
  // Closed witness terms, one per exists-block variable (empty block allowed).
  std::vector<std::pair<std::string, TermPtr>> terms;
  // Single-term view: the witness itself for one variable, a sequence tuple
  // for several nat-typed ones, null otherwise.
  TermPtr term;
  FormulaPtr statement;
  std::vector<StepRecord> trace;
  size_t term_nodes = 0;
  int steps = 0;
  std::vector<std::string> warnings;
};

ExtractedWitness run_script(const ProofScript& s);
ExtractedWitness herbrandise(const ProofScript& s);

struct ReverseReport {
  bool pass = false;
  std::vector<std::string> lines;
};

// Structural converse: marking the extracted term standard and re-relativizing
// the quantifiers must reproduce the plain goal normal form.
ReverseReport reverse_check(const ExtractedWitness& h, const ProofScript& s);

}  // namespace nsx
