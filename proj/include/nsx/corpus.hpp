#pragma once

#include <string>
#include <vector>

#include "nsx/harness.hpp"
#include "nsx/script.hpp"

namespace nsx {

// Translation-only run: executes the tracks and combines, checks the goal
// and certifies the normal form, without composing witnesses.
struct TranslationReport {
  NormalForm nf;
  bool goal_matched = false;
  std::vector<StepRecord> trace;
};
TranslationReport run_translation(const ProofScript& s);

struct CorpusCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct CorpusEntry {
  std::string name;
  std::vector<CorpusCheck> checks;
  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

struct CorpusOptions {
  std::string dir = "corpus";
  std::string filter;
  uint64_t seed = 1;
  long long trials = 500;
  long long mct_samples = 200;
  long long mutation_budget = 10000;
  long long fuel = 10'000'000;
};

struct CorpusSummary {
  std::vector<CorpusEntry> entries;
  std::vector<std::string> warnings;
  bool pass() const {
    for (const auto& e : entries)
      if (!e.pass()) return false;
    return true;
  }
};

CorpusSummary run_corpus(const CorpusOptions& opt);

}  // namespace nsx
