#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "porlab/translate.hpp"

namespace porlab {

inline constexpr const char* kStageNames[6] = {"por",    "sifp_ra", "sifp_la",
                                               "od_stm", "h_stm",   "ptm"};

// the six exact output distributions of a bundle on one input tuple
std::vector<Distribution> stage_distributions(const PipelineBundle& b,
                                              const std::vector<BitString>& input,
                                              long long fuel = kDefaultFuel);

// first witness of a stage disagreement
struct StageDivergence {
  std::string stage_a, stage_b;
  std::vector<BitString> input;
  bool on_diverge = false;  // the cut-off masses differ rather than a word weight
  BitString value;
  Dyadic weight_a, weight_b;
};

struct EquivalenceRow {
  std::vector<BitString> input;
  std::vector<Distribution> dists;  // stage order, kStageNames
};

struct EquivalenceReport {
  std::string id;
  std::vector<std::string> stages;
  std::vector<EquivalenceRow> rows;  // empty when distributions are not kept
  std::optional<StageDivergence> divergence;
  size_t inputs_checked = 0;
  bool zero_divergence = true;
  bool pass = true;
};

// every stage distribution equal on every input; a failure records the first
// counterexample
EquivalenceReport check_bundle_equivalence(const std::string& id, const PipelineBundle& b,
                                           const std::vector<std::vector<BitString>>& inputs,
                                           long long fuel = kDefaultFuel,
                                           bool keep_distributions = true);
EquivalenceReport check_stage_equivalence(const std::string& id, PorPtr f,
                                          const std::vector<std::vector<BitString>>& inputs,
                                          long long fuel = kDefaultFuel,
                                          bool keep_distributions = true);

std::string equivalence_table(const EquivalenceReport& r);
std::string equivalence_json(const EquivalenceReport& r);

struct CheckReport {
  std::string name;
  bool pass = false;
  std::string detail;
};

// all 2^k oracle assignments over dyad(0..k-1) drive the extractor on 1^k onto
// pairwise distinct words of length k
CheckReport check_extractor_law(int k);

// n seeded samples against an exact distribution, empirical total variation
struct StatReport {
  size_t samples = 0;
  uint64_t seed = 0;
  double tv = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

using Sampler = std::function<BitString(std::mt19937_64&)>;

StatReport statistical_compare(const Distribution& exact, const Sampler& sample, size_t n,
                               uint64_t seed, double threshold = 0.05);

struct CorpusEntry {
  std::string id;
  PorPtr fn;
};

// the shipped programs: five base functions, five derived, three query-heavy
std::vector<CorpusEntry> harness_corpus();
// reads every *.por file in a directory, id = file stem
std::vector<CorpusEntry> load_corpus(const std::string& dir);

// all argument tuples with every component of length <= max_len
std::vector<std::vector<BitString>> input_tuples(int arity, int max_len);

}  // namespace porlab
