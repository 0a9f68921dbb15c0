#ifndef CORPSIM_EXPERIMENTS_HPP
#define CORPSIM_EXPERIMENTS_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "corpsim/stats.hpp"
#include "corpsim/types.hpp"

namespace corpsim {

enum class PairCondition {
  SameCell,
  SameRegisterDifferentVariety,
  CrossRegisterSameVariety,
  SameVariety,
  DifferentVariety,
};

const char *to_string(PairCondition c);

// True when the two keys are an instance of the condition.
bool condition_consistent(PairCondition c, const VarietyKey &a,
                          const VarietyKey &b);

// One scored sample pair; a and b index into SampleManifest::samples.
struct PairObservation {
  uint32_t a = 0;
  uint32_t b = 0;
  FeatureKind kind = FeatureKind::WordUnigram;
  PairCondition condition = PairCondition::SameCell;
  double rho = 0.0;
};

struct ExperimentConfig {
  uint64_t seed = 1;
  uint32_t pairs_exp1 = 50;   // SameCell observations per cell
  uint32_t pairs_exp2 = 100;  // pairs per class per variety
  uint32_t pairs_exp3 = 100;  // cross-register pairs per variety
  uint32_t pairs_exp4 = 50;   // pairs per condition per language-register
  uint32_t vocab_k = 100000;
  uint64_t sample_size = 1000000;
  uint32_t cap = 20;
  double alpha = kDefaultAlpha;
  bool run_word = true;
  bool run_char3 = true;
  // Feature kind for the single-kind experiments (3-5); character trigrams
  // unless reconfigured.
  FeatureKind analysis_kind = FeatureKind::CharTrigram;
  int workers = 1;
};

// Dense projected vectors plus precomputed rank vectors for one feature
// kind, aligned with SampleManifest::samples. Immutable once built; all
// experiment scoring reads it concurrently.
struct KindVectors {
  FeatureKind kind = FeatureKind::WordUnigram;
  std::vector<std::vector<uint32_t>> values;
  std::vector<std::vector<double>> ranks;
};

// Builds rank vectors for already-projected values; errors on a constant
// (e.g. all-zero) sample, naming it via the manifest.
KindVectors build_kind_vectors(const SampleManifest &manifest,
                               FeatureKind kind,
                               std::vector<std::vector<uint32_t>> values,
                               int workers);

// Seeded draw of up to n unordered index pairs from `population` (sample
// indexes) satisfying `eligible`. Pairs are enumerated in canonical order,
// shuffled, and the selection re-sorted, so output is deterministic and
// free of duplicates. Fewer than n eligible pairs returns all of them and
// appends a warning to `warnings`.
std::vector<std::pair<uint32_t, uint32_t>> sample_pairs(
    std::span<const uint32_t> population,
    const std::function<bool(uint32_t, uint32_t)> &eligible, uint32_t n,
    uint64_t seed, const std::string &what,
    std::vector<std::string> *warnings);

// rho for each pair, computed in parallel; scores[i] belongs to pairs[i].
std::vector<double> score_pairs(
    const KindVectors &vectors,
    std::span<const std::pair<uint32_t, uint32_t>> pairs, int workers);

// ---- Experiment 1: internal consistency of each cell ----
struct Exp1Cell {
  VarietyKey key;
  FeatureKind kind = FeatureKind::WordUnigram;
  uint32_t pairs = 0;
  Summary stats;
  std::vector<double> scores;
};
struct Exp1Summary {
  std::string language;
  Register reg = Register::TW;
  FeatureKind kind = FeatureKind::WordUnigram;
  uint32_t cells = 0;
  double mean_rho = 0.0;
};
struct Exp1Report {
  std::vector<Exp1Cell> cells;
  std::vector<Exp1Summary> summary;
  std::vector<PairObservation> observations;
  std::vector<std::string> warnings;
};
Exp1Report exp1_internal_consistency(
    const SampleManifest &manifest,
    std::span<const KindVectors *const> kinds, const ExperimentConfig &config);

// ---- Experiment 2: register classification accuracy ----
struct Exp2Row {
  std::string language;
  FeatureKind kind = FeatureKind::WordUnigram;
  uint32_t varieties = 0;
  uint32_t pairs_same = 0;
  uint32_t pairs_cross = 0;
  double same_mean = 0.0;
  double cross_mean = 0.0;
  uint32_t correct = 0;
  double accuracy = 0.0;
  std::vector<double> same_scores;
  std::vector<double> cross_scores;
};
struct Exp2Report {
  std::vector<Exp2Row> rows;
  std::vector<PairObservation> observations;
  std::vector<std::string> warnings;
};
Exp2Report exp2_feature_accuracy(const SampleManifest &manifest,
                                 std::span<const KindVectors *const> kinds,
                                 const ExperimentConfig &config);

// ---- Experiment 3: cross-register similarity per variety ----
struct Exp3Row {
  std::string language;
  std::string country;
  FeatureKind kind = FeatureKind::CharTrigram;
  uint32_t pairs = 0;
  Summary stats;
  std::vector<double> scores;
};
struct Exp3Report {
  std::vector<Exp3Row> rows;
  std::vector<PairObservation> observations;
  std::vector<std::string> warnings;
};
Exp3Report exp3_cross_register(const SampleManifest &manifest,
                               const KindVectors &vectors,
                               const ExperimentConfig &config);

// ---- Experiment 4: within- vs between-variety similarity ----
struct Exp4Row {
  std::string language;
  Register reg = Register::TW;
  FeatureKind kind = FeatureKind::CharTrigram;
  uint32_t pairs_same = 0;
  uint32_t pairs_diff = 0;
  double same_mean = 0.0;
  double diff_mean = 0.0;
  TestResult test;
  std::vector<double> same_scores;
  std::vector<double> diff_scores;
};
struct Exp4Report {
  std::vector<Exp4Row> rows;
  std::vector<PairObservation> observations;
  std::vector<std::string> warnings;
};
Exp4Report exp4_within_vs_between(const SampleManifest &manifest,
                                  const KindVectors &vectors,
                                  const ExperimentConfig &config);

// ---- Experiment 5: variety ranking against the language centroid ----
struct Exp5Rank {
  std::string language;
  std::string country;
  Register reg = Register::TW;
  double rho_centroid = 0.0;
  double rank = 0.0;  // 1 = most divergent; ties take average ranks
};
struct Exp5Row {
  std::string language;  // "all" for the pooled row
  uint32_t varieties = 0;
  TestResult test;
};
struct Exp5Report {
  std::vector<Exp5Rank> ranks;
  std::vector<Exp5Row> rows;
  std::vector<std::string> warnings;
};
Exp5Report exp5_variety_ranks(const SampleManifest &manifest,
                              const KindVectors &vectors,
                              const ExperimentConfig &config);

// ---- Geographic aggregation of experiment 3 ----
struct GeoRow {
  std::string country;
  uint32_t languages = 0;
  double mean_rho = 0.0;
};
struct GeoReport {
  std::vector<GeoRow> rows;
};
GeoReport geo_aggregate(const Exp3Report &exp3);

// Re-derives every observation's condition from the two sample keys;
// returns the number of inconsistent observations (0 for a sound report).
size_t audit_observations(const SampleManifest &manifest,
                          std::span<const PairObservation> observations);

// Samples of each cell, in manifest order. Shared by the experiments and
// the pipeline stage wiring.
std::map<VarietyKey, std::vector<uint32_t>> group_by_cell(
    const SampleManifest &manifest);

}  // namespace corpsim

#endif
