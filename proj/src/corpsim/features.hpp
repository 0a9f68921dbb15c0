#ifndef CORPSIM_FEATURES_HPP
#define CORPSIM_FEATURES_HPP

#include <absl/container/flat_hash_map.h>
#include <absl/strings/string_view.h>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "corpsim/types.hpp"

namespace corpsim {

// Raw feature frequencies of one sample. No zero-count entries are stored;
// total is maintained as the sum of all counts.
struct FeatureCounts {
  FeatureKind kind = FeatureKind::WordUnigram;
  absl::flat_hash_map<std::string, uint64_t> counts;
  uint64_t total = 0;

  void add(std::string_view feature, uint64_t n = 1) {
    // absl::string_view keeps the lookup heterogeneous (no allocation when
    // the key already exists); this build of absl predates std::string_view
    // interop.
    counts[absl::string_view(feature.data(), feature.size())] += n;
    total += n;
  }
  bool empty() const { return counts.empty(); }
};

void count_words(const std::vector<std::string> &tokens, FeatureCounts &out);
// Trigram windows never cross document boundaries, so this is called once
// per document (or document fragment).
void count_trigrams(const std::vector<std::string> &tokens, FeatureCounts &out);

// Counts over a whole sample given its tokenized documents.
FeatureCounts count_features(std::span<const std::vector<std::string>> docs,
                             FeatureKind kind);

// Ordered top-k feature inventory for one (language, kind), ranked by summed
// frequency across all samples of the language (ties broken lexicographically).
struct Vocabulary {
  std::string language;
  FeatureKind kind = FeatureKind::WordUnigram;
  uint32_t k = 0;
  std::vector<std::string> features;   // rank order, rank 1 == features[0]
  std::vector<uint64_t> summed;        // corpus-wide count per feature
  absl::flat_hash_map<std::string, uint32_t> index;
  std::string digest;  // checksum of the serialized form

  size_t size() const { return features.size(); }
  void rebuild_index();
};

Vocabulary build_vocabulary(std::span<const FeatureCounts *const> all_counts,
                            uint32_t k, const std::string &language);

// Dense projection of one sample onto a vocabulary. Unattested vocabulary
// features get 0; out-of-vocabulary counts are dropped.
struct FrequencyVector {
  FeatureKind kind = FeatureKind::WordUnigram;
  std::string vocab_digest;
  std::vector<uint32_t> values;
  uint64_t total = 0;  // sum(values) == in-vocabulary mass
  bool all_zero = false;
};

FrequencyVector project(const FeatureCounts &counts, const Vocabulary &vocab);

// Sample counts file: UTF-8 TSV "feature<TAB>count" sorted by descending
// count then lexicographic feature, header
// "#kind=<word|char3> tokens=<n> checksum=<hex>".
std::string serialize_counts(const FeatureCounts &counts, uint64_t tokens);
void save_counts_tsv(const std::string &path, const FeatureCounts &counts,
                     uint64_t tokens);
FeatureCounts load_counts_tsv(const std::string &path,
                              uint64_t *tokens_out = nullptr);

// Vocabulary file: TSV "rank<TAB>feature<TAB>summed_count" with header
// "#language=<code> kind=<word|char3> k=<n>".
std::string serialize_vocabulary(const Vocabulary &vocab);
void save_vocabulary(const std::string &path, const Vocabulary &vocab);
Vocabulary load_vocabulary(const std::string &path);

}  // namespace corpsim

#endif
