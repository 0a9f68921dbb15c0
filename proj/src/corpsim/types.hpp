#ifndef CORPSIM_TYPES_HPP
#define CORPSIM_TYPES_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace corpsim {

enum class Register { TW, CC };

enum class FeatureKind { WordUnigram, CharTrigram };

const char *to_string(Register r);                // "tw" / "cc"
const char *to_string(FeatureKind k);             // "word" / "char3"
Register register_from_string(std::string_view s);
FeatureKind kind_from_string(std::string_view s);

// Identity of one corpus cell: a national variety of a language observed in
// one register. language is ISO 639-3 (lowercase), country ISO 3166-1
// alpha-2 (uppercase).
struct VarietyKey {
  std::string language;
  std::string country;
  Register reg = Register::TW;

  auto tie() const { return std::tie(language, country, reg); }
  bool operator==(const VarietyKey &o) const { return tie() == o.tie(); }
  bool operator!=(const VarietyKey &o) const { return tie() != o.tie(); }
  bool operator<(const VarietyKey &o) const { return tie() < o.tie(); }

  bool same_variety(const VarietyKey &o) const {
    return language == o.language && country == o.country;
  }

  // "spa_MX_tw", also used as the sample file-name stem.
  std::string label() const;
};

// Validates and normalizes (language lowercased, country uppercased);
// throws Error on codes that are not shaped like ISO 639-3 / 3166-1.
VarietyKey make_variety_key(const std::string &language,
                            const std::string &country,
                            const std::string &reg);

struct RawDocument {
  std::string text;
  VarietyKey key;
  std::string source_id;
};

// One fixed-size observation of a cell. counts_path is a workspace-relative
// stem; the stored artifacts are <stem>.word.tsv and <stem>.char3.tsv.
struct Sample {
  VarietyKey key;
  uint32_t index = 0;
  uint64_t token_count = 0;
  std::string counts_path;

  bool operator<(const Sample &o) const {
    return std::tie(key, index) < std::tie(o.key, o.index);
  }
};

// Per-cell chunking accounting; lets downstream checks recompute
// complete_samples == total_tokens / sample_size.
struct CellStats {
  VarietyKey key;
  uint64_t total_tokens = 0;
  uint32_t complete_samples = 0;
  uint32_t retained = 0;
  uint64_t discarded_tokens = 0;
  uint32_t discarded_samples = 0;
};

struct SampleManifest {
  std::vector<Sample> samples;
  std::vector<CellStats> cells;
  std::vector<std::string> warnings;
  std::string config_digest;
  std::string corpus_root;
  uint64_t sample_size = 0;
  uint32_t cap = 0;
};

}  // namespace corpsim

#endif
