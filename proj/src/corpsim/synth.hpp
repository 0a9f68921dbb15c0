#ifndef CORPSIM_SYNTH_HPP
#define CORPSIM_SYNTH_HPP

#include <cstdint>
#include <string>

namespace corpsim {

// Synthetic corpus model: every language draws token types from a shared
// Zipf(zipf_s) base; each register and each variety perturbs the base
// log-weights with Gaussian offsets of scale register_div / variety_div.
// divergence 0 makes the corresponding axis statistically invisible.
struct SynthConfig {
  std::string out = "corpus.jsonl";
  uint32_t languages = 2;
  uint32_t varieties = 4;
  uint32_t registers = 2;
  uint32_t samples_per_cell = 5;
  uint64_t sample_size = 100000;  // tokens per sample; a cell emits
                                  // samples_per_cell * sample_size tokens
  uint32_t doc_tokens = 500;      // tokens per emitted document
  uint32_t types = 30000;         // distinct word types per language
  double zipf_s = 1.07;
  double register_div = 0.8;
  double variety_div = 0.25;
  uint64_t seed = 1;
};

// Writes the corpus (jsonl, one document per line) plus a <out>.meta.json
// sidecar recording the generator parameters. Same config -> identical
// bytes.
void generate_synthetic_corpus(const SynthConfig &config);

// Code assigned to the i-th synthetic language ("aaa", "aab", ...) and
// country ("AA", "AB", ...). Exposed so tests and reports can name cells.
std::string synth_language_code(uint32_t i);
std::string synth_country_code(uint32_t i);

}  // namespace corpsim

#endif
