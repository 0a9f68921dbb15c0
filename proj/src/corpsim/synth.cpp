#include "corpsim/synth.hpp"

#include <absl/container/flat_hash_set.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

#include "corpsim/types.hpp"
#include "corpsim/util.hpp"

using nlohmann::json;

namespace corpsim {

std::string synth_language_code(uint32_t i) {
  char code[4] = {'a', 'a', 'a', '\0'};
  code[2] = static_cast<char>('a' + i % 26);
  code[1] = static_cast<char>('a' + (i / 26) % 26);
  code[0] = static_cast<char>('a' + (i / 676) % 26);
  return code;
}

std::string synth_country_code(uint32_t i) {
  char code[3] = {'A', 'A', '\0'};
  code[1] = static_cast<char>('A' + i % 26);
  code[0] = static_cast<char>('A' + (i / 26) % 26);
  return code;
}

namespace {

void validate(const SynthConfig &c) {
  if (c.languages < 1 || c.varieties < 1 || c.registers < 1 ||
      c.samples_per_cell < 1 || c.types < 2 || c.doc_tokens < 1)
    fail_usage("synthetic corpus sizes must be at least 1 (types >= 2)");
  if (c.registers > 2)
    fail_usage("at most 2 registers are supported (tw, cc)");
  if (c.languages > 17576)
    fail_usage("at most 17576 synthetic languages are supported");
  if (c.varieties > 676)
    fail_usage("at most 676 synthetic varieties are supported");
  if (!(c.zipf_s > 1.0)) fail_usage("zipf exponent must exceed 1");
  if (c.sample_size < 1) fail_usage("sample size must be at least 1");
  if (c.register_div < 0.0 || c.variety_div < 0.0)
    fail_usage("divergence scales must be non-negative");
}

// Distinct lowercase words, lengths 4..9, in draw order.
std::vector<std::string> make_words(Rng &rng, uint32_t n) {
  std::vector<std::string> words;
  words.reserve(n);
  absl::flat_hash_set<std::string> seen;
  std::string w;
  while (words.size() < n) {
    size_t len = 4 + rng.bounded(6);
    w.clear();
    for (size_t i = 0; i < len; ++i)
      w.push_back(static_cast<char>('a' + rng.bounded(26)));
    if (seen.insert(w).second) words.push_back(w);
  }
  return words;
}

std::vector<double> gaussian_vector(Rng &rng, uint32_t n, double scale) {
  std::vector<double> v(n);
  for (double &x : v) x = scale == 0.0 ? 0.0 : scale * rng.normal();
  return v;
}

// Cumulative distribution over types for one cell; last entry pinned to 1.
std::vector<double> cell_cdf(const std::vector<double> &base_log,
                             const std::vector<double> &reg_eff,
                             const std::vector<double> &var_eff) {
  size_t n = base_log.size();
  std::vector<double> w(n);
  double sum = 0.0;
  for (size_t i = 0; i < n; ++i) {
    w[i] = std::exp(base_log[i] + reg_eff[i] + var_eff[i]);
    sum += w[i];
  }
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) {
    acc += w[i] / sum;
    w[i] = acc;
  }
  w[n - 1] = 1.0;
  return w;
}

}  // namespace

void generate_synthetic_corpus(const SynthConfig &config) {
  validate(config);

  std::filesystem::path out_path(config.out);
  if (out_path.has_parent_path())
    std::filesystem::create_directories(out_path.parent_path());
  std::string tmp = config.out + ".tmp";
  std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
  if (!out) fail("cannot write file: %s", tmp.c_str());

  for (uint32_t li = 0; li < config.languages; ++li) {
    std::string language = synth_language_code(li);
    Rng lang_rng(mix_seed(config.seed, "synth-lang-" + language));

    std::vector<std::string> words = make_words(lang_rng, config.types);
    std::vector<double> base_log(config.types);
    for (uint32_t r = 0; r < config.types; ++r)
      base_log[r] = -config.zipf_s * std::log(static_cast<double>(r + 1));
    std::vector<std::vector<double>> reg_eff, var_eff;
    for (uint32_t ri = 0; ri < config.registers; ++ri)
      reg_eff.push_back(
          gaussian_vector(lang_rng, config.types, config.register_div));
    for (uint32_t vi = 0; vi < config.varieties; ++vi)
      var_eff.push_back(
          gaussian_vector(lang_rng, config.types, config.variety_div));

    for (uint32_t vi = 0; vi < config.varieties; ++vi) {
      std::string country = synth_country_code(vi);
      for (uint32_t ri = 0; ri < config.registers; ++ri) {
        const char *reg = ri == 0 ? "tw" : "cc";
        std::vector<double> cdf = cell_cdf(base_log, reg_eff[ri], var_eff[vi]);
        std::string label = language + "_" + country + "_" + reg;
        Rng cell_rng(mix_seed(config.seed, "synth-cell-" + label));

        uint64_t remaining = config.sample_size * config.samples_per_cell;
        std::string text;
        while (remaining > 0) {
          uint64_t doc_len = std::min<uint64_t>(remaining, config.doc_tokens);
          text.clear();
          for (uint64_t t = 0; t < doc_len; ++t) {
            double u = cell_rng.uniform01();
            size_t type = static_cast<size_t>(
                std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
            if (type >= words.size()) type = words.size() - 1;
            if (t > 0) text.push_back(' ');
            text.append(words[type]);
          }
          remaining -= doc_len;
          json line{{"country", country},
                    {"language", language},
                    {"register", reg},
                    {"text", text}};
          out << line.dump() << '\n';
        }
      }
    }
  }
  out.flush();
  if (!out) fail("error writing file: %s", tmp.c_str());
  out.close();
  std::error_code ec;
  std::filesystem::rename(tmp, config.out, ec);
  if (ec)
    fail("cannot rename %s to %s: %s", tmp.c_str(), config.out.c_str(),
         ec.message().c_str());

  json meta{{"languages", config.languages},
            {"varieties", config.varieties},
            {"registers", config.registers},
            {"samples_per_cell", config.samples_per_cell},
            {"sample_size", config.sample_size},
            {"doc_tokens", config.doc_tokens},
            {"types", config.types},
            {"zipf_s", config.zipf_s},
            {"register_div", config.register_div},
            {"variety_div", config.variety_div},
            {"seed", config.seed}};
  write_file_atomic(config.out + ".meta.json", meta.dump(2) + "\n");
}

}  // namespace corpsim
