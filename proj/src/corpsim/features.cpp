#include "corpsim/features.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>

#include "corpsim/text.hpp"
#include "corpsim/util.hpp"

namespace corpsim {

void count_words(const std::vector<std::string> &tokens, FeatureCounts &out) {
  for (const auto &t : tokens) out.add(t);
}

void count_trigrams(const std::vector<std::string> &tokens,
                    FeatureCounts &out) {
  for_each_trigram(tokens,
                   [&](std::string_view tri) { out.add(tri); });
}

FeatureCounts count_features(std::span<const std::vector<std::string>> docs,
                             FeatureKind kind) {
  FeatureCounts out;
  out.kind = kind;
  for (const auto &doc : docs) {
    if (kind == FeatureKind::WordUnigram)
      count_words(doc, out);
    else
      count_trigrams(doc, out);
  }
  return out;
}

void Vocabulary::rebuild_index() {
  index.clear();
  index.reserve(features.size());
  for (size_t i = 0; i < features.size(); ++i)
    index.emplace(features[i], static_cast<uint32_t>(i));
}

Vocabulary build_vocabulary(std::span<const FeatureCounts *const> all_counts,
                            uint32_t k, const std::string &language) {
  if (k == 0) fail_usage("vocabulary size must be positive");
  Vocabulary vocab;
  vocab.language = language;
  vocab.k = k;

  absl::flat_hash_map<std::string, uint64_t> summed;
  bool have_kind = false;
  for (const FeatureCounts *counts : all_counts) {
    if (!have_kind) {
      vocab.kind = counts->kind;
      have_kind = true;
    } else if (counts->kind != vocab.kind) {
      fail("cannot build a vocabulary from mixed feature kinds");
    }
    for (const auto &[feature, n] : counts->counts) summed[feature] += n;
  }

  // Hash map order is arbitrary; a full sort by (-count, feature) makes the
  // inventory reproducible and fixes tie order at the same time.
  std::vector<std::pair<std::string_view, uint64_t>> order;
  order.reserve(summed.size());
  for (const auto &[feature, n] : summed) order.emplace_back(feature, n);
  std::sort(order.begin(), order.end(), [](const auto &a, const auto &b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (order.size() > k) order.resize(k);

  vocab.features.reserve(order.size());
  vocab.summed.reserve(order.size());
  for (const auto &[feature, n] : order) {
    vocab.features.emplace_back(feature);
    vocab.summed.push_back(n);
  }
  vocab.rebuild_index();
  vocab.digest = fnv64_hex(serialize_vocabulary(vocab));
  return vocab;
}

FrequencyVector project(const FeatureCounts &counts, const Vocabulary &vocab) {
  FrequencyVector vec;
  vec.kind = vocab.kind;
  vec.vocab_digest = vocab.digest;
  vec.values.assign(vocab.size(), 0);
  if (counts.kind != vocab.kind)
    fail("cannot project %s counts onto a %s vocabulary",
         to_string(counts.kind), to_string(vocab.kind));
  for (const auto &[feature, n] : counts.counts) {
    auto it = vocab.index.find(feature);
    if (it == vocab.index.end()) continue;  // out of vocabulary
    vec.values[it->second] = static_cast<uint32_t>(n);
    vec.total += n;
  }
  vec.all_zero = vec.total == 0;
  return vec;
}

namespace {

// Counts body without the header line, in canonical order.
std::string counts_body(const FeatureCounts &counts) {
  std::vector<std::pair<std::string_view, uint64_t>> order;
  order.reserve(counts.counts.size());
  for (const auto &[feature, n] : counts.counts) order.emplace_back(feature, n);
  std::sort(order.begin(), order.end(), [](const auto &a, const auto &b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::string body;
  body.reserve(order.size() * 16);
  char buf[32];
  for (const auto &[feature, n] : order) {
    body.append(feature);
    body.push_back('\t');
    snprintf(buf, sizeof buf, "%" PRIu64, n);
    body.append(buf);
    body.push_back('\n');
  }
  return body;
}

}  // namespace

std::string serialize_counts(const FeatureCounts &counts, uint64_t tokens) {
  std::string body = counts_body(counts);
  std::string out = "#kind=";
  out += to_string(counts.kind);
  char buf[64];
  snprintf(buf, sizeof buf, " tokens=%" PRIu64 " checksum=%s\n", tokens,
           fnv64_hex(body).c_str());
  out += buf;
  out += body;
  return out;
}

void save_counts_tsv(const std::string &path, const FeatureCounts &counts,
                     uint64_t tokens) {
  // A sample always yields at least one feature; an empty store means the
  // caller lost its counts somewhere.
  if (counts.empty()) fail("refusing to store empty counts at %s", path.c_str());
  write_file_atomic(path, serialize_counts(counts, tokens));
}

FeatureCounts load_counts_tsv(const std::string &path, uint64_t *tokens_out) {
  std::string data = read_file(path);
  size_t eol = data.find('\n');
  if (eol == std::string::npos || data.empty() || data[0] != '#')
    fail("%s: missing counts header", path.c_str());
  std::string_view header(data.data(), eol);
  std::string_view body(data.data() + eol + 1, data.size() - eol - 1);

  FeatureCounts counts;
  uint64_t tokens = 0;
  std::string checksum;
  for (const auto &field : split_view(header.substr(1), ' ')) {
    size_t eq = field.find('=');
    if (eq == std::string_view::npos)
      fail("%s: malformed counts header field \"%.*s\"", path.c_str(),
           static_cast<int>(field.size()), field.data());
    std::string_view key = field.substr(0, eq);
    std::string_view value = field.substr(eq + 1);
    if (key == "kind") {
      counts.kind = kind_from_string(value);
    } else if (key == "tokens") {
      tokens = parse_u64(value, path + ": tokens");
    } else if (key == "checksum") {
      checksum = std::string(value);
    } else {
      fail("%s: unknown counts header field \"%.*s\"", path.c_str(),
           static_cast<int>(key.size()), key.data());
    }
  }
  if (checksum.empty()) fail("%s: counts header lacks a checksum", path.c_str());
  if (fnv64_hex(body) != checksum)
    fail("%s: checksum mismatch, file is corrupt or was edited", path.c_str());

  size_t line_no = 1;
  size_t pos = 0;
  while (pos < body.size()) {
    size_t end = body.find('\n', pos);
    if (end == std::string_view::npos) end = body.size();
    std::string_view line = body.substr(pos, end - pos);
    ++line_no;
    pos = end + 1;
    if (line.empty()) continue;
    size_t tab = line.rfind('\t');
    if (tab == std::string_view::npos)
      fail("%s:%zu: expected feature<TAB>count", path.c_str(), line_no);
    uint64_t n = parse_u64(line.substr(tab + 1), path + ": count");
    counts.add(line.substr(0, tab), n);
  }
  if (tokens_out) *tokens_out = tokens;
  return counts;
}

std::string serialize_vocabulary(const Vocabulary &vocab) {
  std::string out = "#language=" + vocab.language;
  char buf[64];
  snprintf(buf, sizeof buf, " kind=%s k=%u\n", to_string(vocab.kind), vocab.k);
  out += buf;
  for (size_t i = 0; i < vocab.features.size(); ++i) {
    snprintf(buf, sizeof buf, "%zu\t", i + 1);
    out += buf;
    out += vocab.features[i];
    snprintf(buf, sizeof buf, "\t%" PRIu64 "\n", vocab.summed[i]);
    out += buf;
  }
  return out;
}

void save_vocabulary(const std::string &path, const Vocabulary &vocab) {
  write_file_atomic(path, serialize_vocabulary(vocab));
}

Vocabulary load_vocabulary(const std::string &path) {
  std::string data = read_file(path);
  size_t eol = data.find('\n');
  if (eol == std::string::npos || data.empty() || data[0] != '#')
    fail("%s: missing vocabulary header", path.c_str());
  std::string_view header(data.data(), eol);

  Vocabulary vocab;
  for (const auto &field : split_view(header.substr(1), ' ')) {
    size_t eq = field.find('=');
    if (eq == std::string_view::npos)
      fail("%s: malformed vocabulary header field \"%.*s\"", path.c_str(),
           static_cast<int>(field.size()), field.data());
    std::string_view key = field.substr(0, eq);
    std::string_view value = field.substr(eq + 1);
    if (key == "language") {
      vocab.language = std::string(value);
    } else if (key == "kind") {
      vocab.kind = kind_from_string(value);
    } else if (key == "k") {
      vocab.k = static_cast<uint32_t>(parse_u64(value, path + ": k"));
    } else {
      fail("%s: unknown vocabulary header field \"%.*s\"", path.c_str(),
           static_cast<int>(key.size()), key.data());
    }
  }

  std::string_view body(data.data() + eol + 1, data.size() - eol - 1);
  size_t line_no = 1;
  size_t pos = 0;
  while (pos < body.size()) {
    size_t end = body.find('\n', pos);
    if (end == std::string_view::npos) end = body.size();
    std::string_view line = body.substr(pos, end - pos);
    ++line_no;
    pos = end + 1;
    if (line.empty()) continue;
    size_t t1 = line.find('\t');
    size_t t2 = line.rfind('\t');
    if (t1 == std::string_view::npos || t2 == t1)
      fail("%s:%zu: expected rank<TAB>feature<TAB>count", path.c_str(),
           line_no);
    uint64_t rank = parse_u64(line.substr(0, t1), path + ": rank");
    if (rank != vocab.features.size() + 1)
      fail("%s:%zu: rank %" PRIu64 " out of order", path.c_str(), line_no,
           rank);
    vocab.features.emplace_back(line.substr(t1 + 1, t2 - t1 - 1));
    vocab.summed.push_back(parse_u64(line.substr(t2 + 1), path + ": count"));
  }
  if (vocab.features.size() > vocab.k)
    fail("%s: %zu entries exceed declared k=%u", path.c_str(),
         vocab.features.size(), vocab.k);
  vocab.rebuild_index();
  vocab.digest = fnv64_hex(serialize_vocabulary(vocab));
  return vocab;
}

}  // namespace corpsim
