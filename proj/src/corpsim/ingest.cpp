#include "corpsim/ingest.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

#include "corpsim/text.hpp"
#include "corpsim/util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace corpsim {

CorpusFormat corpus_format_from_string(std::string_view s) {
  if (s == "jsonl") return CorpusFormat::Jsonl;
  if (s == "tree") return CorpusFormat::Tree;
  fail_usage("unknown corpus format \"" + std::string(s) +
             "\" (expected \"jsonl\" or \"tree\")");
}

const char *to_string(CorpusFormat f) {
  return f == CorpusFormat::Jsonl ? "jsonl" : "tree";
}

namespace {

std::vector<fs::path> sorted_entries(const fs::path &dir) {
  std::vector<fs::path> out;
  for (const auto &entry : fs::directory_iterator(dir))
    out.push_back(entry.path());
  std::sort(out.begin(), out.end(),
            [](const fs::path &a, const fs::path &b) {
              return a.filename().string() < b.filename().string();
            });
  return out;
}

// Line-by-line reader that tracks the line number for error messages.
// Blank lines carry no document and are passed over.
template <typename Fn>
void for_each_line(const std::string &path, Fn &&fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open file: %s", path.c_str());
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    fn(line, line_no);
  }
  if (in.bad()) fail("error reading file: %s", path.c_str());
}

std::string require_string_field(const json &obj, const char *field,
                                 const std::string &path, size_t line_no) {
  auto it = obj.find(field);
  if (it == obj.end())
    fail("%s:%zu: missing field \"%s\"", path.c_str(), line_no, field);
  if (!it->is_string())
    fail("%s:%zu: field \"%s\" is not a string", path.c_str(), line_no, field);
  return it->get<std::string>();
}

void read_jsonl_file(const std::string &path,
                     const std::function<void(RawDocument &&)> &sink) {
  for_each_line(path, [&](const std::string &line, size_t line_no) {
    json obj = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (obj.is_discarded())
      fail("%s:%zu: malformed JSON", path.c_str(), line_no);
    if (!obj.is_object())
      fail("%s:%zu: expected a JSON object", path.c_str(), line_no);
    RawDocument doc;
    doc.text = require_string_field(obj, "text", path, line_no);
    if (trim(doc.text).empty())
      fail("%s:%zu: document text is empty", path.c_str(), line_no);
    std::string language = require_string_field(obj, "language", path, line_no);
    std::string country = require_string_field(obj, "country", path, line_no);
    std::string reg = require_string_field(obj, "register", path, line_no);
    try {
      doc.key = make_variety_key(language, country, reg);
    } catch (const Error &e) {
      fail("%s:%zu: %s", path.c_str(), line_no, e.what());
    }
    char sid[32];
    std::snprintf(sid, sizeof sid, ":%zu", line_no);
    doc.source_id = path + sid;
    sink(std::move(doc));
  });
}

void read_jsonl(const std::string &path,
                const std::function<void(RawDocument &&)> &sink) {
  if (fs::is_directory(path)) {
    bool any = false;
    for (const auto &entry : sorted_entries(path)) {
      if (entry.extension() != ".jsonl") continue;
      any = true;
      read_jsonl_file(entry.string(), sink);
    }
    if (!any) fail("no *.jsonl files under %s", path.c_str());
    return;
  }
  if (!fs::exists(path)) fail_usage("corpus path does not exist: " + path);
  read_jsonl_file(path, sink);
}

void read_tree(const std::string &root,
               const std::function<void(RawDocument &&)> &sink) {
  if (!fs::is_directory(root))
    fail_usage("corpus root is not a directory: " + root);
  for (const auto &lang_dir : sorted_entries(root)) {
    if (!fs::is_directory(lang_dir))
      fail("unexpected file in corpus tree: %s", lang_dir.string().c_str());
    for (const auto &country_dir : sorted_entries(lang_dir)) {
      if (!fs::is_directory(country_dir))
        fail("unexpected file in corpus tree: %s",
             country_dir.string().c_str());
      for (const auto &reg_dir : sorted_entries(country_dir)) {
        if (!fs::is_directory(reg_dir))
          fail("unexpected file in corpus tree: %s", reg_dir.string().c_str());
        VarietyKey key;
        try {
          key = make_variety_key(lang_dir.filename().string(),
                                 country_dir.filename().string(),
                                 reg_dir.filename().string());
        } catch (const Error &e) {
          fail("%s: %s", reg_dir.string().c_str(), e.what());
        }
        for (const auto &file : sorted_entries(reg_dir)) {
          if (!fs::is_regular_file(file) || file.extension() != ".txt")
            fail("unexpected entry in corpus tree: %s",
                 file.string().c_str());
          std::string fpath = file.string();
          for_each_line(fpath, [&](const std::string &line, size_t line_no) {
            if (trim(line).empty())
              fail("%s:%zu: document text is empty", fpath.c_str(), line_no);
            RawDocument doc;
            doc.text = line;
            doc.key = key;
            char sid[32];
            std::snprintf(sid, sizeof sid, ":%zu", line_no);
            doc.source_id = fpath + sid;
            sink(std::move(doc));
          });
        }
      }
    }
  }
}

}  // namespace

void read_corpus(const std::string &path, CorpusFormat format,
                 const std::function<void(RawDocument &&)> &sink) {
  if (!fs::exists(path)) fail_usage("corpus path does not exist: " + path);
  if (format == CorpusFormat::Jsonl)
    read_jsonl(path, sink);
  else
    read_tree(path, sink);
}

namespace {

// Chunking state of one variety-register cell. Only the sample being
// assembled is buffered; completed samples go straight to disk.
struct CellState {
  VarietyKey key;
  std::string body;          // fragment lines of the open sample
  uint64_t fill = 0;         // tokens in the open sample
  uint64_t total_tokens = 0;
  uint32_t complete = 0;
  uint32_t retained = 0;
};

std::string sample_stem(const VarietyKey &key, uint32_t index) {
  char idx[16];
  std::snprintf(idx, sizeof idx, "%04u", index);
  return key.language + "/" + key.country + "/" + to_string(key.reg) + "/" +
         idx;
}

}  // namespace

SampleManifest chunk_into_samples(const std::string &corpus_path,
                                  CorpusFormat format,
                                  const std::string &workspace,
                                  uint64_t sample_size, uint32_t cap) {
  if (sample_size < 1) fail_usage("sample size must be at least 1");
  if (cap < 1) fail_usage("sample cap must be at least 1");

  SampleManifest manifest;
  manifest.corpus_root = corpus_path;
  manifest.sample_size = sample_size;
  manifest.cap = cap;

  std::map<VarietyKey, CellState> cells;

  read_corpus(corpus_path, format, [&](RawDocument &&doc) {
    std::vector<std::string> tokens = tokenize(doc.text);
    if (tokens.empty()) return;  // nothing countable; not an error
    CellState &cell = cells.try_emplace(doc.key, CellState{}).first->second;
    cell.key = doc.key;
    cell.total_tokens += tokens.size();

    size_t pos = 0;
    while (pos < tokens.size()) {
      size_t take = std::min<size_t>(tokens.size() - pos,
                                     sample_size - cell.fill);
      if (cell.retained == cell.complete && cell.complete < cap) {
        // Sample will be kept; buffer its fragment line.
        for (size_t i = pos; i < pos + take; ++i) {
          if (i > pos) cell.body.push_back(' ');
          cell.body.append(tokens[i]);
        }
        cell.body.push_back('\n');
      }
      cell.fill += take;
      pos += take;
      if (cell.fill == sample_size) {
        if (cell.complete < cap) {
          std::string stem = sample_stem(cell.key, cell.complete);
          std::string path = workspace + "/samples/" + stem + ".txt";
          std::filesystem::create_directories(
              std::filesystem::path(path).parent_path());
          write_file_atomic(path, cell.body);
          Sample sample;
          sample.key = cell.key;
          sample.index = cell.complete;
          sample.token_count = sample_size;
          sample.counts_path = stem;
          manifest.samples.push_back(std::move(sample));
          ++cell.retained;
        }
        ++cell.complete;
        cell.body.clear();
        cell.fill = 0;
      }
    }
  });

  if (cells.empty()) fail("corpus produced no tokens: " + corpus_path);

  for (auto &[key, cell] : cells) {
    CellStats stats;
    stats.key = key;
    stats.total_tokens = cell.total_tokens;
    stats.complete_samples = cell.complete;
    stats.retained = cell.retained;
    stats.discarded_samples = cell.complete - cell.retained;
    stats.discarded_tokens =
        cell.total_tokens - uint64_t(cell.retained) * sample_size;
    manifest.cells.push_back(stats);
    if (cell.complete == 0) {
      char msg[160];
      std::snprintf(msg, sizeof msg,
                    "cell %s: %llu tokens, below one sample of %llu; no "
                    "sample emitted",
                    key.label().c_str(),
                    static_cast<unsigned long long>(cell.total_tokens),
                    static_cast<unsigned long long>(sample_size));
      manifest.warnings.emplace_back(msg);
    }
  }
  std::sort(manifest.samples.begin(), manifest.samples.end());
  return manifest;
}

std::vector<std::vector<std::string>> load_sample_tokens(
    const std::string &path) {
  std::string data = read_file(path);
  std::vector<std::vector<std::string>> docs;
  size_t pos = 0;
  while (pos < data.size()) {
    size_t end = data.find('\n', pos);
    if (end == std::string::npos) end = data.size();
    std::string_view line(data.data() + pos, end - pos);
    pos = end + 1;
    if (line.empty()) continue;
    auto &doc = docs.emplace_back();
    for (std::string_view tok : split_view(line, ' '))
      if (!tok.empty()) doc.emplace_back(tok);
  }
  return docs;
}

namespace {

json key_to_json(const VarietyKey &key) {
  return json{{"language", key.language},
              {"country", key.country},
              {"register", to_string(key.reg)}};
}

VarietyKey key_from_json(const json &obj, const std::string &origin) {
  try {
    return make_variety_key(obj.at("language").get<std::string>(),
                            obj.at("country").get<std::string>(),
                            obj.at("register").get<std::string>());
  } catch (const json::exception &e) {
    fail("%s: malformed variety key: %s", origin.c_str(), e.what());
  }
}

}  // namespace

std::string manifest_to_json(const SampleManifest &manifest) {
  json doc;
  doc["config_digest"] = manifest.config_digest;
  doc["corpus_root"] = manifest.corpus_root;
  doc["sample_size"] = manifest.sample_size;
  doc["cap"] = manifest.cap;
  json samples = json::array();
  for (const Sample &s : manifest.samples) {
    json j = key_to_json(s.key);
    j["index"] = s.index;
    j["tokens"] = s.token_count;
    j["path"] = s.counts_path;
    samples.push_back(std::move(j));
  }
  doc["samples"] = std::move(samples);
  json cells = json::array();
  for (const CellStats &c : manifest.cells) {
    json j = key_to_json(c.key);
    j["total_tokens"] = c.total_tokens;
    j["complete_samples"] = c.complete_samples;
    j["retained"] = c.retained;
    j["discarded_tokens"] = c.discarded_tokens;
    j["discarded_samples"] = c.discarded_samples;
    cells.push_back(std::move(j));
  }
  doc["cells"] = std::move(cells);
  doc["warnings"] = manifest.warnings;
  return doc.dump(2) + "\n";
}

SampleManifest manifest_from_json(const std::string &json_text,
                                  const std::string &origin) {
  json doc = json::parse(json_text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object())
    fail("%s: malformed manifest JSON", origin.c_str());
  SampleManifest manifest;
  try {
    manifest.config_digest = doc.at("config_digest").get<std::string>();
    manifest.corpus_root = doc.at("corpus_root").get<std::string>();
    manifest.sample_size = doc.at("sample_size").get<uint64_t>();
    manifest.cap = doc.at("cap").get<uint32_t>();
    for (const json &j : doc.at("samples")) {
      Sample s;
      s.key = key_from_json(j, origin);
      s.index = j.at("index").get<uint32_t>();
      s.token_count = j.at("tokens").get<uint64_t>();
      s.counts_path = j.at("path").get<std::string>();
      manifest.samples.push_back(std::move(s));
    }
    for (const json &j : doc.at("cells")) {
      CellStats c;
      c.key = key_from_json(j, origin);
      c.total_tokens = j.at("total_tokens").get<uint64_t>();
      c.complete_samples = j.at("complete_samples").get<uint32_t>();
      c.retained = j.at("retained").get<uint32_t>();
      c.discarded_tokens = j.at("discarded_tokens").get<uint64_t>();
      c.discarded_samples = j.at("discarded_samples").get<uint32_t>();
      manifest.cells.push_back(std::move(c));
    }
    if (doc.contains("warnings"))
      manifest.warnings = doc.at("warnings").get<std::vector<std::string>>();
  } catch (const json::exception &e) {
    fail("%s: malformed manifest: %s", origin.c_str(), e.what());
  }
  if (!std::is_sorted(manifest.samples.begin(), manifest.samples.end()))
    fail("%s: manifest samples out of order", origin.c_str());
  return manifest;
}

void save_manifest(const std::string &path, const SampleManifest &manifest) {
  write_file_atomic(path, manifest_to_json(manifest));
}

SampleManifest load_manifest(const std::string &path) {
  return manifest_from_json(read_file(path), path);
}

}  // namespace corpsim
