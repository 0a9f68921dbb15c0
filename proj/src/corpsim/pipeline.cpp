#include "corpsim/pipeline.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cstring>
#include <filesystem>
#include <limits>
#include <map>
#include <set>
#include <thread>

#include "corpsim/experiments.hpp"
#include "corpsim/features.hpp"
#include "corpsim/ingest.hpp"
#include "corpsim/report.hpp"
#include "corpsim/similarity.hpp"
#include "corpsim/util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace corpsim {

namespace {

constexpr Stage kStageOrder[] = {Stage::Ingest, Stage::Count, Stage::Vocab,
                                 Stage::Exp, Stage::Geo};

void logln(const LogFn &log, const std::string &line) {
  if (log) log(line);
}

std::string join(const std::vector<std::string> &items, const char *sep) {
  std::string out;
  for (const std::string &item : items) {
    if (!out.empty()) out += sep;
    out += item;
  }
  return out;
}

// Config-file numbers must surface as usage errors, not runtime ones.
uint64_t u64_value(std::string_view v, const char *key) {
  try {
    return parse_u64(v, key);
  } catch (const Error &e) {
    throw Error(ErrorKind::Usage, e.what());
  }
}

uint32_t u32_value(std::string_view v, const char *key) {
  uint64_t n = u64_value(v, key);
  if (n > std::numeric_limits<uint32_t>::max())
    fail_usage("%s: %llu is out of range", key,
               static_cast<unsigned long long>(n));
  return static_cast<uint32_t>(n);
}

double double_value(std::string_view v, const char *key) {
  double out = 0.0;
  const char *end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end)
    fail_usage("%s: \"%.*s\" is not a number", key,
               static_cast<int>(v.size()), v.data());
  return out;
}

bool bool_value(std::string_view v, const char *key) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  fail_usage("%s: expected true or false, got \"%.*s\"", key,
             static_cast<int>(v.size()), v.data());
}

}  // namespace

const char *to_string(Stage s) {
  switch (s) {
    case Stage::Ingest: return "ingest";
    case Stage::Count: return "count";
    case Stage::Vocab: return "vocab";
    case Stage::Exp: return "exp";
    case Stage::Geo: return "geo";
  }
  return "?";
}

Stage stage_from_string(std::string_view s) {
  for (Stage stage : kStageOrder)
    if (s == to_string(stage)) return stage;
  fail_usage("unknown stage \"%.*s\" (expected ingest, count, vocab, exp, "
             "or geo)",
             static_cast<int>(s.size()), s.data());
}

std::vector<FeatureKind> RunConfig::kind_list() const {
  std::vector<FeatureKind> out;
  for (std::string_view tok : split_view(kinds, ',')) {
    std::string_view t = trim(tok);
    if (t.empty()) continue;
    FeatureKind k = kind_from_string(t);
    if (std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
  }
  if (out.empty()) fail_usage("kinds must name at least one feature kind");
  return out;
}

std::vector<FeatureKind> RunConfig::count_kinds() const {
  std::vector<FeatureKind> listed = kind_list();
  FeatureKind extra = analysis();
  if (std::find(listed.begin(), listed.end(), extra) == listed.end())
    listed.push_back(extra);
  // canonical order keeps digests independent of how `kinds` was written
  std::sort(listed.begin(), listed.end(), [](FeatureKind a, FeatureKind b) {
    return static_cast<int>(a) < static_cast<int>(b);
  });
  return listed;
}

FeatureKind RunConfig::analysis() const {
  return kind_from_string(analysis_kind);
}

std::vector<std::string> RunConfig::experiment_list() const {
  static const char *kKnown[] = {"exp1", "exp2", "exp3",
                                 "exp4", "exp5", "geo"};
  std::set<std::string> seen;
  for (std::string_view tok : split_view(experiments, ',')) {
    std::string_view t = trim(tok);
    if (t.empty()) continue;
    bool known = false;
    for (const char *name : kKnown) known = known || t == name;
    if (!known)
      fail_usage("unknown experiment \"%.*s\" (expected exp1..exp5 or geo)",
                 static_cast<int>(t.size()), t.data());
    seen.emplace(t);
  }
  std::vector<std::string> out;
  for (const char *name : kKnown)
    if (seen.count(name)) out.push_back(name);
  return out;
}

std::string RunConfig::reports_dir() const {
  return output.empty() ? workspace + "/reports" : output;
}

int RunConfig::effective_workers() const {
  if (workers > 0) return static_cast<int>(std::min<uint32_t>(workers, 256));
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::string RunConfig::stage_digest(Stage stage) const {
  Fnv64 h;
  auto put = [&h](const char *key, const std::string &value) {
    h.update(key);
    h.update("=");
    h.update(value);
    h.update("\n");
  };
  put("corpus", corpus);
  put("format", format);
  put("sample_size", std::to_string(sample_size));
  put("cap", std::to_string(cap));
  if (stage >= Stage::Count) {
    std::vector<std::string> names;
    for (FeatureKind k : count_kinds()) names.push_back(to_string(k));
    put("kinds", join(names, ","));
  }
  if (stage >= Stage::Vocab) put("vocab_k", std::to_string(vocab_k));
  if (stage >= Stage::Exp) {
    put("seed", std::to_string(seed));
    put("alpha", format_double(alpha));
    put("pairs", std::to_string(pairs_exp1) + "," + std::to_string(pairs_exp2) +
                     "," + std::to_string(pairs_exp3) + "," +
                     std::to_string(pairs_exp4));
    put("analysis_kind", to_string(analysis()));
    std::vector<std::string> names;
    for (FeatureKind k : kind_list()) names.push_back(to_string(k));
    put("run_kinds", join(names, ","));
  }
  return h.hex();
}

void set_config_value(RunConfig &config, std::string_view key,
                      std::string_view value) {
  std::string v(value);
  if (key == "corpus") config.corpus = v;
  else if (key == "format") config.format = v;
  else if (key == "workspace") config.workspace = v;
  else if (key == "output") config.output = v;
  else if (key == "seed") config.seed = u64_value(value, "seed");
  else if (key == "sample_size")
    config.sample_size = u64_value(value, "sample_size");
  else if (key == "cap") config.cap = u32_value(value, "cap");
  else if (key == "vocab_k") config.vocab_k = u32_value(value, "vocab_k");
  else if (key == "pairs_exp1")
    config.pairs_exp1 = u32_value(value, "pairs_exp1");
  else if (key == "pairs_exp2")
    config.pairs_exp2 = u32_value(value, "pairs_exp2");
  else if (key == "pairs_exp3")
    config.pairs_exp3 = u32_value(value, "pairs_exp3");
  else if (key == "pairs_exp4")
    config.pairs_exp4 = u32_value(value, "pairs_exp4");
  else if (key == "alpha") config.alpha = double_value(value, "alpha");
  else if (key == "workers") config.workers = u32_value(value, "workers");
  else if (key == "kinds") config.kinds = v;
  else if (key == "analysis_kind") config.analysis_kind = v;
  else if (key == "experiments") config.experiments = v;
  else if (key == "force") config.force = bool_value(value, "force");
  else if (key == "synth.out") config.synth.out = v;
  else if (key == "synth.languages")
    config.synth.languages = u32_value(value, "synth.languages");
  else if (key == "synth.varieties")
    config.synth.varieties = u32_value(value, "synth.varieties");
  else if (key == "synth.registers")
    config.synth.registers = u32_value(value, "synth.registers");
  else if (key == "synth.samples_per_cell")
    config.synth.samples_per_cell = u32_value(value, "synth.samples_per_cell");
  else if (key == "synth.sample_size")
    config.synth.sample_size = u64_value(value, "synth.sample_size");
  else if (key == "synth.doc_tokens")
    config.synth.doc_tokens = u32_value(value, "synth.doc_tokens");
  else if (key == "synth.types")
    config.synth.types = u32_value(value, "synth.types");
  else if (key == "synth.zipf_s")
    config.synth.zipf_s = double_value(value, "synth.zipf_s");
  else if (key == "synth.register_div")
    config.synth.register_div = double_value(value, "synth.register_div");
  else if (key == "synth.variety_div")
    config.synth.variety_div = double_value(value, "synth.variety_div");
  else if (key == "synth.seed")
    config.synth.seed = u64_value(value, "synth.seed");
  else
    fail_usage("unknown configuration key \"%.*s\"",
               static_cast<int>(key.size()), key.data());
}

void merge_run_config(RunConfig &config, const std::string &path) {
  std::string text = read_file(path);
  size_t lineno = 0;
  for (std::string_view line : split_view(text, '\n')) {
    ++lineno;
    std::string_view t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    size_t eq = t.find('=');
    if (eq == std::string_view::npos)
      fail_usage("%s:%zu: expected key=value", path.c_str(), lineno);
    try {
      set_config_value(config, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    } catch (const Error &e) {
      throw Error(e.kind(),
                  strf("%s:%zu: %s", path.c_str(), lineno, e.what()));
    }
  }
}

RunConfig load_run_config(const std::string &path) {
  RunConfig config;
  if (!path.empty()) merge_run_config(config, path);
  return config;
}

namespace {

// ---- workspace lock --------------------------------------------------

class WorkspaceLock {
 public:
  explicit WorkspaceLock(const std::string &workspace) {
    std::string path = workspace + "/.lock";
    fd_ = ::open(path.c_str(), O_CREAT | O_RDWR | O_CLOEXEC, 0644);
    if (fd_ < 0)
      fail("cannot open lock file %s: %s", path.c_str(),
           std::strerror(errno));
    if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
      ::close(fd_);
      fd_ = -1;
      fail("workspace %s is locked by another run", workspace.c_str());
    }
  }
  WorkspaceLock(const WorkspaceLock &) = delete;
  WorkspaceLock &operator=(const WorkspaceLock &) = delete;
  ~WorkspaceLock() {
    if (fd_ >= 0) {
      ::flock(fd_, LOCK_UN);
      ::close(fd_);
    }
  }

 private:
  int fd_ = -1;
};

// ---- stage stamps ------------------------------------------------------

struct StageStamp {
  bool present = false;
  std::string digest;
  std::string parent;
  std::vector<std::string> kinds;        // count, vocab
  uint32_t k = 0;                        // vocab
  uint64_t seed = 0;                     // exp
  std::vector<std::string> experiments;  // exp
};

std::string stamp_path(const std::string &workspace, Stage s) {
  return workspace + "/stamps/" + to_string(s) + ".json";
}

StageStamp load_stamp(const std::string &workspace, Stage s) {
  StageStamp stamp;
  std::string path = stamp_path(workspace, s);
  if (!fs::exists(path)) return stamp;
  try {
    json doc = json::parse(read_file(path));
    stamp.digest = doc.at("digest").get<std::string>();
    stamp.parent = doc.value("parent", std::string());
    if (doc.contains("kinds"))
      stamp.kinds = doc["kinds"].get<std::vector<std::string>>();
    stamp.k = doc.value("k", 0u);
    stamp.seed = doc.value("seed", static_cast<uint64_t>(0));
    if (doc.contains("experiments"))
      stamp.experiments = doc["experiments"].get<std::vector<std::string>>();
  } catch (const json::exception &e) {
    fail("stamp %s is unreadable: %s", path.c_str(), e.what());
  }
  stamp.present = true;
  return stamp;
}

void save_stamp(const std::string &workspace, Stage s,
                const StageStamp &stamp) {
  json doc;
  doc["stage"] = to_string(s);
  doc["digest"] = stamp.digest;
  if (!stamp.parent.empty()) doc["parent"] = stamp.parent;
  if (!stamp.kinds.empty()) doc["kinds"] = stamp.kinds;
  if (stamp.k != 0) doc["k"] = stamp.k;
  if (s == Stage::Exp) {
    doc["seed"] = stamp.seed;
    doc["experiments"] = stamp.experiments;
  }
  write_file_atomic(stamp_path(workspace, s), doc.dump(2) + "\n");
}

// ---- path helpers ------------------------------------------------------

std::string sample_tokens_path(const RunConfig &config, const Sample &s) {
  return config.workspace + "/samples/" + s.counts_path + ".txt";
}

std::string counts_path(const RunConfig &config, const Sample &s,
                        FeatureKind kind) {
  return config.workspace + "/counts/" + s.counts_path + "." +
         to_string(kind) + ".tsv";
}

std::string vocab_path(const RunConfig &config, const std::string &language,
                       FeatureKind kind) {
  return config.workspace + "/vocab/" + language + "." + to_string(kind) +
         ".tsv";
}

const char *const kExpReportFiles[] = {
    "exp1.csv", "exp1_summary.csv", "exp1.json", "exp2.csv", "exp2.json",
    "exp3.csv", "exp3.json",        "exp4.csv",  "exp4.json", "exp5.csv",
    "exp5_ranks.csv", "exp5.json"};

void clean_stage_outputs(const RunConfig &config, Stage s) {
  const std::string &ws = config.workspace;
  const std::string reports = config.reports_dir();
  switch (s) {
    case Stage::Ingest:
      fs::remove_all(ws + "/samples");
      fs::remove(ws + "/manifest.json");
      break;
    case Stage::Count:
      fs::remove_all(ws + "/counts");
      break;
    case Stage::Vocab:
      fs::remove_all(ws + "/vocab");
      break;
    case Stage::Exp:
      for (const char *name : kExpReportFiles)
        fs::remove(reports + "/" + name);
      [[fallthrough]];  // geo derives from exp3, so it is stale too
    case Stage::Geo:
      fs::remove(reports + "/geo.csv");
      fs::remove(reports + "/geo.json");
      fs::remove_all(reports + "/plots");
      break;
  }
}

// Forced or reconfigured rebuilds make everything downstream stale.
void invalidate_downstream(const RunConfig &config, Stage s) {
  for (int i = static_cast<int>(s) + 1; i <= static_cast<int>(Stage::Geo);
       ++i) {
    Stage t = static_cast<Stage>(i);
    fs::remove(stamp_path(config.workspace, t));
    clean_stage_outputs(config, t);
  }
}

void check_pipeline_config(const RunConfig &config) {
  if (config.corpus.empty())
    fail_usage("corpus path required (set corpus= in the config file or "
               "--corpus)");
  corpus_format_from_string(config.format);
  if (config.workspace.empty()) fail_usage("workspace path required");
  if (config.sample_size < 1)
    fail_usage("sample_size must be at least 1");
  if (config.cap < 1) fail_usage("cap must be at least 1");
  if (config.vocab_k < 1) fail_usage("vocab_k must be at least 1");
  if (!(config.alpha > 0.0 && config.alpha < 1.0))
    fail_usage("alpha must lie strictly between 0 and 1");
  if (config.pairs_exp1 < 1 || config.pairs_exp2 < 1 ||
      config.pairs_exp3 < 1 || config.pairs_exp4 < 1)
    fail_usage("pair counts must be at least 1");
  config.kind_list();
  config.analysis();
  config.experiment_list();
}

// ---- stage bodies ------------------------------------------------------

void stage_ingest(const RunConfig &config, const LogFn &log) {
  SampleManifest manifest = chunk_into_samples(
      config.corpus, corpus_format_from_string(config.format),
      config.workspace, config.sample_size, config.cap);
  manifest.config_digest = config.stage_digest(Stage::Ingest);
  save_manifest(config.workspace + "/manifest.json", manifest);
  uint64_t discarded = 0;
  for (const CellStats &cell : manifest.cells)
    discarded += cell.discarded_tokens;
  logln(log, strf("ingest: %zu samples across %zu cells (%llu tokens "
                  "discarded)",
                  manifest.samples.size(), manifest.cells.size(),
                  static_cast<unsigned long long>(discarded)));
  for (const std::string &w : manifest.warnings)
    logln(log, "  warning: " + w);
}

void stage_count(const RunConfig &config, const LogFn &log) {
  SampleManifest manifest =
      load_manifest(config.workspace + "/manifest.json");
  std::vector<FeatureKind> kinds = config.count_kinds();
  for (const Sample &s : manifest.samples)
    fs::create_directories(
        fs::path(config.workspace + "/counts/" + s.counts_path)
            .parent_path());
  parallel_for(manifest.samples.size(), config.effective_workers(),
               [&](size_t i) {
                 const Sample &s = manifest.samples[i];
                 auto docs = load_sample_tokens(sample_tokens_path(config, s));
                 for (FeatureKind kind : kinds) {
                   FeatureCounts counts = count_features(docs, kind);
                   save_counts_tsv(counts_path(config, s, kind), counts,
                                   s.token_count);
                 }
               });
  logln(log, strf("count: %zu samples x %zu feature kinds",
                  manifest.samples.size(), kinds.size()));
}

void stage_vocab(const RunConfig &config, const LogFn &log) {
  SampleManifest manifest =
      load_manifest(config.workspace + "/manifest.json");
  std::vector<FeatureKind> kinds = config.count_kinds();
  std::map<std::string, std::vector<const Sample *>> by_language;
  for (const Sample &s : manifest.samples)
    by_language[s.key.language].push_back(&s);

  struct Task {
    const std::string *language;
    const std::vector<const Sample *> *samples;
    FeatureKind kind;
  };
  std::vector<Task> tasks;
  for (const auto &[language, samples] : by_language)
    for (FeatureKind kind : kinds) tasks.push_back({&language, &samples, kind});

  fs::create_directories(config.workspace + "/vocab");
  parallel_for(tasks.size(), config.effective_workers(), [&](size_t t) {
    const Task &task = tasks[t];
    FeatureCounts merged;
    merged.kind = task.kind;
    for (const Sample *s : *task.samples) {
      FeatureCounts c = load_counts_tsv(counts_path(config, *s, task.kind));
      if (c.kind != task.kind)
        fail("counts file %s holds %s features, expected %s",
             counts_path(config, *s, task.kind).c_str(), to_string(c.kind),
             to_string(task.kind));
      for (const auto &[feature, n] : c.counts) merged.add(feature, n);
    }
    const FeatureCounts *one[1] = {&merged};
    Vocabulary vocab = build_vocabulary(one, config.vocab_k, *task.language);
    save_vocabulary(vocab_path(config, *task.language, task.kind), vocab);
  });
  logln(log, strf("vocab: %zu languages x %zu kinds (k=%u)",
                  by_language.size(), kinds.size(), config.vocab_k));
}

ExperimentConfig experiment_config(const RunConfig &config) {
  ExperimentConfig ec;
  ec.seed = config.seed;
  ec.pairs_exp1 = config.pairs_exp1;
  ec.pairs_exp2 = config.pairs_exp2;
  ec.pairs_exp3 = config.pairs_exp3;
  ec.pairs_exp4 = config.pairs_exp4;
  ec.vocab_k = config.vocab_k;
  ec.sample_size = config.sample_size;
  ec.cap = config.cap;
  ec.alpha = config.alpha;
  std::vector<FeatureKind> listed = config.kind_list();
  ec.run_word = std::find(listed.begin(), listed.end(),
                          FeatureKind::WordUnigram) != listed.end();
  ec.run_char3 = std::find(listed.begin(), listed.end(),
                           FeatureKind::CharTrigram) != listed.end();
  ec.analysis_kind = config.analysis();
  ec.workers = config.effective_workers();
  return ec;
}

KindVectors load_kind_vectors(const RunConfig &config,
                              const SampleManifest &manifest,
                              FeatureKind kind) {
  std::map<std::string, Vocabulary> vocabs;
  for (const Sample &s : manifest.samples)
    vocabs.try_emplace(s.key.language);
  for (auto &[language, vocab] : vocabs)
    vocab = load_vocabulary(vocab_path(config, language, kind));

  std::vector<std::vector<uint32_t>> values(manifest.samples.size());
  parallel_for(manifest.samples.size(), config.effective_workers(),
               [&](size_t i) {
                 const Sample &s = manifest.samples[i];
                 FeatureCounts counts =
                     load_counts_tsv(counts_path(config, s, kind));
                 FrequencyVector fv =
                     project(counts, vocabs.at(s.key.language));
                 values[i] = std::move(fv.values);
               });
  return build_kind_vectors(manifest, kind, std::move(values),
                            config.effective_workers());
}

void audit_or_fail(const SampleManifest &manifest,
                   std::span<const PairObservation> observations,
                   const char *what) {
  size_t bad = audit_observations(manifest, observations);
  if (bad != 0)
    fail("%s: %zu pair observations have inconsistent conditions", what, bad);
}

void stage_exp(const RunConfig &config,
               const std::vector<std::string> &experiments, const LogFn &log) {
  SampleManifest manifest =
      load_manifest(config.workspace + "/manifest.json");
  ExperimentConfig ec = experiment_config(config);
  const std::string digest = config.stage_digest(Stage::Exp);
  const std::string dir = config.reports_dir();

  auto wants = [&](const char *name) {
    return std::find(experiments.begin(), experiments.end(), name) !=
           experiments.end();
  };

  std::map<FeatureKind, KindVectors> cache;
  auto vectors_for = [&](FeatureKind kind) -> const KindVectors & {
    auto it = cache.find(kind);
    if (it == cache.end()) {
      logln(log, strf("exp: projecting %s vectors", to_string(kind)));
      it = cache.emplace(kind, load_kind_vectors(config, manifest, kind))
               .first;
    }
    return it->second;
  };

  if (wants("exp1") || wants("exp2")) {
    std::vector<const KindVectors *> kindvecs;
    for (FeatureKind kind : config.kind_list())
      kindvecs.push_back(&vectors_for(kind));
    if (wants("exp1")) {
      Exp1Report report = exp1_internal_consistency(manifest, kindvecs, ec);
      audit_or_fail(manifest, report.observations, "exp1");
      write_exp1_report(dir, report, digest, config.seed);
      logln(log, strf("exp1: %zu cell distributions", report.cells.size()));
      for (const std::string &w : report.warnings)
        logln(log, "  warning: " + w);
    }
    if (wants("exp2")) {
      Exp2Report report = exp2_feature_accuracy(manifest, kindvecs, ec);
      audit_or_fail(manifest, report.observations, "exp2");
      write_exp2_report(dir, report, digest, config.seed);
      logln(log, strf("exp2: %zu language/kind rows", report.rows.size()));
      for (const std::string &w : report.warnings)
        logln(log, "  warning: " + w);
    }
  }
  if (wants("exp3")) {
    Exp3Report report =
        exp3_cross_register(manifest, vectors_for(ec.analysis_kind), ec);
    audit_or_fail(manifest, report.observations, "exp3");
    write_exp3_report(dir, report, digest, config.seed);
    logln(log, strf("exp3: %zu varieties scored", report.rows.size()));
    for (const std::string &w : report.warnings)
      logln(log, "  warning: " + w);
  }
  if (wants("exp4")) {
    Exp4Report report =
        exp4_within_vs_between(manifest, vectors_for(ec.analysis_kind), ec);
    audit_or_fail(manifest, report.observations, "exp4");
    write_exp4_report(dir, report, digest, config.seed);
    logln(log, strf("exp4: %zu language-register tests", report.rows.size()));
    for (const std::string &w : report.warnings)
      logln(log, "  warning: " + w);
  }
  if (wants("exp5")) {
    Exp5Report report =
        exp5_variety_ranks(manifest, vectors_for(ec.analysis_kind), ec);
    write_exp5_report(dir, report, digest, config.seed);
    logln(log, strf("exp5: %zu rank correlations", report.rows.size()));
    for (const std::string &w : report.warnings)
      logln(log, "  warning: " + w);
  }
}

void stage_geo(const RunConfig &config, const LogFn &log) {
  const std::string dir = config.reports_dir();
  const std::string sidecar = dir + "/exp3.json";
  if (!fs::exists(sidecar))
    fail("cross-register sidecar %s missing; run exp3 first",
         sidecar.c_str());
  Exp3Report exp3 = load_exp3_sidecar(sidecar);
  GeoReport geo = geo_aggregate(exp3);
  write_geo_report(dir, geo, config.stage_digest(Stage::Geo), config.seed);
  emit_plot_data(dir, exp3, geo);
  logln(log, strf("geo: %zu countries aggregated", geo.rows.size()));
}

}  // namespace

void run_pipeline(const RunConfig &config,
                  const std::vector<std::string> &stages, const LogFn &log) {
  check_pipeline_config(config);

  std::vector<std::string> selection = config.experiment_list();
  bool geo_selected = std::find(selection.begin(), selection.end(), "geo") !=
                      selection.end();
  std::vector<std::string> exps;
  for (const std::string &name : selection)
    if (name != "geo") exps.push_back(name);

  std::set<Stage> requested;
  if (stages.empty()) {
    requested.insert(Stage::Ingest);
    requested.insert(Stage::Count);
    requested.insert(Stage::Vocab);
    if (!exps.empty() || geo_selected) requested.insert(Stage::Exp);
    if (geo_selected) requested.insert(Stage::Geo);
  } else {
    for (const std::string &name : stages)
      requested.insert(stage_from_string(trim(name)));
  }
  std::set<Stage> closure;
  for (Stage s : requested)
    for (int i = 0; i <= static_cast<int>(s); ++i)
      closure.insert(static_cast<Stage>(i));

  if (closure.count(Stage::Geo) &&
      std::find(exps.begin(), exps.end(), "exp3") == exps.end()) {
    exps.insert(exps.begin(), "exp3");
    std::sort(exps.begin(), exps.end());
    logln(log, "geo requires the cross-register experiment; adding exp3");
  }
  if (closure.count(Stage::Exp) && exps.empty()) {
    closure.erase(Stage::Exp);
    logln(log, "exp: no experiments selected; skipping");
  }

  fs::create_directories(config.workspace);
  WorkspaceLock lock(config.workspace);
  fs::create_directories(config.workspace + "/stamps");

  for (Stage s : kStageOrder) {
    if (!closure.count(s)) continue;
    const std::string want = config.stage_digest(s);
    StageStamp old = load_stamp(config.workspace, s);
    std::vector<std::string> run_exps = exps;

    if (old.present) {
      if (old.digest != want) {
        if (!config.force)
          fail("workspace %s holds %s artifacts from a different "
               "configuration (stamp %s, config %s); use --force to rebuild",
               config.workspace.c_str(), to_string(s), old.digest.c_str(),
               want.c_str());
        logln(log, strf("%s: configuration changed; rebuilding",
                        to_string(s)));
        clean_stage_outputs(config, s);
        invalidate_downstream(config, s);
        old = StageStamp{};
      } else if (config.force && requested.count(s)) {
        logln(log, strf("%s: forced rebuild", to_string(s)));
        invalidate_downstream(config, s);
      } else if (s == Stage::Exp) {
        std::set<std::string> done(old.experiments.begin(),
                                   old.experiments.end());
        run_exps.clear();
        for (const std::string &name : exps)
          if (!done.count(name)) run_exps.push_back(name);
        if (run_exps.empty()) {
          logln(log, "exp: up to date; skipping");
          continue;
        }
        logln(log, strf("exp: running %s (rest up to date)",
                        join(run_exps, ",").c_str()));
      } else {
        logln(log, strf("%s: up to date; skipping", to_string(s)));
        continue;
      }
    }

    StageStamp stamp;
    stamp.digest = want;
    if (s != Stage::Ingest)
      stamp.parent =
          config.stage_digest(static_cast<Stage>(static_cast<int>(s) - 1));
    switch (s) {
      case Stage::Ingest:
        stage_ingest(config, log);
        break;
      case Stage::Count: {
        stage_count(config, log);
        for (FeatureKind kind : config.count_kinds())
          stamp.kinds.push_back(to_string(kind));
        break;
      }
      case Stage::Vocab: {
        stage_vocab(config, log);
        for (FeatureKind kind : config.count_kinds())
          stamp.kinds.push_back(to_string(kind));
        stamp.k = config.vocab_k;
        break;
      }
      case Stage::Exp: {
        stage_exp(config, run_exps, log);
        std::set<std::string> done(old.experiments.begin(),
                                   old.experiments.end());
        done.insert(run_exps.begin(), run_exps.end());
        stamp.seed = config.seed;
        stamp.experiments.assign(done.begin(), done.end());
        break;
      }
      case Stage::Geo:
        stage_geo(config, log);
        break;
    }
    save_stamp(config.workspace, s, stamp);
  }
  logln(log, "pipeline complete");
}

void run_synth(const RunConfig &config, const LogFn &log) {
  generate_synthetic_corpus(config.synth);
  logln(log, strf("synth: wrote %s and %s.meta.json",
                  config.synth.out.c_str(), config.synth.out.c_str()));
}

namespace {

// Failure accumulator for verify; keeps logging bounded.
class Audit {
 public:
  Audit(const LogFn &log) : log_(log) {}

  void problem(const std::string &msg) {
    ++failures_;
    if (failures_ <= 20) logln(log_, "FAIL: " + msg);
    if (failures_ == 21) logln(log_, "(further failures suppressed)");
  }
  void checked(size_t n = 1) { artifacts_ += n; }
  size_t failures() const { return failures_; }
  size_t artifacts() const { return artifacts_; }

 private:
  const LogFn &log_;
  size_t failures_ = 0;
  size_t artifacts_ = 0;
};

}  // namespace

bool verify_workspace(const RunConfig &config, const LogFn &log) {
  const std::string &ws = config.workspace;
  if (!fs::exists(ws))
    fail_usage("workspace %s does not exist", ws.c_str());

  StageStamp stamps[5];
  bool any = false;
  for (Stage s : kStageOrder) {
    stamps[static_cast<int>(s)] = load_stamp(ws, s);
    any = any || stamps[static_cast<int>(s)].present;
  }
  if (!any)
    fail_usage("workspace %s contains no stage stamps; nothing to verify",
               ws.c_str());

  WorkspaceLock lock(ws);
  Audit audit(log);
  auto stamp_of = [&](Stage s) -> StageStamp & {
    return stamps[static_cast<int>(s)];
  };

  // stamp chain: each stage must sit on the exact parent it was built from
  for (int i = 1; i < 5; ++i) {
    const StageStamp &cur = stamps[i];
    if (!cur.present) continue;
    const StageStamp &prev = stamps[i - 1];
    Stage s = static_cast<Stage>(i);
    if (!prev.present) {
      audit.problem(strf("%s stamp present but %s stamp missing",
                         to_string(s),
                         to_string(static_cast<Stage>(i - 1))));
    } else if (cur.parent != prev.digest) {
      audit.problem(strf("%s stamp parent %s does not match %s digest %s",
                         to_string(s), cur.parent.c_str(),
                         to_string(static_cast<Stage>(i - 1)),
                         prev.digest.c_str()));
    }
  }

  SampleManifest manifest;
  bool have_manifest = false;
  if (stamp_of(Stage::Ingest).present) {
    try {
      manifest = load_manifest(ws + "/manifest.json");
      have_manifest = true;
      audit.checked();
      if (manifest.config_digest != stamp_of(Stage::Ingest).digest)
        audit.problem(strf("manifest digest %s does not match ingest stamp "
                           "%s",
                           manifest.config_digest.c_str(),
                           stamp_of(Stage::Ingest).digest.c_str()));
      for (const CellStats &cell : manifest.cells) {
        uint32_t expect =
            static_cast<uint32_t>(cell.total_tokens / manifest.sample_size);
        if (cell.complete_samples != expect)
          audit.problem(strf("cell %s: %u complete samples recorded, %u "
                             "derivable from token totals",
                             cell.key.label().c_str(), cell.complete_samples,
                             expect));
        uint32_t keep = std::min(cell.complete_samples, manifest.cap);
        if (cell.retained != keep)
          audit.problem(strf("cell %s: retained %u, expected %u",
                             cell.key.label().c_str(), cell.retained, keep));
      }
      for (const Sample &s : manifest.samples) {
        if (!fs::exists(sample_tokens_path(config, s)))
          audit.problem(strf("sample file missing: %s",
                             sample_tokens_path(config, s).c_str()));
        else
          audit.checked();
      }
    } catch (const Error &e) {
      audit.problem(e.what());
    }
  }

  if (stamp_of(Stage::Count).present && have_manifest) {
    size_t limit_hit = 0;
    for (const Sample &s : manifest.samples) {
      for (const std::string &kind_name : stamp_of(Stage::Count).kinds) {
        FeatureKind kind = kind_from_string(kind_name);
        std::string path = counts_path(config, s, kind);
        try {
          uint64_t tokens = 0;
          FeatureCounts counts = load_counts_tsv(path, &tokens);
          audit.checked();
          if (counts.kind != kind)
            audit.problem(strf("%s: kind %s, expected %s", path.c_str(),
                               to_string(counts.kind), to_string(kind)));
          if (tokens != manifest.sample_size)
            audit.problem(strf("%s: %llu tokens recorded, expected %llu",
                               path.c_str(),
                               static_cast<unsigned long long>(tokens),
                               static_cast<unsigned long long>(
                                   manifest.sample_size)));
        } catch (const Error &e) {
          audit.problem(e.what());
          if (++limit_hit >= 5) {
            audit.problem("too many unreadable counts files; skipping the "
                          "rest");
            goto counts_done;
          }
        }
      }
    }
  counts_done:;
  }

  if (stamp_of(Stage::Vocab).present && have_manifest) {
    std::set<std::string> languages;
    for (const Sample &s : manifest.samples)
      languages.insert(s.key.language);
    for (const std::string &language : languages) {
      for (const std::string &kind_name : stamp_of(Stage::Vocab).kinds) {
        FeatureKind kind = kind_from_string(kind_name);
        std::string path = vocab_path(config, language, kind);
        try {
          Vocabulary vocab = load_vocabulary(path);
          audit.checked();
          if (vocab.language != language)
            audit.problem(strf("%s: language %s, expected %s", path.c_str(),
                               vocab.language.c_str(), language.c_str()));
          if (vocab.kind != kind)
            audit.problem(strf("%s: kind %s, expected %s", path.c_str(),
                               to_string(vocab.kind), to_string(kind)));
          if (vocab.k != stamp_of(Stage::Vocab).k)
            audit.problem(strf("%s: k=%u, stamp says %u", path.c_str(),
                               vocab.k, stamp_of(Stage::Vocab).k));
        } catch (const Error &e) {
          audit.problem(e.what());
        }
      }
    }
  }

  const std::string reports = config.reports_dir();
  if (stamp_of(Stage::Exp).present) {
    const StageStamp &stamp = stamp_of(Stage::Exp);
    for (const std::string &name : stamp.experiments) {
      std::vector<std::string> files = {name + ".csv", name + ".json"};
      if (name == "exp1") files.push_back("exp1_summary.csv");
      if (name == "exp5") files.push_back("exp5_ranks.csv");
      for (const std::string &file : files) {
        std::string path = reports + "/" + file;
        if (!fs::exists(path)) {
          audit.problem(strf("report missing: %s", path.c_str()));
          continue;
        }
        audit.checked();
        if (file.size() > 5 && file.substr(file.size() - 5) == ".json") {
          try {
            json doc = json::parse(read_file(path));
            if (doc.at("config_digest").get<std::string>() != stamp.digest)
              audit.problem(strf("%s: config digest does not match exp "
                                 "stamp",
                                 path.c_str()));
            if (doc.at("seed").get<uint64_t>() != stamp.seed)
              audit.problem(strf("%s: seed does not match exp stamp",
                                 path.c_str()));
          } catch (const json::exception &e) {
            audit.problem(strf("%s: unreadable sidecar: %s", path.c_str(),
                               e.what()));
          }
        }
      }
    }
  }

  if (stamp_of(Stage::Geo).present) {
    for (const char *name : {"geo.csv", "geo.json", "plots/map.json"}) {
      std::string path = reports + "/" + name;
      if (!fs::exists(path))
        audit.problem(strf("report missing: %s", path.c_str()));
      else
        audit.checked();
    }
    std::string sidecar = reports + "/exp3.json";
    if (fs::exists(sidecar)) {
      try {
        Exp3Report exp3 = load_exp3_sidecar(sidecar);
        std::set<std::string> languages;
        for (const Exp3Row &row : exp3.rows) languages.insert(row.language);
        for (const std::string &language : languages) {
          std::string path = reports + "/plots/" + language + ".json";
          if (!fs::exists(path))
            audit.problem(strf("plot data missing: %s", path.c_str()));
          else
            audit.checked();
        }
      } catch (const Error &e) {
        audit.problem(e.what());
      }
    }
    try {
      json doc = json::parse(read_file(reports + "/geo.json"));
      if (doc.at("config_digest").get<std::string>() !=
          stamp_of(Stage::Geo).digest)
        audit.problem("geo.json: config digest does not match geo stamp");
    } catch (const std::exception &e) {
      audit.problem(strf("geo.json: %s", e.what()));
    }
  }

  if (audit.failures() == 0) {
    logln(log, strf("verify: workspace consistent (%zu artifacts checked)",
                    audit.artifacts()));
    return true;
  }
  logln(log, strf("verify: %zu problems found across %zu artifacts",
                  audit.failures(), audit.artifacts()));
  return false;
}

CompareResult compare_counts(const std::string &path_a,
                             const std::string &path_b) {
  FeatureCounts a = load_counts_tsv(path_a);
  FeatureCounts b = load_counts_tsv(path_b);
  if (a.kind != b.kind)
    fail_usage("cannot compare %s counts with %s counts", to_string(a.kind),
               to_string(b.kind));
  const FeatureCounts *both[2] = {&a, &b};
  Vocabulary vocab = build_vocabulary(
      both, std::numeric_limits<uint32_t>::max(), "union");
  FrequencyVector fa = project(a, vocab);
  FrequencyVector fb = project(b, vocab);
  CompareResult result;
  result.kind = a.kind;
  result.features = vocab.size();
  result.spearman = spearman_similarity(fa, fb, path_a, path_b);
  result.chi_square = chi_square_distance(fa, fb, path_a, path_b);
  return result;
}

}  // namespace corpsim
