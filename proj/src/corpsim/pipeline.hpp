#ifndef CORPSIM_PIPELINE_HPP
#define CORPSIM_PIPELINE_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "corpsim/synth.hpp"
#include "corpsim/types.hpp"

namespace corpsim {

// Progress sink; every stage emits human-readable lines through it.
using LogFn = std::function<void(std::string_view)>;

// Pipeline stages in execution order. Each stage's outputs depend only on
// the previous stages plus the config fields covered by its digest.
enum class Stage { Ingest, Count, Vocab, Exp, Geo };

const char *to_string(Stage s);
Stage stage_from_string(std::string_view s);

// Full run configuration. Loadable from a flat key=value file; every field
// is also settable by key through set_config_value (CLI flags use that
// path, so flags override file values). Unknown keys are usage errors.
struct RunConfig {
  std::string corpus;             // corpus root (file or directory)
  std::string format = "jsonl";   // "jsonl" | "tree"
  std::string workspace = "workspace";
  std::string output;             // report dir; empty = <workspace>/reports
  uint64_t seed = 1;
  uint64_t sample_size = 1000000;  // tokens per sample
  uint32_t cap = 20;               // samples per cell
  uint32_t vocab_k = 100000;
  uint32_t pairs_exp1 = 50;
  uint32_t pairs_exp2 = 100;
  uint32_t pairs_exp3 = 100;
  uint32_t pairs_exp4 = 50;
  double alpha = 0.05;
  uint32_t workers = 1;  // 0 = one per hardware thread
  std::string kinds = "word,char3";     // feature kinds for exp1/exp2
  std::string analysis_kind = "char3";  // feature kind for exp3-exp5
  std::string experiments = "exp1,exp2,exp3,exp4,exp5,geo";
  bool force = false;
  SynthConfig synth;

  std::vector<FeatureKind> kind_list() const;   // parsed `kinds`, deduped
  std::vector<FeatureKind> count_kinds() const; // kinds + analysis kind
  FeatureKind analysis() const;
  // Validated experiment selection, canonical order; may include "geo".
  std::vector<std::string> experiment_list() const;
  std::string reports_dir() const;
  int effective_workers() const;

  // Digest over the config fields that determine the stage's outputs.
  // Corpus identity is the path string, not file content. Workspace and
  // output locations, worker count, force, and the experiment selection
  // never affect result bytes and are excluded.
  std::string stage_digest(Stage stage) const;
};

// Reads a flat key=value config file. '#' lines are comments. An empty
// path returns the defaults.
RunConfig load_run_config(const std::string &path);

// Applies a config file's pairs on top of an existing config.
void merge_run_config(RunConfig &config, const std::string &path);

// Applies one key/value override; key names match the config file.
void set_config_value(RunConfig &config, std::string_view key,
                      std::string_view value);

// Runs the requested stages (names per Stage) plus their prerequisites.
// An empty list means everything the config's experiment selection needs.
// Stages whose stamp matches the current config digest are skipped; a
// digest mismatch refuses to touch the workspace unless force is set.
void run_pipeline(const RunConfig &config,
                  const std::vector<std::string> &stages, const LogFn &log);

void run_synth(const RunConfig &config, const LogFn &log);

// Integrity audit of a workspace: every stamped stage's artifacts must
// exist, parse, pass their checksums, and carry the stamped digests.
// Returns true when the workspace is internally consistent.
bool verify_workspace(const RunConfig &config, const LogFn &log);

// Standalone comparison of two stored counts files over their union
// vocabulary.
struct CompareResult {
  FeatureKind kind = FeatureKind::WordUnigram;
  uint64_t features = 0;  // union vocabulary size
  double spearman = 0.0;
  double chi_square = 0.0;
};

CompareResult compare_counts(const std::string &path_a,
                             const std::string &path_b);

}  // namespace corpsim

#endif
