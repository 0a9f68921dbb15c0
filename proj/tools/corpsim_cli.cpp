// corpsim command-line front end. All work happens behind the C API; this
// file only maps subcommands and flags onto config keys.
#include <cstdio>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "corpsim/corpsim.h"

namespace {

void print_line(const char *line, void *) { std::printf("%s\n", line); }

struct ConfigDeleter {
  void operator()(corpsim_config *cfg) const { corpsim_config_free(cfg); }
};
using ConfigPtr = std::unique_ptr<corpsim_config, ConfigDeleter>;

// Collects --key value style overrides in command-line order so flags
// override the config file regardless of where --config sits.
struct Options {
  std::string config_file;
  std::vector<std::pair<std::string, std::string>> overrides;
  bool quiet = false;
};

void add_common_flags(CLI::App *cmd, Options &opts) {
  cmd->add_option("--config", opts.config_file,
                  "flat key=value config file");
  auto track = [&opts](const std::string &key) {
    return [&opts, key](const std::string &value) {
      opts.overrides.emplace_back(key, value);
    };
  };
  cmd->add_option_function<std::string>("--corpus", track("corpus"),
                                        "corpus root (file or directory)");
  cmd->add_option_function<std::string>(
      "--format", track("format"), "corpus layout: jsonl or tree");
  cmd->add_option_function<std::string>("--workspace", track("workspace"),
                                        "stage cache directory");
  cmd->add_option_function<std::string>(
      "--output", track("output"), "report directory (default <workspace>/reports)");
  cmd->add_option_function<std::string>("--seed", track("seed"),
                                        "run seed for all pair draws");
  cmd->add_option_function<std::string>("--sample-size",
                                        track("sample_size"),
                                        "tokens per sample");
  cmd->add_option_function<std::string>("--cap", track("cap"),
                                        "max samples per cell");
  cmd->add_option_function<std::string>("--vocab-k", track("vocab_k"),
                                        "vocabulary size per language");
  cmd->add_option_function<std::string>(
      "--kinds", track("kinds"), "feature kinds for exp1/exp2 (word,char3)");
  cmd->add_option_function<std::string>(
      "--analysis-kind", track("analysis_kind"),
      "feature kind for exp3-exp5 (word or char3)");
  cmd->add_option_function<std::string>(
      "--alpha", track("alpha"), "significance level for the tests");
  cmd->add_option_function<std::string>(
      "--workers", track("workers"), "worker threads (0 = one per core)");
  cmd->add_option_function<std::string>("--pairs-exp1", track("pairs_exp1"),
                                        "same-cell pairs per cell");
  cmd->add_option_function<std::string>("--pairs-exp2", track("pairs_exp2"),
                                        "pairs per class per variety");
  cmd->add_option_function<std::string>("--pairs-exp3", track("pairs_exp3"),
                                        "cross-register pairs per variety");
  cmd->add_option_function<std::string>(
      "--pairs-exp4", track("pairs_exp4"),
      "pairs per condition per language-register");
  cmd->add_flag_callback(
      "--force", [&opts] { opts.overrides.emplace_back("force", "true"); },
      "rebuild requested stages, replacing mismatched or stale artifacts");
  cmd->add_flag("--quiet", opts.quiet, "suppress progress lines");
}

int fail_with(const char *what, int status) {
  std::fprintf(stderr, "corpsim: %s: %s\n", what, corpsim_last_error());
  return status;
}

int apply_options(corpsim_config *cfg, const Options &opts) {
  if (!opts.config_file.empty()) {
    if (int rc = corpsim_config_load(cfg, opts.config_file.c_str()))
      return rc;
  }
  for (const auto &[key, value] : opts.overrides) {
    if (int rc = corpsim_config_set(cfg, key.c_str(), value.c_str()))
      return rc;
  }
  if (!opts.quiet) corpsim_config_set_log(cfg, print_line, nullptr);
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"frequency-based corpus similarity across language "
               "varieties and registers"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  Options opts;
  std::string stages;       // filled per subcommand
  std::string experiments;  // exp subcommand positional
  std::vector<std::string> compare_paths;

  CLI::App *run = app.add_subcommand("run", "run every configured stage");
  CLI::App *ingest =
      app.add_subcommand("ingest", "segment the corpus into samples");
  CLI::App *count =
      app.add_subcommand("count", "count features for every sample");
  CLI::App *vocab =
      app.add_subcommand("vocab", "build per-language vocabularies");
  CLI::App *exp = app.add_subcommand(
      "exp", "run experiments (exp1..exp5, comma-separated)");
  exp->add_option("ids", experiments,
                  "experiments to run, e.g. exp1,exp3 (default: configured "
                  "selection)");
  CLI::App *geo = app.add_subcommand(
      "geo", "aggregate cross-register similarity by country");
  CLI::App *compare = app.add_subcommand(
      "compare", "compare two stored counts files directly");
  compare->add_option("files", compare_paths, "two counts TSV files")
      ->expected(2);
  CLI::App *synth = app.add_subcommand(
      "synth", "generate the synthetic validation corpus");
  synth->add_option("--config", opts.config_file,
                    "flat key=value config file");
  synth->add_flag("--quiet", opts.quiet, "suppress progress lines");
  for (const char *key :
       {"out", "languages", "varieties", "registers", "samples_per_cell",
        "sample_size", "doc_tokens", "types", "zipf_s", "register_div",
        "variety_div", "seed"}) {
    std::string flag = std::string("--") + key;
    for (char &c : flag)
      if (c == '_') c = '-';
    synth->add_option_function<std::string>(
        flag,
        [&opts, key](const std::string &v) {
          opts.overrides.emplace_back(std::string("synth.") + key, v);
        },
        std::string("synthetic corpus ") + key);
  }
  CLI::App *verify = app.add_subcommand(
      "verify", "audit workspace artifacts against their stamps");

  for (CLI::App *cmd : {run, ingest, count, vocab, exp, geo, verify})
    add_common_flags(cmd, opts);
  compare->add_flag("--quiet", opts.quiet, "suppress progress lines");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    // CLI11's exit() prints help/errors and maps to our usage exit code.
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  ConfigPtr cfg(corpsim_config_new());
  if (!cfg) {
    std::fprintf(stderr, "corpsim: out of memory\n");
    return 1;
  }
  if (int rc = apply_options(cfg.get(), opts))
    return fail_with("configuration", rc);

  if (run->parsed()) stages = "";
  if (ingest->parsed()) stages = "ingest";
  if (count->parsed()) stages = "count";
  if (vocab->parsed()) stages = "vocab";
  if (exp->parsed()) {
    stages = "exp";
    if (!experiments.empty()) {
      if (int rc = corpsim_config_set(cfg.get(), "experiments",
                                      experiments.c_str()))
        return fail_with("configuration", rc);
    }
  }
  if (geo->parsed()) stages = "geo";

  if (compare->parsed()) {
    corpsim_compare_result result;
    if (int rc = corpsim_compare(compare_paths[0].c_str(),
                                 compare_paths[1].c_str(), &result))
      return fail_with("compare", rc);
    std::printf("kind=%s features=%llu spearman=%.12g chi_square=%.12g\n",
                result.kind,
                static_cast<unsigned long long>(result.features),
                result.spearman, result.chi_square);
    return 0;
  }
  if (synth->parsed()) {
    if (int rc = corpsim_synth(cfg.get())) return fail_with("synth", rc);
    return 0;
  }
  if (verify->parsed()) {
    if (int rc = corpsim_verify(cfg.get())) return fail_with("verify", rc);
    return 0;
  }

  if (int rc = corpsim_run(cfg.get(), stages.c_str()))
    return fail_with("run", rc);
  return 0;
}
