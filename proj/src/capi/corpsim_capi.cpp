#include "corpsim/corpsim.h"

#include <cstdio>
#include <cstring>
#include <exception>
#include <new>
#include <span>
#include <string>

#include "corpsim/pipeline.hpp"
#include "corpsim/similarity.hpp"
#include "corpsim/stats.hpp"
#include "corpsim/util.hpp"

using namespace corpsim;

// The public handle: config plus the log sink runs report through.
struct corpsim_config {
  RunConfig config;
  corpsim_log_fn log_fn = nullptr;
  void *log_user = nullptr;

  LogFn sink() const {
    if (!log_fn) return {};
    corpsim_log_fn fn = log_fn;
    void *user = log_user;
    return [fn, user](std::string_view line) {
      std::string owned(line);
      fn(owned.c_str(), user);
    };
  }
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string &msg) { g_last_error = msg; }

// Wraps an API body: translates exceptions into status codes and the
// thread-local error message.
template <typename Fn>
int guarded(Fn &&fn) {
  g_last_error.clear();
  try {
    return fn();
  } catch (const Error &e) {
    set_error(e.what());
    return static_cast<int>(e.kind());
  } catch (const std::exception &e) {
    set_error(e.what());
    return 1;
  } catch (...) {
    set_error("unknown failure");
    return 1;
  }
}

int require(bool ok, const char *msg) {
  if (ok) return 0;
  set_error(msg);
  return 2;
}

}  // namespace

extern "C" {

const char *corpsim_version(void) { return "0.1.0"; }

const char *corpsim_last_error(void) { return g_last_error.c_str(); }

corpsim_config *corpsim_config_new(void) {
  return new (std::nothrow) corpsim_config();
}

void corpsim_config_free(corpsim_config *cfg) { delete cfg; }

int corpsim_config_load(corpsim_config *cfg, const char *path) {
  if (int rc = require(cfg && path, "config and path must be non-NULL"))
    return rc;
  return guarded([&] {
    merge_run_config(cfg->config, path);
    return 0;
  });
}

int corpsim_config_set(corpsim_config *cfg, const char *key,
                       const char *value) {
  if (int rc = require(cfg && key && value,
                       "config, key, and value must be non-NULL"))
    return rc;
  return guarded([&] {
    set_config_value(cfg->config, key, value);
    return 0;
  });
}

int corpsim_config_digest(const corpsim_config *cfg, char *buf,
                          size_t buf_size) {
  if (int rc = require(cfg && buf, "config and buffer must be non-NULL"))
    return rc;
  if (int rc = require(buf_size >= 17, "digest buffer must hold 17 bytes"))
    return rc;
  return guarded([&] {
    std::string digest = cfg->config.stage_digest(Stage::Exp);
    std::memcpy(buf, digest.c_str(), digest.size() + 1);
    return 0;
  });
}

void corpsim_config_set_log(corpsim_config *cfg, corpsim_log_fn fn,
                            void *user) {
  if (!cfg) return;
  cfg->log_fn = fn;
  cfg->log_user = user;
}

int corpsim_run(corpsim_config *cfg, const char *stages) {
  if (int rc = require(cfg != nullptr, "config must be non-NULL")) return rc;
  return guarded([&] {
    std::vector<std::string> list;
    if (stages && *stages) {
      for (std::string_view tok : split_view(stages, ',')) {
        std::string_view t = trim(tok);
        if (!t.empty()) list.emplace_back(t);
      }
    }
    run_pipeline(cfg->config, list, cfg->sink());
    return 0;
  });
}

int corpsim_synth(corpsim_config *cfg) {
  if (int rc = require(cfg != nullptr, "config must be non-NULL")) return rc;
  return guarded([&] {
    run_synth(cfg->config, cfg->sink());
    return 0;
  });
}

int corpsim_verify(corpsim_config *cfg) {
  if (int rc = require(cfg != nullptr, "config must be non-NULL")) return rc;
  return guarded([&] {
    if (verify_workspace(cfg->config, cfg->sink())) return 0;
    set_error("workspace is inconsistent");
    return 1;
  });
}

int corpsim_compare(const char *counts_a, const char *counts_b,
                    corpsim_compare_result *out) {
  if (int rc = require(counts_a && counts_b && out,
                       "paths and result must be non-NULL"))
    return rc;
  return guarded([&] {
    CompareResult r = compare_counts(counts_a, counts_b);
    out->spearman = r.spearman;
    out->chi_square = r.chi_square;
    out->features = r.features;
    std::snprintf(out->kind, sizeof(out->kind), "%s", to_string(r.kind));
    return 0;
  });
}

int corpsim_spearman(const double *a, const double *b, size_t n,
                     double *rho_out) {
  if (int rc = require(a && b && rho_out, "inputs must be non-NULL"))
    return rc;
  return guarded([&] {
    *rho_out = spearman_from_values(std::span(a, n), std::span(b, n));
    return 0;
  });
}

int corpsim_chi_square(const uint32_t *a, const uint32_t *b, size_t n,
                       double *chi2_out) {
  if (int rc = require(a && b && chi2_out, "inputs must be non-NULL"))
    return rc;
  return guarded([&] {
    *chi2_out = chi_square_from_values(std::span(a, n), std::span(b, n));
    return 0;
  });
}

int corpsim_welch(const double *a, size_t na, const double *b, size_t nb,
                  double alpha, double *t_out, double *df_out,
                  double *p_out) {
  if (int rc = require(a && b, "inputs must be non-NULL")) return rc;
  return guarded([&] {
    TestResult r = welch_t_test(std::span(a, na), std::span(b, nb), alpha);
    if (t_out) *t_out = r.statistic;
    if (df_out) *df_out = r.df;
    if (p_out) *p_out = r.p_value;
    return 0;
  });
}

int corpsim_spearman_test(const double *xs, const double *ys, size_t n,
                          double alpha, double *rho_out, double *p_out) {
  if (int rc = require(xs && ys, "inputs must be non-NULL")) return rc;
  return guarded([&] {
    TestResult r =
        spearman_rank_correlation(std::span(xs, n), std::span(ys, n), alpha);
    if (rho_out) *rho_out = r.statistic;
    if (p_out) *p_out = r.p_value;
    return 0;
  });
}

}  // extern "C"
