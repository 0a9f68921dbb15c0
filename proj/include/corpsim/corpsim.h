/* corpsim C API: corpus-similarity pipeline behind a stable ABI.
 *
 * Every function that can fail returns an int status:
 *   0  success
 *   1  runtime failure (I/O, corrupt data, undefined statistic, ...)
 *   2  usage error (bad key, bad value, missing precondition)
 * On failure corpsim_last_error() returns a thread-local message that
 * stays valid until the next corpsim_* call on the same thread.
 */
#ifndef CORPSIM_H
#define CORPSIM_H

#include <stddef.h>
#include <stdint.h>

#ifndef CORPSIM_API
#if defined(__GNUC__)
#define CORPSIM_API __attribute__((visibility("default")))
#else
#define CORPSIM_API
#endif
#endif

#ifdef __cplusplus
extern "C" {
#endif

CORPSIM_API const char *corpsim_version(void);
CORPSIM_API const char *corpsim_last_error(void);

/* ---- run configuration (opaque) ---------------------------------- */

typedef struct corpsim_config corpsim_config;

/* Allocates a config holding the documented defaults; NULL only on
 * allocation failure. Free with corpsim_config_free (NULL is a no-op). */
CORPSIM_API corpsim_config *corpsim_config_new(void);
CORPSIM_API void corpsim_config_free(corpsim_config *cfg);

/* Merges a flat key=value config file into cfg. */
CORPSIM_API int corpsim_config_load(corpsim_config *cfg, const char *path);

/* Sets one field by its config-file key (e.g. "corpus", "seed",
 * "synth.zipf_s"). Unknown keys and malformed values return 2. */
CORPSIM_API int corpsim_config_set(corpsim_config *cfg, const char *key,
                                   const char *value);

/* Writes the configuration digest (16 hex chars + NUL) that the pipeline
 * embeds in its report artifacts. buf_size must be >= 17. */
CORPSIM_API int corpsim_config_digest(const corpsim_config *cfg, char *buf,
                                      size_t buf_size);

/* Progress lines from runs under this config are passed to fn; pass
 * fn = NULL to silence them (the default). */
typedef void (*corpsim_log_fn)(const char *line, void *user);
CORPSIM_API void corpsim_config_set_log(corpsim_config *cfg,
                                        corpsim_log_fn fn, void *user);

/* ---- pipeline ------------------------------------------------------ */

/* Runs the named stages ("ingest", "count", "vocab", "exp", "geo" as a
 * comma-separated list) plus their prerequisites; NULL or "" runs
 * everything the config's experiment selection needs. Stages whose
 * workspace stamp matches the config digest are skipped. */
CORPSIM_API int corpsim_run(corpsim_config *cfg, const char *stages);

/* Generates the synthetic validation corpus described by the synth.*
 * keys of cfg. */
CORPSIM_API int corpsim_synth(corpsim_config *cfg);

/* Audits the workspace named by cfg: artifacts must exist, parse, pass
 * their checksums, and agree with the stage stamps. Returns 0 when the
 * workspace is consistent, 1 when problems were found. */
CORPSIM_API int corpsim_verify(corpsim_config *cfg);

/* ---- standalone comparison ---------------------------------------- */

typedef struct corpsim_compare_result {
  double spearman;   /* rank correlation over the union vocabulary */
  double chi_square; /* homogeneity statistic over the same features */
  uint64_t features; /* union vocabulary size */
  char kind[8];      /* "word" or "char3" */
} corpsim_compare_result;

/* Compares two stored counts files (TSV as written by the count stage). */
CORPSIM_API int corpsim_compare(const char *counts_a, const char *counts_b,
                                corpsim_compare_result *out);

/* ---- numeric kernels ----------------------------------------------- */

/* Spearman rank correlation (average-tie ranks); n >= 2, neither input
 * constant. */
CORPSIM_API int corpsim_spearman(const double *a, const double *b, size_t n,
                                 double *rho_out);

/* Chi-square homogeneity statistic over two frequency vectors; features
 * absent from both sides are skipped. */
CORPSIM_API int corpsim_chi_square(const uint32_t *a, const uint32_t *b,
                                   size_t n, double *chi2_out);

/* Welch's unequal-variance two-sided t-test. Any output pointer may be
 * NULL. */
CORPSIM_API int corpsim_welch(const double *a, size_t na, const double *b,
                              size_t nb, double alpha, double *t_out,
                              double *df_out, double *p_out);

/* Spearman correlation with a two-sided significance test: exact
 * permutation enumeration for n <= 8, t-approximation above. */
CORPSIM_API int corpsim_spearman_test(const double *xs, const double *ys,
                                      size_t n, double alpha,
                                      double *rho_out, double *p_out);

#ifdef __cplusplus
}
#endif

#endif /* CORPSIM_H */
