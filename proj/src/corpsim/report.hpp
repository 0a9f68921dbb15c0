#ifndef CORPSIM_REPORT_HPP
#define CORPSIM_REPORT_HPP

#include <string>

#include "corpsim/experiments.hpp"

namespace corpsim {

// Report writers. Each experiment emits a CSV (stable schema, documented
// header row) and a JSON sidecar carrying the config digest, seed, warnings,
// and the raw per-group score arrays. Rows are pre-sorted by construction;
// all numbers are emitted locale-independently.
void write_exp1_report(const std::string &dir, const Exp1Report &report,
                       const std::string &config_digest, uint64_t seed);
void write_exp2_report(const std::string &dir, const Exp2Report &report,
                       const std::string &config_digest, uint64_t seed);
void write_exp3_report(const std::string &dir, const Exp3Report &report,
                       const std::string &config_digest, uint64_t seed);
void write_exp4_report(const std::string &dir, const Exp4Report &report,
                       const std::string &config_digest, uint64_t seed);
void write_exp5_report(const std::string &dir, const Exp5Report &report,
                       const std::string &config_digest, uint64_t seed);
void write_geo_report(const std::string &dir, const GeoReport &report,
                      const std::string &config_digest, uint64_t seed);

// Rebuilds an Exp3Report (rows + stats, no observations) from the sidecar
// written by write_exp3_report, so aggregation can run in a later process.
Exp3Report load_exp3_sidecar(const std::string &path);

// Violin/map data: one JSON per language with per-country raw scores and
// summary stats, plus one country-level map table. Errors when the report
// carries no raw score arrays.
void emit_plot_data(const std::string &dir, const Exp3Report &exp3,
                    const GeoReport &geo);

}  // namespace corpsim

#endif
