#include "corpsim/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "corpsim/similarity.hpp"
#include "corpsim/util.hpp"

namespace corpsim {

const char *to_string(PairCondition c) {
  switch (c) {
    case PairCondition::SameCell:
      return "same_cell";
    case PairCondition::SameRegisterDifferentVariety:
      return "same_register_different_variety";
    case PairCondition::CrossRegisterSameVariety:
      return "cross_register_same_variety";
    case PairCondition::SameVariety:
      return "same_variety";
    case PairCondition::DifferentVariety:
      return "different_variety";
  }
  return "?";
}

bool condition_consistent(PairCondition c, const VarietyKey &a,
                          const VarietyKey &b) {
  switch (c) {
    case PairCondition::SameCell:
      return a == b;
    case PairCondition::SameRegisterDifferentVariety:
      return a.reg == b.reg && a.language == b.language &&
             a.country != b.country;
    case PairCondition::CrossRegisterSameVariety:
      return a.same_variety(b) && a.reg != b.reg;
    case PairCondition::SameVariety:
      return a.same_variety(b);
    case PairCondition::DifferentVariety:
      return a.language == b.language && a.country != b.country;
  }
  return false;
}

std::map<VarietyKey, std::vector<uint32_t>> group_by_cell(
    const SampleManifest &manifest) {
  std::map<VarietyKey, std::vector<uint32_t>> cells;
  for (size_t i = 0; i < manifest.samples.size(); ++i)
    cells[manifest.samples[i].key].push_back(static_cast<uint32_t>(i));
  return cells;
}

KindVectors build_kind_vectors(const SampleManifest &manifest,
                               FeatureKind kind,
                               std::vector<std::vector<uint32_t>> values,
                               int workers) {
  if (values.size() != manifest.samples.size())
    fail("expected %zu projected vectors, got %zu", manifest.samples.size(),
         values.size());
  KindVectors kv;
  kv.kind = kind;
  kv.values = std::move(values);
  kv.ranks.resize(kv.values.size());
  parallel_for(kv.values.size(), workers, [&](size_t i) {
    const std::vector<uint32_t> &v = kv.values[i];
    bool constant = true;
    for (size_t j = 1; j < v.size(); ++j)
      if (v[j] != v[0]) {
        constant = false;
        break;
      }
    if (v.size() < 2 || constant) {
      const Sample &s = manifest.samples[i];
      fail("correlation undefined: sample %s#%u has constant %s frequencies",
           s.key.label().c_str(), s.index, to_string(kind));
    }
    kv.ranks[i] = rank_with_ties(std::span<const uint32_t>(v));
  });
  return kv;
}

std::vector<std::pair<uint32_t, uint32_t>> sample_pairs(
    std::span<const uint32_t> population,
    const std::function<bool(uint32_t, uint32_t)> &eligible, uint32_t n,
    uint64_t seed, const std::string &what,
    std::vector<std::string> *warnings) {
  std::vector<std::pair<uint32_t, uint32_t>> all;
  for (size_t i = 0; i < population.size(); ++i)
    for (size_t j = i + 1; j < population.size(); ++j)
      if (eligible(population[i], population[j]))
        all.emplace_back(population[i], population[j]);

  if (all.empty()) {
    if (warnings) warnings->push_back(what + ": no eligible pairs; skipped");
    return all;
  }
  if (all.size() <= n) {
    if (all.size() < n && warnings) {
      char msg[96];
      std::snprintf(msg, sizeof msg,
                    ": only %zu of requested %u pairs exist; using all",
                    all.size(), n);
      warnings->push_back(what + msg);
    }
    return all;
  }
  Rng rng(seed);
  rng.prefix_shuffle(all, n);
  all.resize(n);
  std::sort(all.begin(), all.end());
  return all;
}

std::vector<double> score_pairs(
    const KindVectors &vectors,
    std::span<const std::pair<uint32_t, uint32_t>> pairs, int workers) {
  std::vector<double> scores(pairs.size());
  parallel_for(pairs.size(), workers, [&](size_t i) {
    scores[i] =
        pearson_on_ranks(vectors.ranks[pairs[i].first],
                         vectors.ranks[pairs[i].second]);
  });
  return scores;
}

namespace {

void record(std::vector<PairObservation> &out,
            std::span<const std::pair<uint32_t, uint32_t>> pairs,
            std::span<const double> scores, FeatureKind kind,
            PairCondition condition) {
  for (size_t i = 0; i < pairs.size(); ++i)
    out.push_back(
        {pairs[i].first, pairs[i].second, kind, condition, scores[i]});
}

// language -> country -> members per register (index Register enum value).
using VarietyMap =
    std::map<std::string,
             std::map<std::string, std::array<std::vector<uint32_t>, 2>>>;

VarietyMap group_by_variety(const SampleManifest &manifest) {
  VarietyMap out;
  for (size_t i = 0; i < manifest.samples.size(); ++i) {
    const VarietyKey &key = manifest.samples[i].key;
    out[key.language][key.country][static_cast<size_t>(key.reg)].push_back(
        static_cast<uint32_t>(i));
  }
  return out;
}

std::string kindseed(const std::string &base, FeatureKind kind) {
  return base + "|" + to_string(kind);
}

}  // namespace

Exp1Report exp1_internal_consistency(
    const SampleManifest &manifest,
    std::span<const KindVectors *const> kinds,
    const ExperimentConfig &config) {
  Exp1Report report;
  auto cells = group_by_cell(manifest);
  for (const auto &[key, members] : cells) {
    if (members.size() < 2) {
      report.warnings.push_back("exp1: cell " + key.label() +
                                " has fewer than 2 samples; skipped");
      continue;
    }
    for (const KindVectors *kv : kinds) {
      std::string what = "exp1 " + key.label() + " " + to_string(kv->kind);
      auto eligible = [&](uint32_t a, uint32_t b) {
        return manifest.samples[a].key == manifest.samples[b].key;
      };
      auto pairs = sample_pairs(
          members, eligible, config.pairs_exp1,
          mix_seed(config.seed, kindseed("exp1|" + key.label(), kv->kind)),
          what, &report.warnings);
      if (pairs.empty()) continue;
      std::vector<double> scores = score_pairs(*kv, pairs, config.workers);
      Exp1Cell cell;
      cell.key = key;
      cell.kind = kv->kind;
      cell.pairs = static_cast<uint32_t>(pairs.size());
      cell.stats = descriptive_stats(scores);
      cell.scores = scores;
      report.cells.push_back(std::move(cell));
      record(report.observations, pairs, scores, kv->kind,
             PairCondition::SameCell);
    }
  }
  // Table-3 shape: mean of cell means per language, register, and kind.
  std::map<std::tuple<std::string, Register, FeatureKind>,
           std::pair<double, uint32_t>>
      acc;
  for (const Exp1Cell &cell : report.cells) {
    auto &slot = acc[{cell.key.language, cell.key.reg, cell.kind}];
    slot.first += cell.stats.mean;
    slot.second += 1;
  }
  for (const auto &[k, v] : acc) {
    Exp1Summary row;
    row.language = std::get<0>(k);
    row.reg = std::get<1>(k);
    row.kind = std::get<2>(k);
    row.cells = v.second;
    row.mean_rho = v.first / v.second;
    report.summary.push_back(std::move(row));
  }
  return report;
}

Exp2Report exp2_feature_accuracy(const SampleManifest &manifest,
                                 std::span<const KindVectors *const> kinds,
                                 const ExperimentConfig &config) {
  Exp2Report report;
  VarietyMap varieties = group_by_variety(manifest);
  for (const auto &[language, countries] : varieties) {
    // A variety takes part when both of its registers can form same-register
    // pairs.
    std::vector<std::string> eligible_varieties;
    for (const auto &[country, regs] : countries) {
      size_t tw = regs[0].size(), cc = regs[1].size();
      if (tw >= 2 && cc >= 2) {
        eligible_varieties.push_back(country);
      } else {
        report.warnings.push_back("exp2: variety " + language + "_" + country +
                                  " lacks 2 samples in each register; "
                                  "excluded");
      }
    }
    if (eligible_varieties.empty()) {
      report.warnings.push_back("exp2: language " + language +
                                " has no usable variety; skipped");
      continue;
    }
    for (const KindVectors *kv : kinds) {
      std::vector<std::pair<uint32_t, uint32_t>> same_pairs, cross_pairs;
      for (const std::string &country : eligible_varieties) {
        const auto &regs = countries.at(country);
        std::vector<uint32_t> population = regs[0];
        population.insert(population.end(), regs[1].begin(), regs[1].end());
        std::string label = language + "_" + country;
        auto same_eligible = [&](uint32_t a, uint32_t b) {
          return manifest.samples[a].key == manifest.samples[b].key;
        };
        auto cross_eligible = [&](uint32_t a, uint32_t b) {
          const VarietyKey &ka = manifest.samples[a].key;
          const VarietyKey &kb = manifest.samples[b].key;
          return ka.same_variety(kb) && ka.reg != kb.reg;
        };
        auto same = sample_pairs(
            population, same_eligible, config.pairs_exp2,
            mix_seed(config.seed, kindseed("exp2-same|" + label, kv->kind)),
            "exp2 same-register " + label, &report.warnings);
        auto cross = sample_pairs(
            population, cross_eligible, config.pairs_exp2,
            mix_seed(config.seed, kindseed("exp2-cross|" + label, kv->kind)),
            "exp2 cross-register " + label, &report.warnings);
        same_pairs.insert(same_pairs.end(), same.begin(), same.end());
        cross_pairs.insert(cross_pairs.end(), cross.begin(), cross.end());
      }
      std::vector<double> same_scores =
          score_pairs(*kv, same_pairs, config.workers);
      std::vector<double> cross_scores =
          score_pairs(*kv, cross_pairs, config.workers);
      double same_mean = mean_of(same_scores);
      double cross_mean = mean_of(cross_scores);
      // Nearest class mean; an exact tie counts as a cross-register guess.
      uint32_t correct = 0;
      for (double s : same_scores)
        if (std::fabs(s - same_mean) < std::fabs(s - cross_mean)) ++correct;
      for (double s : cross_scores)
        if (std::fabs(s - cross_mean) <= std::fabs(s - same_mean)) ++correct;
      Exp2Row row;
      row.language = language;
      row.kind = kv->kind;
      row.varieties = static_cast<uint32_t>(eligible_varieties.size());
      row.pairs_same = static_cast<uint32_t>(same_scores.size());
      row.pairs_cross = static_cast<uint32_t>(cross_scores.size());
      row.same_mean = same_mean;
      row.cross_mean = cross_mean;
      row.correct = correct;
      row.accuracy = static_cast<double>(correct) /
                     static_cast<double>(same_scores.size() +
                                         cross_scores.size());
      row.same_scores = same_scores;
      row.cross_scores = cross_scores;
      report.rows.push_back(std::move(row));
      record(report.observations, same_pairs, same_scores, kv->kind,
             PairCondition::SameCell);
      record(report.observations, cross_pairs, cross_scores, kv->kind,
             PairCondition::CrossRegisterSameVariety);
    }
  }
  return report;
}

Exp3Report exp3_cross_register(const SampleManifest &manifest,
                               const KindVectors &vectors,
                               const ExperimentConfig &config) {
  Exp3Report report;
  VarietyMap varieties = group_by_variety(manifest);
  for (const auto &[language, countries] : varieties) {
    for (const auto &[country, regs] : countries) {
      if (regs[0].empty() || regs[1].empty()) {
        report.warnings.push_back("exp3: variety " + language + "_" + country +
                                  " is present in only one register; "
                                  "excluded");
        continue;
      }
      std::vector<uint32_t> population = regs[0];
      population.insert(population.end(), regs[1].begin(), regs[1].end());
      std::string label = language + "_" + country;
      auto eligible = [&](uint32_t a, uint32_t b) {
        const VarietyKey &ka = manifest.samples[a].key;
        const VarietyKey &kb = manifest.samples[b].key;
        return ka.same_variety(kb) && ka.reg != kb.reg;
      };
      auto pairs = sample_pairs(
          population, eligible, config.pairs_exp3,
          mix_seed(config.seed, kindseed("exp3|" + label, vectors.kind)),
          "exp3 " + label, &report.warnings);
      if (pairs.empty()) continue;
      std::vector<double> scores = score_pairs(vectors, pairs, config.workers);
      Exp3Row row;
      row.language = language;
      row.country = country;
      row.kind = vectors.kind;
      row.pairs = static_cast<uint32_t>(pairs.size());
      row.stats = descriptive_stats(scores);
      row.scores = scores;
      report.rows.push_back(std::move(row));
      record(report.observations, pairs, scores, vectors.kind,
             PairCondition::CrossRegisterSameVariety);
    }
  }
  return report;
}

Exp4Report exp4_within_vs_between(const SampleManifest &manifest,
                                  const KindVectors &vectors,
                                  const ExperimentConfig &config) {
  Exp4Report report;
  VarietyMap varieties = group_by_variety(manifest);
  for (const auto &[language, countries] : varieties) {
    for (size_t reg_idx = 0; reg_idx < 2; ++reg_idx) {
      Register reg = static_cast<Register>(reg_idx);
      std::vector<uint32_t> population;
      size_t present_countries = 0;
      for (const auto &[country, regs] : countries) {
        if (regs[reg_idx].empty()) continue;
        ++present_countries;
        population.insert(population.end(), regs[reg_idx].begin(),
                          regs[reg_idx].end());
      }
      std::string label = language + "/" + to_string(reg);
      if (present_countries < 2) {
        if (present_countries == 1)
          report.warnings.push_back("exp4: " + label +
                                    " has a single variety; skipped");
        continue;
      }
      auto same_eligible = [&](uint32_t a, uint32_t b) {
        return manifest.samples[a].key.same_variety(manifest.samples[b].key);
      };
      auto diff_eligible = [&](uint32_t a, uint32_t b) {
        return !manifest.samples[a].key.same_variety(manifest.samples[b].key);
      };
      auto same = sample_pairs(
          population, same_eligible, config.pairs_exp4,
          mix_seed(config.seed, kindseed("exp4-same|" + label, vectors.kind)),
          "exp4 same-variety " + label, &report.warnings);
      auto diff = sample_pairs(
          population, diff_eligible, config.pairs_exp4,
          mix_seed(config.seed, kindseed("exp4-diff|" + label, vectors.kind)),
          "exp4 different-variety " + label, &report.warnings);
      if (same.size() < 2 || diff.size() < 2) {
        report.warnings.push_back("exp4: " + label +
                                  " has too few pairs for a t-test; skipped");
        continue;
      }
      std::vector<double> same_scores =
          score_pairs(vectors, same, config.workers);
      std::vector<double> diff_scores =
          score_pairs(vectors, diff, config.workers);
      Exp4Row row;
      row.language = language;
      row.reg = reg;
      row.kind = vectors.kind;
      row.pairs_same = static_cast<uint32_t>(same.size());
      row.pairs_diff = static_cast<uint32_t>(diff.size());
      row.same_mean = mean_of(same_scores);
      row.diff_mean = mean_of(diff_scores);
      row.test = welch_t_test(same_scores, diff_scores, config.alpha);
      row.same_scores = same_scores;
      row.diff_scores = diff_scores;
      report.rows.push_back(std::move(row));
      record(report.observations, same, same_scores, vectors.kind,
             PairCondition::SameVariety);
      record(report.observations, diff, diff_scores, vectors.kind,
             PairCondition::DifferentVariety);
    }
  }
  return report;
}

namespace {

// Spearman rho between the language centroid and one cell's mean vector.
double centroid_rho(const std::vector<double> &centroid,
                    const std::vector<double> &cell_mean,
                    const std::string &what) {
  for (const auto *v : {&centroid, &cell_mean}) {
    bool constant = true;
    for (size_t i = 1; i < v->size(); ++i)
      if ((*v)[i] != (*v)[0]) {
        constant = false;
        break;
      }
    if (constant)
      fail("correlation undefined: %s is constant", what.c_str());
  }
  std::vector<double> ra =
      rank_with_ties(std::span<const double>(centroid));
  std::vector<double> rb =
      rank_with_ties(std::span<const double>(cell_mean));
  return pearson_on_ranks(ra, rb);
}

std::vector<double> mean_vector(const KindVectors &vectors,
                                std::span<const uint32_t> members) {
  const size_t dim = vectors.values[members[0]].size();
  std::vector<double> mean(dim, 0.0);
  for (uint32_t idx : members)
    for (size_t d = 0; d < dim; ++d) mean[d] += vectors.values[idx][d];
  for (double &v : mean) v /= static_cast<double>(members.size());
  return mean;
}

// rank 1 = most divergent = lowest rho; ties take average ranks.
std::vector<double> divergence_ranks(const std::vector<double> &rhos) {
  std::vector<double> negated(rhos.size());
  for (size_t i = 0; i < rhos.size(); ++i) negated[i] = -rhos[i];
  return rank_with_ties(std::span<const double>(negated));
}

}  // namespace

Exp5Report exp5_variety_ranks(const SampleManifest &manifest,
                              const KindVectors &vectors,
                              const ExperimentConfig &config) {
  Exp5Report report;
  VarietyMap varieties = group_by_variety(manifest);
  std::vector<double> pooled_tw, pooled_cc;
  uint32_t pooled_varieties = 0;
  for (const auto &[language, countries] : varieties) {
    std::vector<std::string> participating;
    std::vector<uint32_t> all_members;
    for (const auto &[country, regs] : countries) {
      for (const auto &members : regs)
        all_members.insert(all_members.end(), members.begin(), members.end());
      if (!regs[0].empty() && !regs[1].empty()) {
        participating.push_back(country);
      } else {
        report.warnings.push_back("exp5: variety " + language + "_" + country +
                                  " is present in only one register; dropped "
                                  "from both rank lists");
      }
    }
    if (participating.size() < 3) {
      report.warnings.push_back(
          "exp5: language " + language +
          " has fewer than 3 varieties in both registers; skipped");
      continue;
    }
    std::vector<double> centroid = mean_vector(vectors, all_members);
    std::vector<double> rho_tw, rho_cc;
    for (const std::string &country : participating) {
      const auto &regs = countries.at(country);
      std::string label = language + "_" + country;
      rho_tw.push_back(centroid_rho(
          centroid, mean_vector(vectors, regs[0]),
          "cell mean of " + label + "_tw or the " + language + " centroid"));
      rho_cc.push_back(centroid_rho(
          centroid, mean_vector(vectors, regs[1]),
          "cell mean of " + label + "_cc or the " + language + " centroid"));
    }
    std::vector<double> rank_tw = divergence_ranks(rho_tw);
    std::vector<double> rank_cc = divergence_ranks(rho_cc);
    for (size_t i = 0; i < participating.size(); ++i) {
      report.ranks.push_back({language, participating[i], Register::TW,
                              rho_tw[i], rank_tw[i]});
      report.ranks.push_back({language, participating[i], Register::CC,
                              rho_cc[i], rank_cc[i]});
    }
    Exp5Row row;
    row.language = language;
    row.varieties = static_cast<uint32_t>(participating.size());
    row.test = spearman_rank_correlation(rank_tw, rank_cc, config.alpha);
    report.rows.push_back(std::move(row));
    pooled_tw.insert(pooled_tw.end(), rank_tw.begin(), rank_tw.end());
    pooled_cc.insert(pooled_cc.end(), rank_cc.begin(), rank_cc.end());
    pooled_varieties += row.varieties;
  }
  if (!report.rows.empty()) {
    Exp5Row pooled;
    pooled.language = "all";
    pooled.varieties = pooled_varieties;
    pooled.test = spearman_rank_correlation(pooled_tw, pooled_cc, config.alpha);
    report.rows.push_back(std::move(pooled));
  }
  return report;
}

GeoReport geo_aggregate(const Exp3Report &exp3) {
  if (exp3.rows.empty())
    fail("geographic aggregation needs a non-empty cross-register report");
  std::map<std::string, std::pair<double, uint32_t>> acc;
  for (const Exp3Row &row : exp3.rows) {
    auto &slot = acc[row.country];
    slot.first += row.stats.mean;
    slot.second += 1;
  }
  GeoReport report;
  for (const auto &[country, slot] : acc)
    report.rows.push_back({country, slot.second, slot.first / slot.second});
  return report;
}

size_t audit_observations(const SampleManifest &manifest,
                          std::span<const PairObservation> observations) {
  size_t mismatches = 0;
  for (const PairObservation &obs : observations) {
    if (obs.a == obs.b || obs.a >= manifest.samples.size() ||
        obs.b >= manifest.samples.size()) {
      ++mismatches;
      continue;
    }
    if (!condition_consistent(obs.condition, manifest.samples[obs.a].key,
                              manifest.samples[obs.b].key))
      ++mismatches;
  }
  return mismatches;
}

}  // namespace corpsim
