#include "corpsim/stats.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "corpsim/similarity.hpp"
#include "corpsim/util.hpp"

namespace corpsim {

namespace {

bool all_equal(std::span<const double> v) {
  for (size_t i = 1; i < v.size(); ++i)
    if (v[i] != v[0]) return false;
  return true;
}

double sample_variance(std::span<const double> v, double mean) {
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return acc / static_cast<double>(v.size() - 1);
}

double two_sided_t_pvalue(double t, double df) {
  if (!std::isfinite(t)) return 0.0;
  boost::math::students_t dist(df);
  return 2.0 * boost::math::cdf(dist, -std::fabs(t));
}

// Fraction of rank permutations of ys whose |rho| reaches the observed
// |rho|. Enumerates all n! orders; callers cap n at 8 (40320 orders).
double permutation_pvalue(std::span<const double> rx,
                          std::span<const double> ry, double observed) {
  size_t n = ry.size();
  std::vector<uint32_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0u);
  std::vector<double> shuffled(n);
  double threshold = std::fabs(observed) - 1e-12;
  uint64_t hits = 0, count = 0;
  do {
    for (size_t i = 0; i < n; ++i) shuffled[i] = ry[perm[i]];
    if (std::fabs(pearson_on_ranks(rx, shuffled)) >= threshold) ++hits;
    ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(hits) / static_cast<double>(count);
}

}  // namespace

TestResult spearman_rank_correlation(std::span<const double> xs,
                                     std::span<const double> ys, double alpha) {
  if (xs.size() != ys.size())
    fail("rank correlation needs equal-length lists (%zu vs %zu)", xs.size(),
         ys.size());
  size_t n = xs.size();
  if (n < 3) fail("rank correlation needs at least 3 observations");
  if (all_equal(xs) || all_equal(ys))
    fail("rank correlation undefined for a constant list");

  std::vector<double> rx = rank_with_ties(xs);
  std::vector<double> ry = rank_with_ties(ys);
  double rho = pearson_on_ranks(rx, ry);

  TestResult res;
  res.statistic = rho;
  res.n1 = n;
  res.alpha = alpha;
  if (n <= 8) {
    res.p_value = permutation_pvalue(rx, ry, rho);
    res.df = 0.0;
  } else {
    double nf = static_cast<double>(n);
    double denom = 1.0 - rho * rho;
    double t = denom <= 0.0
                   ? std::numeric_limits<double>::infinity()
                   : rho * std::sqrt((nf - 2.0) / denom);
    res.df = nf - 2.0;
    res.p_value = two_sided_t_pvalue(t, res.df);
  }
  res.significant = res.p_value < alpha;
  return res;
}

TestResult welch_t_test(std::span<const double> a, std::span<const double> b,
                        double alpha) {
  if (a.size() < 2 || b.size() < 2)
    fail("t-test needs at least 2 observations per sample (%zu, %zu)",
         a.size(), b.size());
  double na = static_cast<double>(a.size());
  double nb = static_cast<double>(b.size());
  double ma = mean_of(a);
  double mb = mean_of(b);
  double va = sample_variance(a, ma);
  double vb = sample_variance(b, mb);
  if (va == 0.0 && vb == 0.0) {
    if (ma == mb) fail("t-test degenerate: both samples are the same constant");
    fail("t-test undefined: both samples have zero variance");
  }
  double sa = va / na;
  double sb = vb / nb;
  double se = std::sqrt(sa + sb);
  double t = (ma - mb) / se;
  double df = (sa + sb) * (sa + sb) /
              (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));

  TestResult res;
  res.statistic = t;
  res.df = df;
  res.n1 = a.size();
  res.n2 = b.size();
  res.alpha = alpha;
  res.p_value = two_sided_t_pvalue(t, df);
  res.significant = res.p_value < alpha;
  return res;
}

double mean_of(std::span<const double> values) {
  double acc = 0.0;
  for (double x : values) acc += x;
  return acc / static_cast<double>(values.size());
}

namespace {

// Linear interpolation between order statistics (the common numpy default).
double quantile_sorted(const std::vector<double> &sorted, double q) {
  double pos = q * static_cast<double>(sorted.size() - 1);
  size_t lo = static_cast<size_t>(pos);
  if (lo + 1 >= sorted.size()) return sorted.back();
  double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

Summary descriptive_stats(std::span<const double> values) {
  if (values.empty()) fail("descriptive statistics of an empty list");
  Summary s;
  s.n = values.size();
  s.mean = mean_of(values);
  if (values.size() == 1) {
    s.sd = 0.0;
    s.single_observation = true;
  } else {
    s.sd = std::sqrt(sample_variance(values, s.mean));
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  s.min = sorted.front();
  s.max = sorted.back();
  s.q1 = quantile_sorted(sorted, 0.25);
  s.median = quantile_sorted(sorted, 0.5);
  s.q3 = quantile_sorted(sorted, 0.75);
  return s;
}

}  // namespace corpsim
