#ifndef CORPSIM_STATS_HPP
#define CORPSIM_STATS_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace corpsim {

inline constexpr double kDefaultAlpha = 0.05;

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  double df = 0.0;       // Welch-Satterthwaite or n-2; 0 for permutation p
  size_t n1 = 0, n2 = 0; // n2 == 0 for one-sample style tests
  double alpha = kDefaultAlpha;
  bool significant = false;
};

// Spearman rank correlation with a two-sided significance test. Uses exact
// permutation enumeration up to n = 8 and the t-approximation above that.
TestResult spearman_rank_correlation(std::span<const double> xs,
                                     std::span<const double> ys,
                                     double alpha = kDefaultAlpha);

// Welch's unequal-variance t-test, two-sided.
TestResult welch_t_test(std::span<const double> a, std::span<const double> b,
                        double alpha = kDefaultAlpha);

struct Summary {
  size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;  // sample (n-1); 0 when n == 1, flagged below
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  bool single_observation = false;
};

Summary descriptive_stats(std::span<const double> values);

double mean_of(std::span<const double> values);

}  // namespace corpsim

#endif
