#ifndef CORPSIM_SIMILARITY_HPP
#define CORPSIM_SIMILARITY_HPP

#include <span>
#include <string_view>
#include <vector>

#include "corpsim/features.hpp"

namespace corpsim {

// Average-tie ranking, rank 1 = highest value. Ties get the mean of the
// ranks they span, so the rank sum is always n(n+1)/2.
std::vector<double> rank_with_ties(std::span<const double> values);
std::vector<double> rank_with_ties(std::span<const uint32_t> values);

// Pearson correlation of two equal-length rank vectors. Exposed for the
// rank-correlation test; assumes rank semantics (mean is (n+1)/2).
double pearson_on_ranks(std::span<const double> ra, std::span<const double> rb);

// Spearman rho over raw frequency values. Errors if either side is
// constant (all-zero included), naming the offending sample.
double spearman_from_values(std::span<const uint32_t> a,
                            std::span<const uint32_t> b,
                            std::string_view name_a = "a",
                            std::string_view name_b = "b");
double spearman_from_values(std::span<const double> a,
                            std::span<const double> b,
                            std::string_view name_a = "a",
                            std::string_view name_b = "b");

double spearman_similarity(const FrequencyVector &a, const FrequencyVector &b,
                           std::string_view name_a = "a",
                           std::string_view name_b = "b");

// χ² distance with expectations from the two vector totals. Skips features
// absent from both sides; errors if either total is zero.
double chi_square_from_values(std::span<const uint32_t> a,
                              std::span<const uint32_t> b,
                              std::string_view name_a = "a",
                              std::string_view name_b = "b");

double chi_square_distance(const FrequencyVector &a, const FrequencyVector &b,
                           std::string_view name_a = "a",
                           std::string_view name_b = "b");

}  // namespace corpsim

#endif
