#include "corpsim/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "corpsim/util.hpp"

namespace corpsim {

namespace {

template <typename T>
std::vector<double> rank_desc(std::span<const T> values) {
  size_t n = values.size();
  std::vector<uint32_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0u);
  std::sort(idx.begin(), idx.end(), [&](uint32_t a, uint32_t b) {
    return values[a] > values[b];
  });
  std::vector<double> ranks(n);
  size_t i = 0;
  while (i < n) {
    size_t j = i + 1;
    while (j < n && values[idx[j]] == values[idx[i]]) ++j;
    // 0-based block [i, j) spans 1-based ranks i+1 .. j
    double avg = static_cast<double>(i + j + 1) / 2.0;
    for (size_t k = i; k < j; ++k) ranks[idx[k]] = avg;
    i = j;
  }
  return ranks;
}

template <typename T>
bool is_constant(std::span<const T> v) {
  for (size_t i = 1; i < v.size(); ++i)
    if (v[i] != v[0]) return false;
  return true;
}

}  // namespace

std::vector<double> rank_with_ties(std::span<const double> values) {
  return rank_desc(values);
}

std::vector<double> rank_with_ties(std::span<const uint32_t> values) {
  return rank_desc(values);
}

double pearson_on_ranks(std::span<const double> ra,
                        std::span<const double> rb) {
  size_t n = ra.size();
  if (n != rb.size()) fail("rank vectors differ in length");
  if (std::equal(ra.begin(), ra.end(), rb.begin())) return 1.0;
  // Average-tie ranks always sum to n(n+1)/2, so the mean is exact.
  double mean = static_cast<double>(n + 1) / 2.0;
  double sab = 0.0, sa = 0.0, sb = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double da = ra[i] - mean;
    double db = rb[i] - mean;
    sab += da * db;
    sa += da * da;
    sb += db * db;
  }
  if (sa == 0.0 || sb == 0.0) fail("rank correlation of a constant vector");
  // sqrt of the product (not product of sqrts) keeps clean rationals like
  // -1 and -0.5 exact.
  double rho = sab / std::sqrt(sa * sb);
  if (rho > 1.0) rho = 1.0;
  if (rho < -1.0) rho = -1.0;
  return rho;
}

namespace {

template <typename T>
double spearman_impl(std::span<const T> a, std::span<const T> b,
                     std::string_view name_a, std::string_view name_b) {
  if (a.size() != b.size())
    fail("cannot compare frequency vectors of lengths %zu and %zu", a.size(),
         b.size());
  if (a.size() < 2) fail("similarity needs vectors of length >= 2");
  if (is_constant(a))
    fail("correlation undefined: sample %.*s has constant frequencies",
         static_cast<int>(name_a.size()), name_a.data());
  if (is_constant(b))
    fail("correlation undefined: sample %.*s has constant frequencies",
         static_cast<int>(name_b.size()), name_b.data());
  std::vector<double> ra = rank_with_ties(a);
  std::vector<double> rb = rank_with_ties(b);
  return pearson_on_ranks(ra, rb);
}

}  // namespace

double spearman_from_values(std::span<const uint32_t> a,
                            std::span<const uint32_t> b,
                            std::string_view name_a, std::string_view name_b) {
  return spearman_impl(a, b, name_a, name_b);
}

double spearman_from_values(std::span<const double> a,
                            std::span<const double> b,
                            std::string_view name_a, std::string_view name_b) {
  return spearman_impl(a, b, name_a, name_b);
}

double spearman_similarity(const FrequencyVector &a, const FrequencyVector &b,
                           std::string_view name_a, std::string_view name_b) {
  if (a.vocab_digest != b.vocab_digest)
    fail("cannot compare vectors projected onto different vocabularies");
  return spearman_from_values(a.values, b.values, name_a, name_b);
}

double chi_square_from_values(std::span<const uint32_t> a,
                              std::span<const uint32_t> b,
                              std::string_view name_a, std::string_view name_b) {
  if (a.size() != b.size())
    fail("cannot compare frequency vectors of lengths %zu and %zu", a.size(),
         b.size());
  uint64_t na = 0, nb = 0;
  for (uint32_t v : a) na += v;
  for (uint32_t v : b) nb += v;
  if (na == 0)
    fail("chi-square undefined: sample %.*s has zero total frequency",
         static_cast<int>(name_a.size()), name_a.data());
  if (nb == 0)
    fail("chi-square undefined: sample %.*s has zero total frequency",
         static_cast<int>(name_b.size()), name_b.data());
  double total = static_cast<double>(na) + static_cast<double>(nb);
  double fa = static_cast<double>(na) / total;
  double fb = static_cast<double>(nb) / total;
  double sum = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    double combined = static_cast<double>(a[i]) + static_cast<double>(b[i]);
    if (combined == 0.0) continue;
    double ea = combined * fa;
    double eb = combined * fb;
    double da = static_cast<double>(a[i]) - ea;
    double db = static_cast<double>(b[i]) - eb;
    sum += da * da / ea + db * db / eb;
  }
  return sum;
}

double chi_square_distance(const FrequencyVector &a, const FrequencyVector &b,
                           std::string_view name_a, std::string_view name_b) {
  if (a.vocab_digest != b.vocab_digest)
    fail("cannot compare vectors projected onto different vocabularies");
  return chi_square_from_values(a.values, b.values, name_a, name_b);
}

}  // namespace corpsim
