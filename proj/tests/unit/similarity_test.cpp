#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "corpsim/similarity.hpp"
#include "helpers.hpp"

using namespace corpsim;

namespace {

// Reference Spearman, written independently of the library: sort-based
// average ranks (descending) and the textbook Pearson formula.
std::vector<double> naive_ranks(const std::vector<double> &v) {
  size_t n = v.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t i, size_t j) { return v[i] > v[j]; });
  std::vector<double> ranks(n, 0.0);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j < n && v[order[j]] == v[order[i]]) ++j;
    double avg = 0.0;
    for (size_t k = i; k < j; ++k) avg += double(k + 1);
    avg /= double(j - i);
    for (size_t k = i; k < j; ++k) ranks[order[k]] = avg;
    i = j;
  }
  return ranks;
}

double naive_spearman(const std::vector<double> &a,
                      const std::vector<double> &b) {
  auto ra = naive_ranks(a), rb = naive_ranks(b);
  size_t n = ra.size();
  double ma = 0, mb = 0;
  for (size_t i = 0; i < n; ++i) { ma += ra[i]; mb += rb[i]; }
  ma /= double(n); mb /= double(n);
  double sab = 0, sa = 0, sb = 0;
  for (size_t i = 0; i < n; ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    sa += (ra[i] - ma) * (ra[i] - ma);
    sb += (rb[i] - mb) * (rb[i] - mb);
  }
  return sab / std::sqrt(sa * sb);
}

std::vector<double> to_doubles(const std::vector<uint32_t> &v) {
  return {v.begin(), v.end()};
}

}  // namespace

TEST_CASE("ranking is descending with average ties") {
  std::vector<double> v = {3, 1, 4, 1, 5};
  CHECK(rank_with_ties(v) == std::vector<double>{3, 4.5, 2, 4.5, 1});

  std::vector<uint32_t> u = {7, 7, 7};
  CHECK(rank_with_ties(u) == std::vector<double>{2, 2, 2});
}

TEST_CASE("rank sums are always n(n+1)/2") {
  std::mt19937_64 gen(11);
  std::uniform_int_distribution<uint32_t> val(0, 6);
  for (int trial = 0; trial < 50; ++trial) {
    size_t n = 2 + gen() % 40;
    std::vector<uint32_t> v(n);
    for (auto &x : v) x = val(gen);
    auto r = rank_with_ties(v);
    double sum = std::accumulate(r.begin(), r.end(), 0.0);
    CHECK(sum == doctest::Approx(double(n) * double(n + 1) / 2.0).epsilon(1e-12));
  }
}

TEST_CASE("hand-checked correlation values") {
  std::vector<uint32_t> a = {5, 3, 2}, b = {2, 3, 5};
  CHECK(spearman_from_values(a, b) == -1.0);  // exact by construction

  std::vector<uint32_t> c = {4, 4, 2}, d = {4, 2, 4};
  CHECK(spearman_from_values(c, d) == doctest::Approx(-0.5).epsilon(1e-12));

  std::vector<uint32_t> e = {1, 2, 3, 9}, f = {2, 4, 6, 11};
  CHECK(spearman_from_values(e, f) == 1.0);  // identical ranks, exact
}

TEST_CASE("hand-checked chi-square values") {
  std::vector<uint32_t> a = {4, 1}, b = {1, 4};
  CHECK(chi_square_from_values(a, b) == doctest::Approx(3.6).epsilon(1e-12));

  // A feature absent from both sides contributes nothing.
  std::vector<uint32_t> a0 = {0, 4, 1}, b0 = {0, 1, 4};
  CHECK(chi_square_from_values(a0, b0) ==
        doctest::Approx(3.6).epsilon(1e-12));

  std::vector<uint32_t> same = {3, 3}, also = {3, 3};
  CHECK(chi_square_from_values(same, also) == 0.0);
}

TEST_CASE("rho matches the naive reference on random vectors") {
  std::mt19937_64 gen(2024);
  int with_ties = 0, with_zeros = 0;
  for (int trial = 0; trial < 300; ++trial) {
    size_t n = 2 + gen() % 99;
    std::uniform_int_distribution<uint32_t> val(0, trial % 3 == 0 ? 4 : 50);
    std::vector<uint32_t> a(n), b(n);
    for (auto &x : a) x = val(gen);
    for (auto &x : b) x = val(gen);
    auto constant = [](const std::vector<uint32_t> &v) {
      return std::all_of(v.begin(), v.end(),
                         [&](uint32_t x) { return x == v[0]; });
    };
    if (constant(a) || constant(b)) continue;
    auto has_ties = [](const std::vector<uint32_t> &v) {
      auto s = v;
      std::sort(s.begin(), s.end());
      return std::adjacent_find(s.begin(), s.end()) != s.end();
    };
    if (has_ties(a) || has_ties(b)) ++with_ties;
    if (std::count(a.begin(), a.end(), 0u) > 0) ++with_zeros;

    double got = spearman_from_values(a, b);
    double ref = naive_spearman(to_doubles(a), to_doubles(b));
    CHECK(std::fabs(got - ref) < 1e-10);
    CHECK(got >= -1.0);
    CHECK(got <= 1.0);
  }
  // The generator must actually exercise ties and zeros.
  CHECK(with_ties > 30);
  CHECK(with_zeros > 15);
}

TEST_CASE("scaling one side never changes rho") {
  std::mt19937_64 gen(7);
  std::uniform_int_distribution<uint32_t> val(0, 40);
  for (int trial = 0; trial < 30; ++trial) {
    size_t n = 3 + gen() % 60;
    std::vector<uint32_t> a(n), b(n);
    for (auto &x : a) x = val(gen);
    for (auto &x : b) x = val(gen);
    a[0] += 1;  // guarantee non-constant
    b[n - 1] += 1;
    if (a[0] == a[1] && n == 3) a[0] += 1;
    double base = spearman_from_values(a, b);
    for (uint32_t c : {2u, 10u, 1000u}) {
      std::vector<uint32_t> scaled(n);
      for (size_t i = 0; i < n; ++i) scaled[i] = a[i] * c;
      // Ranks are scale-free, so this must be the same double, not merely
      // a close one.
      CHECK(spearman_from_values(scaled, b) == base);
    }
    CHECK(spearman_from_values(b, a) == base);
  }
}

TEST_CASE("constant input errors name the offending sample") {
  std::vector<uint32_t> flat = {3, 3, 3}, varied = {1, 2, 3};
  auto msg = testutil::error_message(
      [&] { (void)spearman_from_values(flat, varied, "spa_MX_tw/0002", "x"); });
  CHECK(msg.find("spa_MX_tw/0002") != std::string::npos);
  CHECK(msg.find("constant") != std::string::npos);

  msg = testutil::error_message(
      [&] { (void)spearman_from_values(varied, flat, "x", "deu_AT_cc/0001"); });
  CHECK(msg.find("deu_AT_cc/0001") != std::string::npos);
}

TEST_CASE("chi-square rejects an all-zero side") {
  std::vector<uint32_t> zero = {0, 0, 0}, varied = {1, 2, 3};
  auto msg = testutil::error_message(
      [&] { (void)chi_square_from_values(zero, varied, "empty_sample", "x"); });
  CHECK(msg.find("empty_sample") != std::string::npos);
}

TEST_CASE("length mismatches are rejected") {
  std::vector<uint32_t> a = {1, 2, 3}, b = {1, 2};
  CHECK_FALSE(testutil::error_message(
                  [&] { (void)spearman_from_values(a, b); })
                  .empty());
  CHECK_FALSE(testutil::error_message(
                  [&] { (void)chi_square_from_values(a, b); })
                  .empty());
}

TEST_CASE("projected vectors must share a vocabulary") {
  FrequencyVector a, b;
  a.kind = b.kind = FeatureKind::WordUnigram;
  a.vocab_digest = "1111111111111111";
  b.vocab_digest = "2222222222222222";
  a.values = {1, 2, 3};
  b.values = {3, 2, 1};
  a.total = b.total = 6;
  auto msg =
      testutil::error_message([&] { (void)spearman_similarity(a, b); });
  CHECK(msg.find("vocabular") != std::string::npos);
  b.vocab_digest = a.vocab_digest;
  CHECK(spearman_similarity(a, b) == -1.0);
  CHECK(chi_square_distance(a, b) > 0.0);
}
