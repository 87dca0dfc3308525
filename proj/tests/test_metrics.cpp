#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "helpers.hpp"
#include "peerrank/errors.hpp"
#include "peerrank/metrics.hpp"

using namespace peerrank;
using peerrank::testing::identity_ranking;
using peerrank::testing::ranking_from_sequence;
using peerrank::testing::ranking_of;

namespace {

// Independent oracles over rank sequences.
double spearman_oracle(const std::vector<int>& x) {
  // Pearson correlation of positions against reference ranks.
  const double n = static_cast<double>(x.size());
  double mx = (n + 1) / 2, sxy = 0, sxx = 0;
  for (std::size_t t = 0; t < x.size(); ++t) {
    sxy += (static_cast<double>(t + 1) - mx) * (x[t] - mx);
    sxx += (static_cast<double>(t + 1) - mx) * (static_cast<double>(t + 1) - mx);
  }
  return sxy / sxx;
}

long long inversions_oracle(const std::vector<int>& x) {
  long long c = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) c += x[i] > x[j];
  return c;
}

int lis_oracle(const std::vector<int>& x) {
  // Patience sorting.
  std::vector<int> tails;
  for (int v : x) {
    auto it = std::lower_bound(tails.begin(), tails.end(), v);
    if (it == tails.end()) tails.push_back(v); else *it = v;
  }
  return static_cast<int>(tails.size());
}

}  // namespace

TEST(RankSequence, MapsLearnedPositionsToReferenceRanks) {
  auto ref = ranking_of({"a", "b", "c"});
  EXPECT_EQ(rank_sequence(ranking_of({"c", "a", "b"}), ref), (std::vector<int>{3, 1, 2}));
  EXPECT_THROW(rank_sequence(ranking_of({"a", "b"}), ref), SchemaError);
  EXPECT_THROW(rank_sequence(ranking_of({"a", "b", "x"}), ref), SchemaError);
  EXPECT_THROW(rank_sequence(ranking_of({"a", "a", "b"}), ref), SchemaError);
}

TEST(Metrics, PerfectAndReversed) {
  auto ref = identity_ranking(15);
  auto r = alignment_report(ref, ref);
  EXPECT_DOUBLE_EQ(r.spearman, 1.0);
  EXPECT_DOUBLE_EQ(r.kendall, 1.0);
  EXPECT_EQ(r.cin, 0);
  EXPECT_EQ(r.lis, 15);
  EXPECT_DOUBLE_EQ(r.pen, 0.0);
  EXPECT_DOUBLE_EQ(r.precision_at[8], 1.0);
  Ranking rev = ref;
  std::reverse(rev.order.begin(), rev.order.end());
  EXPECT_DOUBLE_EQ(spearman(rev, ref), -1.0);
  EXPECT_DOUBLE_EQ(kendall(rev, ref), -1.0);
  EXPECT_EQ(count_inversions(rev, ref), 105);
  EXPECT_EQ(lis(rev, ref), 1);
}

TEST(Metrics, FrozenValuesForOneSwap) {
  std::vector<int> x(15);
  std::iota(x.begin(), x.end(), 1);
  std::swap(x[0], x[1]);
  auto learned = ranking_from_sequence(x);
  auto ref = identity_ranking(15);
  EXPECT_NEAR(spearman(learned, ref), 1.0 - 12.0 / 3360.0, 1e-12);
  EXPECT_NEAR(kendall(learned, ref), 103.0 / 105.0, 1e-12);
  EXPECT_EQ(count_inversions(learned, ref), 1);
  EXPECT_EQ(lis(learned, ref), 14);
}

TEST(Metrics, SmallSequenceExamples) {
  const std::vector<int> x{1, 3, 2, 4};
  EXPECT_NEAR(permutation_entropy(x, 3), std::log(2.0), 1e-12);
  EXPECT_EQ(count_inversions(std::vector<int>{3, 1, 2}), 2);
  EXPECT_EQ(longest_increasing_subsequence({2, 1, 3, 5, 4}), 3);
  EXPECT_THROW(permutation_entropy(x, 1), ArgumentError);
  EXPECT_THROW(permutation_entropy(x, 5), ArgumentError);
}

TEST(Metrics, PrecisionAndRbp) {
  auto ref = identity_ranking(15);
  EXPECT_NEAR(rbp_at_k(ref, ref, 10, 0.8), 1.0 - std::pow(0.8, 10), 1e-12);
  // Swap positions 10 and 11: the 10th learned model is outside the top 10.
  std::vector<int> x(15);
  std::iota(x.begin(), x.end(), 1);
  std::swap(x[9], x[10]);
  auto learned = ranking_from_sequence(x);
  EXPECT_DOUBLE_EQ(precision_at_k(learned, ref, 10), 0.9);
  EXPECT_NEAR(rbp_at_k(learned, ref, 10, 0.8), 0.2 * (1 - std::pow(0.8, 9)) / 0.2, 1e-12);
  EXPECT_THROW(precision_at_k(learned, ref, 0), ArgumentError);
  EXPECT_THROW(precision_at_k(learned, ref, 16), ArgumentError);
  EXPECT_THROW(rbp_at_k(learned, ref, 3, 1.0), ArgumentError);
}

TEST(Metrics, ReportSkipsOversizedK) {
  auto ref = identity_ranking(5);
  auto r = alignment_report(ref, ref, {3, 8});
  EXPECT_EQ(r.precision_at.size(), 1u);
  EXPECT_TRUE(r.precision_at.count(3));
}

TEST(Metrics, AgreeWithOraclesOnRandomPermutations) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = 2 + trial % 20;
    std::vector<int> x(m);
    std::iota(x.begin(), x.end(), 1);
    std::shuffle(x.begin(), x.end(), rng);
    auto learned = ranking_from_sequence(x);
    auto ref = identity_ranking(m);
    EXPECT_NEAR(spearman(learned, ref), spearman_oracle(x), 1e-12);
    const long long inv = inversions_oracle(x);
    EXPECT_EQ(count_inversions(learned, ref), inv);
    const double pairs = static_cast<double>(m * (m - 1) / 2);
    EXPECT_NEAR(kendall(learned, ref), (pairs - 2.0 * static_cast<double>(inv)) / pairs, 1e-12);
    EXPECT_EQ(lis(learned, ref), lis_oracle(x));
    if (m >= 3) {
      std::map<std::vector<int>, int> counts;
      for (std::size_t t = 0; t + 3 <= m; ++t) {
        std::vector<int> w(x.begin() + static_cast<long>(t), x.begin() + static_cast<long>(t) + 3);
        std::vector<int> pat(3);
        for (int i = 0; i < 3; ++i)
          pat[static_cast<std::size_t>(i)] = static_cast<int>(
              std::count_if(w.begin(), w.end(), [&](int v) { return v < w[static_cast<std::size_t>(i)]; }));
        ++counts[pat];
      }
      double h = 0;
      const double total = static_cast<double>(m - 2);
      for (auto& [p, c] : counts) h -= c / total * std::log(c / total);
      EXPECT_NEAR(permutation_entropy(learned, ref, 3), h, 1e-12);
    }
  }
}
