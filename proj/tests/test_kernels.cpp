#include <gtest/gtest.h>

#include "peerrank/kernels.hpp"
#include "peerrank/scoring.hpp"
#include "peerrank/simulator.hpp"

using namespace peerrank;

namespace {

ReviewDataset sample(std::size_t m, std::uint64_t seed) {
  SimConfig cfg;
  cfg.m = m;
  cfg.n = 12;
  cfg.seed = seed;
  return simulate_dataset(cfg).dataset;
}

WeightVector weights_for(std::size_t m) {
  WeightVector w(m);
  for (std::size_t i = 0; i < m; ++i) w[i] = 0.1 + 0.8 * static_cast<double>(i % 7) / 6.0;
  return w;
}

}  // namespace

TEST(Kernels, TallyAgrees) {
  for (std::size_t m : {3u, 15u, 31u}) {
    auto ds = sample(m, m);
    auto a = kernels::tally_serial(ds.records, m);
    auto b = kernels::tally_parallel(ds.records, m);
    EXPECT_EQ(a, b);
    std::uint64_t total = 0;
    for (auto v : a.wins) total += v;
    for (auto v : a.ties) total += v;
    // Each record counts once from each side, ties twice.
    std::uint64_t expected = 0;
    for (const auto& r : ds.records) expected += r.outcome == Outcome::kTie ? 2 : 1;
    EXPECT_EQ(total, expected);
  }
}

TEST(Kernels, PlainScoresAgreeBitForBit) {
  const std::size_t m = 15;
  auto ds = sample(m, 4);
  auto c = kernels::credit_matrix(kernels::tally_serial(ds.records, m), 0.5);
  auto w = weights_for(m);
  ActiveMask active = all_active(m);
  active[3] = 0;
  std::vector<double> a(m), b(m);
  kernels::plain_scores_serial(c, w, active, a);
  kernels::plain_scores_parallel(c, w, active, b);
  EXPECT_EQ(a, b);
}

TEST(Kernels, PlainScoresMatchDirectSum) {
  const std::size_t m = 6;
  auto ds = sample(m, 8);
  auto c = kernels::credit_matrix(kernels::tally_serial(ds.records, m), 0.5);
  auto w = weights_for(m);
  std::vector<double> g(m);
  kernels::plain_scores_serial(c, w, all_active(m), g);
  std::vector<double> direct(m, 0.0);
  for (const auto& r : ds.records) {
    const double ca = r.outcome == Outcome::kFirstWins ? 1.0
                      : r.outcome == Outcome::kTie     ? 0.5
                                                       : 0.0;
    direct[r.model_a] += w[r.reviewer] * ca;
    direct[r.model_b] += w[r.reviewer] * (1.0 - ca);
  }
  for (std::size_t j = 0; j < m; ++j) EXPECT_NEAR(g[j], direct[j], 1e-9);
}

TEST(Kernels, RankPassAgrees) {
  const std::size_t m = 15;
  auto ds = sample(m, 5);
  auto t = kernels::tally_serial(ds.records, m);
  auto w = weights_for(m);
  std::vector<double> ranks(m);
  for (std::size_t i = 0; i < m; ++i) ranks[i] = static_cast<double>((i * 7) % m + 1);
  std::vector<double> a(m), b(m);
  kernels::rank_pass_serial(t, w, all_active(m), ranks, 200.0, a);
  kernels::rank_pass_parallel(t, w, all_active(m), ranks, 200.0, b);
  EXPECT_EQ(a, b);
}

TEST(Kernels, ScorerSerialAndParallelAgree) {
  const std::size_t m = 12;
  auto ds = sample(m, 6);
  auto w = weights_for(m);
  for (ScoringMechanism mech :
       {ScoringMechanism{PlainMechanism{}}, ScoringMechanism{RankMechanism{}},
        ScoringMechanism{EloMechanism{}}}) {
    Scorer s1(ds, mech, false), s2(ds, mech, true);
    EXPECT_EQ(s1.scores(w, all_active(m)), s2.scores(w, all_active(m)));
  }
}
