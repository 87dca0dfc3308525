#include <gtest/gtest.h>

#include <cmath>

#include "helpers.hpp"
#include "peerrank/errors.hpp"
#include "peerrank/scoring.hpp"
#include "peerrank/simulator.hpp"

using namespace peerrank;
using peerrank::testing::registry_of;

namespace {

ReviewDataset tiny(std::vector<ReviewRecord> records) {
  ReviewDataset ds;
  ds.registry = registry_of({"a", "b", "c"});
  ds.records = std::move(records);
  return ds;
}

}  // namespace

TEST(EloTerm, Examples) {
  EXPECT_DOUBLE_EQ(elo_term(1000, 1000, 1.0, 10, 400), 0.5);
  EXPECT_NEAR(elo_term(1000, 1400, 1.0, 10, 400), 1.0 - 1.0 / 11.0, 1e-12);
  EXPECT_NEAR(elo_term(1400, 1000, 1.0, 10, 400), 1.0 - 10.0 / 11.0, 1e-12);
  EXPECT_DOUBLE_EQ(elo_term(1000, 1000, 0.0, 10, 400), -0.5);
}

TEST(RankTerm, Examples) {
  EXPECT_DOUBLE_EQ(rank_term(3, 3, 1.0, 200), 1.0);
  EXPECT_DOUBLE_EQ(rank_term(3, 1, 0.5, 200), 0.5);
  EXPECT_DOUBLE_EQ(rank_term(3, 1, 0.0, 200), 0.0);
  EXPECT_DOUBLE_EQ(rank_term(5, 3, 1.0, 200), 1.01);
}

TEST(WeightedScores, HandExample) {
  // a beats b under reviewer c (w=1); a ties b under... only c can review.
  auto ds = tiny({{1, 0, 1, Outcome::kFirstWins, 2}, {2, 0, 1, Outcome::kTie, 2}});
  auto g = weighted_scores(ds, {0.3, 0.4, 1.0}, 0.5);
  EXPECT_DOUBLE_EQ(g[0], 1.5);
  EXPECT_DOUBLE_EQ(g[1], 0.5);
  EXPECT_DOUBLE_EQ(g[2], 0.0);
}

TEST(WeightedScores, InactiveReviewerIgnored) {
  auto ds = tiny({{1, 0, 1, Outcome::kFirstWins, 2}});
  auto g = weighted_scores(ds, {1, 1, 1}, 0.5, ActiveMask{1, 1, 0});
  EXPECT_EQ(g, (ScoreVector{0, 0, 0}));
}

TEST(WeightedScores, MissingWeightIsSchemaError) {
  auto ds = tiny({{1, 0, 1, Outcome::kFirstWins, 2}});
  EXPECT_THROW(weighted_scores(ds, {1, 1, NAN}, 0.5), SchemaError);
  EXPECT_THROW(weighted_scores(ds, {1, 1}, 0.5), SchemaError);
  // An unused reviewer may lack a weight.
  EXPECT_NO_THROW(weighted_scores(ds, {NAN, 1, 1}, 0.5));
}

TEST(WeightedScores, MatchesBruteForceOracle) {
  SimConfig cfg;
  cfg.m = 9;
  cfg.n = 7;
  cfg.seed = 12;
  auto ds = simulate_dataset(cfg).dataset;
  WeightVector w(cfg.m);
  for (std::size_t i = 0; i < cfg.m; ++i) w[i] = std::sin(static_cast<double>(i)) * 0.5 + 0.5;
  for (double tie : {0.0, 0.5, 1.0}) {
    auto g = weighted_scores(ds, w, tie);
    for (std::size_t j = 0; j < cfg.m; ++j) {
      double expected = 0;
      for (const auto& r : ds.records) {
        if (r.model_a != j && r.model_b != j) continue;
        const bool first = r.model_a == j;
        if (r.outcome == Outcome::kTie) {
          expected += tie * w[r.reviewer];
        } else if ((r.outcome == Outcome::kFirstWins) == first) {
          expected += w[r.reviewer];
        }
      }
      EXPECT_NEAR(g[j], expected, 1e-9);
    }
  }
}

TEST(RunElo, SingleStep) {
  auto ds = tiny({{1, 0, 1, Outcome::kFirstWins, 2}});
  EloMechanism cfg;
  auto g = run_elo(ds, {1, 1, 1}, cfg);
  EXPECT_DOUBLE_EQ(g[0], 1016.0);
  EXPECT_DOUBLE_EQ(g[1], 984.0);
  EXPECT_DOUBLE_EQ(g[2], 1000.0);
}

TEST(RunElo, WeightScalesStep) {
  auto ds = tiny({{1, 0, 1, Outcome::kTie, 2}, {1, 1, 0, Outcome::kFirstWins, 2}});
  EloMechanism cfg;
  auto g = run_elo(ds, {1, 1, 0.0}, cfg);
  EXPECT_EQ(g, (ScoreVector{1000, 1000, 1000}));
}

TEST(RunElo, ConservesTotalRating) {
  SimConfig sc;
  sc.m = 6;
  sc.n = 5;
  auto ds = simulate_dataset(sc).dataset;
  EloMechanism cfg;
  cfg.passes = 2;
  auto g = run_elo(ds, WeightVector(6, 0.7), cfg);
  double total = 0;
  for (double v : g) total += v;
  EXPECT_NEAR(total, 6000.0, 1e-8);
}

TEST(RunRank, SingleWinAgainstEqualRank) {
  // Unit-weight plain scores rank a first (rank 1) and b second, so a's win
  // is worth 1 + (1 - 2) / K.
  auto ds = tiny({{1, 0, 1, Outcome::kFirstWins, 2}});
  RankMechanism cfg;
  auto g = run_rank(ds, {1, 1, 1}, cfg);
  EXPECT_NEAR(g[0], 1.0 - 1.0 / 200.0, 1e-12);
  EXPECT_DOUBLE_EQ(g[1], 0.0);
}

TEST(RankPositions, TieBreakBySmallerId) {
  auto reg = registry_of({"b", "a", "c"});
  EXPECT_EQ(rank_positions({1.0, 1.0, 2.0}, reg), (std::vector<double>{3, 2, 1}));
}

TEST(Mechanism, Validation) {
  EXPECT_THROW(validate(PlainMechanism{1.5}), ArgumentError);
  EloMechanism e;
  e.base = 1.0;
  EXPECT_THROW(validate(e), ArgumentError);
  RankMechanism r;
  r.k = 0;
  EXPECT_THROW(validate(r), ArgumentError);
  EXPECT_EQ(mechanism_name(PlainMechanism{}), "plain");
  EXPECT_EQ(mechanism_name(EloMechanism{}), "elo");
  EXPECT_EQ(mechanism_name(RankMechanism{}), "rank");
}
