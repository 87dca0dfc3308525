#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "helpers.hpp"
#include "peerrank/analysis.hpp"
#include "peerrank/errors.hpp"
#include "peerrank/scoring.hpp"
#include "peerrank/simulator.hpp"

using namespace peerrank;
using peerrank::testing::registry_of;

namespace {

ReviewDataset self_judged() {
  // a and b each judge their own battle and pick themselves.
  ReviewDataset ds;
  ds.registry = registry_of({"a", "b", "c"});
  ds.self_review_allowed = true;
  ds.records = {{1, 0, 1, Outcome::kFirstWins, 0},
                {1, 0, 1, Outcome::kSecondWins, 1},
                {1, 0, 1, Outcome::kFirstWins, 2}};
  return ds;
}

}  // namespace

TEST(WinRate, CountsTiesAsHalf) {
  ReviewDataset ds;
  ds.registry = registry_of({"a", "b", "c"});
  ds.records = {{1, 0, 1, Outcome::kFirstWins, 2}, {2, 1, 0, Outcome::kTie, 2}};
  EXPECT_DOUBLE_EQ(*win_rate(ds, 2, 0, 1), 0.75);
  EXPECT_DOUBLE_EQ(*win_rate(ds, 2, 1, 0), 0.25);
  EXPECT_FALSE(win_rate(ds, 0, 0, 1).has_value());
}

TEST(PreferenceGap, HandValue) {
  auto pg = preference_gap_matrix(self_judged());
  // P_a(a > b) = 1, P_b(a > b) = 0.
  EXPECT_DOUBLE_EQ(*pg.at(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(*pg.at(1, 0), 1.0);
  EXPECT_FALSE(pg.at(0, 0).has_value());
  EXPECT_FALSE(pg.at(0, 2).has_value());
  EXPECT_EQ(pg.missing.size(), 2u);
  EXPECT_EQ(pg.counts[1], 2u);
}

TEST(PreferenceGap, Reweighted) {
  auto pg = reweighted_pg_matrix(self_judged(), {0.2, 0.25, 1.0});
  EXPECT_DOUBLE_EQ(*pg.at(0, 1), 0.2 * 1.0 - 0.25 * 0.0);
  // w_b * P_b(b > a) - w_a * P_a(b > a)
  EXPECT_DOUBLE_EQ(*pg.at(1, 0), 0.25);
  EXPECT_THROW(reweighted_pg_matrix(self_judged(), {NAN, 1, 1}), SchemaError);
}

TEST(PreferenceGap, ReweightedHandValueWithMixedVerdicts) {
  ReviewDataset ds = self_judged();
  ds.records = {{1, 0, 1, Outcome::kFirstWins, 0}, {2, 0, 1, Outcome::kSecondWins, 0},
                {1, 0, 1, Outcome::kFirstWins, 1}, {2, 0, 1, Outcome::kTie, 1}};
  // P_a(a>b) = 0.5, P_b(a>b) = 0.75
  auto pg = reweighted_pg_matrix(ds, {0.5, 0.4, 1.0});
  EXPECT_NEAR(*pg.at(0, 1), 0.5 * 0.5 - 0.4 * 0.75, 1e-15);
  EXPECT_NEAR(*pg.at(0, 1), -0.05, 1e-15);
}

TEST(PreferenceGap, UnweightedIsSymmetric) {
  SimConfig cfg;
  cfg.m = 6;
  cfg.n = 10;
  cfg.allow_self_review = true;
  cfg.reviewers_per_pair = 6;
  cfg.self_favoring = {"m01"};
  auto ds = simulate_dataset(cfg).dataset;
  auto pg = preference_gap_matrix(ds);
  ASSERT_TRUE(pg.missing.empty());
  for (ModelIndex i = 0; i < 6; ++i) {
    for (ModelIndex j = 0; j < 6; ++j) {
      if (i != j) EXPECT_NEAR(*pg.at(i, j), *pg.at(j, i), 1e-12);
    }
  }
}

TEST(PreferenceGap, SubsetRestrictsRowsAndColumns) {
  auto pg = preference_gap_matrix(self_judged(), {1, 0});
  EXPECT_EQ(pg.models, (std::vector<ModelIndex>{0, 1}));
  EXPECT_EQ(pg.size(), 2u);
  EXPECT_THROW(preference_gap_matrix(self_judged(), {7}), SchemaError);
}

TEST(PreferenceGap, CsvLayout) {
  std::ostringstream out;
  auto ds = self_judged();
  write_pg_csv(preference_gap_matrix(ds), ds.registry, out);
  EXPECT_EQ(out.str(), "model,a,b,c\na,,1,\nb,1,,\nc,,,\n");
}

TEST(Voting, MajorityThreeToTwo) {
  ReviewDataset ds;
  ds.registry = registry_of({"a", "b", "c", "d", "e", "f", "g"});
  for (ModelIndex s = 2; s < 5; ++s) ds.records.push_back({1, 0, 1, Outcome::kFirstWins, s});
  for (ModelIndex s = 5; s < 7; ++s) ds.records.push_back({1, 1, 0, Outcome::kFirstWins, s});
  auto g = majority_voting(ds);
  EXPECT_DOUBLE_EQ(g[0], 1.0);
  EXPECT_DOUBLE_EQ(g[1], 0.0);
}

TEST(Voting, MajorityWithoutPluralitySplits) {
  ReviewDataset ds;
  ds.registry = registry_of({"a", "b", "c", "d", "e", "f", "g"});
  ds.records = {{1, 0, 1, Outcome::kFirstWins, 2}, {1, 0, 1, Outcome::kFirstWins, 3},
                {1, 0, 1, Outcome::kSecondWins, 4}, {1, 0, 1, Outcome::kSecondWins, 5},
                {1, 0, 1, Outcome::kTie, 6}};
  auto g = majority_voting(ds);
  EXPECT_DOUBLE_EQ(g[0], 0.5);
  EXPECT_DOUBLE_EQ(g[1], 0.5);
}

TEST(Voting, RatingEqualsUnitWeightScores) {
  SimConfig cfg;
  cfg.m = 7;
  cfg.n = 9;
  auto ds = simulate_dataset(cfg).dataset;
  auto rating = rating_voting(ds);
  auto plain = weighted_scores(ds, WeightVector(7, 1.0), 0.5);
  for (std::size_t i = 0; i < 7; ++i) EXPECT_NEAR(rating[i], plain[i], 1e-9);
}
