#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "helpers.hpp"
#include "peerrank/errors.hpp"
#include "peerrank/types.hpp"

using namespace peerrank;
using peerrank::testing::registry_of;

TEST(ModelId, RejectsEmpty) { EXPECT_THROW(ModelId(""), SchemaError); }

TEST(ModelRegistry, IndexLookup) {
  auto reg = registry_of({"gpt", "vicuna", "llama"});
  EXPECT_EQ(reg.size(), 3u);
  EXPECT_EQ(reg.index_of("vicuna"), 1u);
  EXPECT_EQ(reg.at(2).str(), "llama");
  EXPECT_FALSE(reg.find("mpt").has_value());
  EXPECT_THROW(reg.index_of("mpt"), SchemaError);
}

TEST(ModelRegistry, RejectsDuplicatesAndTinyPools) {
  EXPECT_THROW(registry_of({"a", "b", "a"}), SchemaError);
  EXPECT_THROW(registry_of({"a"}), SchemaError);
}

TEST(Outcome, MirrorSwapsWinner) {
  EXPECT_EQ(mirror(Outcome::kFirstWins), Outcome::kSecondWins);
  EXPECT_EQ(mirror(Outcome::kSecondWins), Outcome::kFirstWins);
  EXPECT_EQ(mirror(Outcome::kTie), Outcome::kTie);
}

TEST(ReviewDataset, ValidateRejectsSelfReview) {
  ReviewDataset ds{registry_of({"a", "b", "c"}), {{1, 0, 1, Outcome::kTie, 0}}};
  EXPECT_THROW(ds.validate(), ConstraintError);
  ds.self_review_allowed = true;
  EXPECT_NO_THROW(ds.validate());
}

TEST(ReviewDataset, ValidateRejectsBadIndices) {
  ReviewDataset ds{registry_of({"a", "b", "c"}), {{1, 0, 7, Outcome::kTie, 2}}};
  EXPECT_THROW(ds.validate(), SchemaError);
  ds.records = {{1, 1, 1, Outcome::kTie, 2}};
  EXPECT_THROW(ds.validate(), ConstraintError);
}

TEST(RankingFromScores, DescendingWithIdTieBreak) {
  auto reg = registry_of({"c", "a", "b"});
  Ranking r = ranking_from_scores({1.0, 2.0, 2.0}, reg);
  ASSERT_EQ(r.order.size(), 3u);
  EXPECT_EQ(r.order[0].str(), "a");
  EXPECT_EQ(r.order[1].str(), "b");
  EXPECT_EQ(r.order[2].str(), "c");
}

TEST(RankingFromScores, RejectsMismatchAndNaN) {
  auto reg = registry_of({"a", "b"});
  EXPECT_THROW(ranking_from_scores({1.0}, reg), SchemaError);
  EXPECT_THROW(ranking_from_scores({1.0, std::nan("")}, reg), SchemaError);
}

TEST(CanonicalOrder, SortsByQuestionThenModelsThenReviewer) {
  ReviewRecord a{1, 0, 1, Outcome::kTie, 3};
  ReviewRecord b{1, 0, 1, Outcome::kTie, 4};
  ReviewRecord c{2, 0, 1, Outcome::kTie, 0};
  EXPECT_TRUE(canonical_less(a, b));
  EXPECT_TRUE(canonical_less(b, c));
  EXPECT_FALSE(canonical_less(c, a));
}
