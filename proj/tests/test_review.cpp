#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <mutex>
#include <set>

#include "helpers.hpp"
#include "peerrank/errors.hpp"
#include "peerrank/review.hpp"

using namespace peerrank;
using peerrank::testing::registry_of;

namespace {

std::vector<Answer> answers_for(const ModelRegistry& reg, int questions) {
  std::vector<Answer> out;
  for (int q = 1; q <= questions; ++q) {
    for (const auto& id : reg.models()) {
      out.push_back({q, id.str() + std::to_string(q), id, {"answer from " + id.str()}});
    }
  }
  return out;
}

ModelRegistry pool(std::size_t m) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < m; ++i) ids.push_back("model" + std::to_string(10 + i));
  return ModelRegistry::from_strings(ids);
}

std::set<std::tuple<int, std::string, std::string>> pair_set(
    const std::vector<BattlePair>& pairs, const ModelRegistry& reg) {
  std::set<std::tuple<int, std::string, std::string>> s;
  for (const auto& p : pairs) {
    auto a = reg.at(p.model_a).str(), b = reg.at(p.model_b).str();
    if (b < a) std::swap(a, b);
    s.emplace(p.question_id, a, b);
  }
  return s;
}

class FixedJudge : public PairJudge {
 public:
  Outcome judge(const BattlePair& pair, ModelIndex) override {
    return pair.model_a < pair.model_b ? Outcome::kFirstWins : Outcome::kSecondWins;
  }
};

class FailingJudge : public PairJudge {
 public:
  explicit FailingJudge(bool transport) : transport_(transport) {}
  Outcome judge(const BattlePair&, ModelIndex) override {
    if (transport_) throw TransportError("down");
    throw InvalidVerdictError("no verdict");
  }

 private:
  bool transport_;
};

class CountingClient : public ChatClient {
 public:
  std::string complete(const Prompt& p) override {
    std::lock_guard lock(mu_);
    ++calls;
    return p.user.find("Assistant A's Answer: answer from model10") != std::string::npos
               ? "[[A]]"
               : "[[B]]";
  }
  int calls = 0;

 private:
  std::mutex mu_;
};

}  // namespace

TEST(BuildPairs, AllPairsPerQuestion) {
  auto reg = pool(15);
  auto pairs = build_pairs(answers_for(reg, 2), reg, PairingStrategy::all_pairs(), 1);
  EXPECT_EQ(pairs.size(), 210u);
  EXPECT_EQ(pair_set(pairs, reg).size(), 210u);
}

TEST(BuildPairs, DataFractionKeepsFloor) {
  auto reg = pool(15);
  auto pairs = build_pairs(answers_for(reg, 1), reg, PairingStrategy::all_pairs(0.4), 1);
  EXPECT_EQ(pairs.size(), 42u);
  pairs = build_pairs(answers_for(reg, 1), reg, PairingStrategy::all_pairs(0.7), 1);
  EXPECT_EQ(pairs.size(), 73u);
}

TEST(BuildPairs, TwoModelsGiveOnePair) {
  auto reg = registry_of({"x", "y"});
  auto pairs = build_pairs(answers_for(reg, 1), reg, PairingStrategy::all_pairs(0.1), 3);
  EXPECT_EQ(pairs.size(), 1u);
}

TEST(BuildPairs, SampledCapsPairsPerQuestion) {
  auto reg = pool(6);
  auto pairs = build_pairs(answers_for(reg, 3), reg, PairingStrategy::sampled(4), 3);
  EXPECT_EQ(pairs.size(), 12u);
}

TEST(BuildPairs, SkipsQuestionsWithOneAnswer) {
  auto reg = registry_of({"x", "y", "z"});
  std::vector<Answer> answers{{1, "", ModelId("x"), {"a"}},
                              {2, "", ModelId("x"), {"a"}},
                              {2, "", ModelId("y"), {"b"}}};
  auto pairs = build_pairs(answers, reg, PairingStrategy::all_pairs(), 0);
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_EQ(pairs[0].question_id, 2);
}

TEST(BuildPairs, IndependentOfRegistryOrder) {
  auto reg = pool(8);
  std::vector<ModelId> reversed(reg.models().rbegin(), reg.models().rend());
  ModelRegistry rev(reversed);
  auto answers = answers_for(reg, 4);
  auto a = build_pairs(answers, reg, PairingStrategy::all_pairs(0.5), 21);
  auto b = build_pairs(answers, rev, PairingStrategy::all_pairs(0.5), 21);
  EXPECT_EQ(pair_set(a, reg), pair_set(b, rev));
}

TEST(BuildPairs, MemberOrderIsShuffled) {
  auto reg = pool(10);
  auto pairs = build_pairs(answers_for(reg, 4), reg, PairingStrategy::all_pairs(), 2);
  int swapped = 0;
  for (const auto& p : pairs) swapped += p.model_a > p.model_b;
  EXPECT_GT(swapped, 0);
  EXPECT_LT(swapped, static_cast<int>(pairs.size()));
}

TEST(BuildPairs, InvalidStrategy) {
  auto reg = pool(4);
  EXPECT_THROW(build_pairs({}, reg, PairingStrategy::all_pairs(0.0), 0), ArgumentError);
  EXPECT_THROW(build_pairs({}, reg, PairingStrategy::sampled(0), 0), ArgumentError);
}

TEST(AssignReviewers, ClampsToSingleNonContestant) {
  auto reg = registry_of({"a", "b", "c"});
  auto r = assign_reviewers({1, 0, 1}, reg, 5, 0);
  EXPECT_EQ(r, (std::vector<ModelIndex>{2}));
}

TEST(AssignReviewers, DistinctNonContestants) {
  auto reg = pool(15);
  for (int q = 1; q < 50; ++q) {
    BattlePair p{q, static_cast<ModelIndex>(q % 15), static_cast<ModelIndex>((q + 3) % 15)};
    auto r = assign_reviewers(p, reg, 5, 4);
    ASSERT_EQ(r.size(), 5u);
    EXPECT_EQ(std::set<ModelIndex>(r.begin(), r.end()).size(), 5u);
    for (ModelIndex s : r) {
      EXPECT_NE(s, p.model_a);
      EXPECT_NE(s, p.model_b);
    }
    EXPECT_EQ(r, assign_reviewers(p, reg, 5, 4));
  }
}

TEST(AssignReviewers, SelfReviewModeDrawsFromWholePool) {
  auto reg = registry_of({"a", "b", "c"});
  auto r = assign_reviewers({1, 0, 1}, reg, 3, 0, true);
  EXPECT_EQ(r, (std::vector<ModelIndex>{0, 1, 2}));
}

TEST(CollectReviews, RecordPerPairAndReviewer) {
  auto reg = pool(6);
  auto pairs = build_pairs(answers_for(reg, 1), reg, PairingStrategy::sampled(3), 0);
  FixedJudge judge;
  auto result = collect_reviews(pairs, judge, reg, {5, 0, 4, false});
  EXPECT_EQ(result.dataset.records.size(), 3u * 4u);
  EXPECT_TRUE(result.failures.empty());
  EXPECT_TRUE(std::is_sorted(result.dataset.records.begin(),
                             result.dataset.records.end(), canonical_less));
  EXPECT_NO_THROW(result.dataset.validate());
}

TEST(CollectReviews, DeterministicUnderConcurrency) {
  SimConfig cfg;
  cfg.m = 8;
  cfg.n = 6;
  cfg.seed = 3;
  auto sim = simulate_dataset(cfg);
  std::vector<Answer> answers;
  for (int q = 1; q <= 6; ++q) {
    for (const auto& id : sim.dataset.registry.models()) answers.push_back({q, "", id, {"x"}});
  }
  auto pairs = build_pairs(answers, sim.dataset.registry, PairingStrategy::all_pairs(), 3);
  SyntheticPairJudge j1(sim, cfg), j2(sim, cfg);
  auto a = collect_reviews(pairs, j1, sim.dataset.registry, {5, 3, 1, false});
  auto b = collect_reviews(pairs, j2, sim.dataset.registry, {5, 3, 16, false});
  EXPECT_EQ(a.dataset.records, b.dataset.records);
  EXPECT_EQ(a.dataset.records.size(), 6u * 28u * 5u);
}

TEST(CollectReviews, AllInvalidGivesEmptyDatasetAndReport) {
  auto reg = pool(5);
  auto pairs = build_pairs(answers_for(reg, 1), reg, PairingStrategy::sampled(3), 0);
  FailingJudge judge(false);
  auto result = collect_reviews(pairs, judge, reg, {5, 0, 2, false});
  EXPECT_TRUE(result.dataset.records.empty());
  EXPECT_EQ(result.failures.invalid_verdicts, 9u);
  EXPECT_EQ(result.failures.messages.size(), 9u);
}

TEST(CollectReviews, TransportFailuresAreCounted) {
  auto reg = pool(4);
  auto pairs = build_pairs(answers_for(reg, 1), reg, PairingStrategy::sampled(1), 0);
  FailingJudge judge(true);
  auto result = collect_reviews(pairs, judge, reg, {5, 0, 2, false});
  EXPECT_EQ(result.failures.transport_failures, 2u);
}

TEST(RemotePairJudge, UsesReviewerEndpoint) {
  auto reg = registry_of({"model10", "model11", "model12"});
  QuestionSet qs{{1, "", {"Q"}, std::nullopt}};
  auto answers = answers_for(reg, 1);
  auto c0 = std::make_shared<CountingClient>();
  auto c1 = std::make_shared<CountingClient>();
  auto c2 = std::make_shared<CountingClient>();
  RemotePairJudge judge(qs, answers, reg, {{0, c0}, {1, c1}, {2, c2}});
  // model10 shown as A wins in forward order, and as B in reversed order
  // the judge still prefers model10.
  EXPECT_EQ(judge.judge({1, 0, 1}, 2), Outcome::kFirstWins);
  EXPECT_EQ(c2->calls, 2);
  EXPECT_EQ(c0->calls + c1->calls, 0);
  EXPECT_THROW(judge.judge({9, 0, 1}, 2), SchemaError);
}
