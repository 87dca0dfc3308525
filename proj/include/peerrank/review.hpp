#pragma once

// Battle pair construction, reviewer assignment and the concurrent review
// loop that turns judges into a ReviewDataset.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "peerrank/data_io.hpp"
#include "peerrank/judge.hpp"
#include "peerrank/simulator.hpp"
#include "peerrank/types.hpp"

namespace peerrank {

struct PairingStrategy {
  enum class Kind { kAllPairs, kSampled };

  Kind kind = Kind::kAllPairs;
  std::size_t pairs_per_question = 0;  // kSampled only
  double data_fraction = 1.0;

  static PairingStrategy all_pairs(double data_fraction = 1.0);
  static PairingStrategy sampled(std::size_t pairs_per_question,
                                 double data_fraction = 1.0);

  void validate() const;
};

struct BattlePair {
  int question_id = 0;
  ModelIndex model_a = 0;
  ModelIndex model_b = 0;

  friend bool operator==(const BattlePair&, const BattlePair&) = default;
};

// Unordered pairs of the models that answered each question. A fraction
// below 1 keeps floor(fraction * count) pairs, at least one. Member order is
// shuffled per pair. Selection depends only on model ids and the seed, not
// on registry order. Questions with fewer than two answers are skipped with
// a warning on stderr.
std::vector<BattlePair> build_pairs(const std::vector<Answer>& answers,
                                    const ModelRegistry& registry,
                                    const PairingStrategy& strategy,
                                    std::uint64_t seed);

// r distinct reviewers drawn without replacement from the pool minus the two
// contestants (or the whole pool when self-review is allowed), clamped to the
// number available. Returned in registry order.
std::vector<ModelIndex> assign_reviewers(const BattlePair& pair,
                                         const ModelRegistry& registry,
                                         std::size_t r, std::uint64_t seed,
                                         bool allow_self_review = false);

// Aggregated dual-order outcome of one reviewer on one pair, relative to
// pair.model_a. Implementations must be safe to call concurrently.
class PairJudge {
 public:
  virtual ~PairJudge() = default;
  virtual Outcome judge(const BattlePair& pair, ModelIndex reviewer) = 0;
};

// Sends each judgment to the reviewer's chat endpoint.
class RemotePairJudge : public PairJudge {
 public:
  RemotePairJudge(const QuestionSet& questions,
                  const std::vector<Answer>& answers,
                  const ModelRegistry& registry,
                  std::map<ModelIndex, std::shared_ptr<ChatClient>> clients,
                  std::optional<PromptKind> kind = std::nullopt);

  Outcome judge(const BattlePair& pair, ModelIndex reviewer) override;

 private:
  std::map<int, Question> questions_;
  std::map<std::pair<int, ModelIndex>, std::vector<std::string>> answers_;
  std::map<ModelIndex, std::shared_ptr<ChatClient>> clients_;
  std::optional<PromptKind> kind_;
};

// Draws verdicts from a simulated population; each (pair, reviewer) gets its
// own random stream so results do not depend on scheduling.
class SyntheticPairJudge : public PairJudge {
 public:
  SyntheticPairJudge(const SimulationResult& simulation, SimConfig cfg);

  Outcome judge(const BattlePair& pair, ModelIndex reviewer) override;

 private:
  std::vector<double> judge_ability_;
  QualityTable qualities_;
  SimConfig cfg_;
};

struct CollectOptions {
  std::size_t reviewers_per_pair = 5;
  std::uint64_t seed = 0;
  std::size_t max_in_flight = 8;
  bool allow_self_review = false;
};

struct FailureReport {
  std::size_t invalid_verdicts = 0;
  std::size_t transport_failures = 0;
  std::vector<std::string> messages;

  bool empty() const { return invalid_verdicts + transport_failures == 0; }
};

struct CollectResult {
  ReviewDataset dataset;
  FailureReport failures;
};

// Fans judgments out over at most max_in_flight workers. Invalid verdicts
// and transport errors drop the record and are counted; any other error is
// rethrown once all workers have stopped. Records come back in canonical
// order.
CollectResult collect_reviews(const std::vector<BattlePair>& pairs,
                              PairJudge& judge, const ModelRegistry& registry,
                              const CollectOptions& options);

}  // namespace peerrank
