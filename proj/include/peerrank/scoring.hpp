#pragma once

// Response scores from a review dataset: weighted win counts, sequential Elo,
// and rank-credit scoring.

#include <cstdint>
#include <string>
#include <variant>

#include "peerrank/kernels.hpp"
#include "peerrank/types.hpp"

namespace peerrank {

struct PlainMechanism {
  double tie_credit = 0.5;
};

struct EloMechanism {
  double base = 10.0;
  double scale = 400.0;
  double initial = 1000.0;
  double k_factor = 32.0;
  int passes = 1;
  std::uint64_t shuffle_seed = 0;
};

struct RankMechanism {
  double k = 200.0;
  int passes = 3;
};

using ScoringMechanism =
    std::variant<PlainMechanism, EloMechanism, RankMechanism>;

void validate(const ScoringMechanism& mechanism);
std::string mechanism_name(const ScoringMechanism& mechanism);

// Credit 1 per win and tie_credit per tie, times the reviewer's weight.
// Records whose reviewer is inactive are ignored. Throws SchemaError when a
// reviewer in use has no finite weight.
ScoreVector weighted_scores(const ReviewDataset& dataset,
                            const WeightVector& weights, double tie_credit);
ScoreVector weighted_scores(const ReviewDataset& dataset,
                            const WeightVector& weights, double tie_credit,
                            const ActiveMask& active);

// credit - 1 / (1 + base^((g_k - g_j) / scale))
double elo_term(double g_j, double g_k, double credit, double base,
                double scale);

ScoreVector run_elo(const ReviewDataset& dataset, const WeightVector& weights,
                    const EloMechanism& cfg);
ScoreVector run_elo(const ReviewDataset& dataset, const WeightVector& weights,
                    const EloMechanism& cfg, const ActiveMask& active);

// Win: 1 + (rank_j - rank_k) / K; tie: 0.5; loss: 0. Ranks are 1-based.
double rank_term(double rank_j, double rank_k, double credit, double k_const);

ScoreVector run_rank(const ReviewDataset& dataset, const WeightVector& weights,
                     const RankMechanism& cfg);
ScoreVector run_rank(const ReviewDataset& dataset, const WeightVector& weights,
                     const RankMechanism& cfg, const ActiveMask& active);

// 1-based positions of each registry model under ranking_from_scores.
std::vector<double> rank_positions(const ScoreVector& scores,
                                   const ModelRegistry& registry);

// Precomputes the contest tally once so that many weight vectors can be
// scored cheaply, as the optimizer and elimination loop need.
class Scorer {
 public:
  Scorer(const ReviewDataset& dataset, ScoringMechanism mechanism,
         bool parallel = true);

  ScoreVector scores(const WeightVector& weights,
                     const ActiveMask& active) const;

  const ScoringMechanism& mechanism() const { return mechanism_; }
  const kernels::ContestTally& tally() const { return tally_; }
  // Plain credit matrix (m x m, row = contestant, column = reviewer).
  const std::vector<double>& credit() const { return credit_; }
  std::size_t size() const { return dataset_->registry.size(); }
  const ReviewDataset& dataset() const { return *dataset_; }

 private:
  const ReviewDataset* dataset_;
  ScoringMechanism mechanism_;
  bool parallel_;
  kernels::ContestTally tally_;
  std::vector<double> credit_;
  std::vector<char> reviewer_present_;
};

}  // namespace peerrank
