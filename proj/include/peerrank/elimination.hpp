#pragma once

// Iterative removal of the weakest reviewers: optimize weights on the active
// pool, drop the lowest-scoring active model, repeat.

#include <iosfwd>
#include <vector>

#include "peerrank/consistency.hpp"
#include "peerrank/types.hpp"

namespace peerrank {

struct RoundResult {
  WeightVector weights;
  ScoreVector scores;  // every registry model, eliminated ones included
  double final_loss = 0.0;
};

struct EliminationState {
  ActiveMask active;
  std::vector<ModelIndex> eliminated;  // in elimination order
  std::vector<RoundResult> per_round;

  static EliminationState initial(std::size_t m);
};

enum class EliminationMode { kFixed, kAuto };

struct EliminationConfig {
  EliminationMode mode = EliminationMode::kFixed;
  double fraction = 0.6;  // fixed mode: ceil(fraction * m) eliminations
  OptConfig opt;

  void validate() const;
};

// Optimizes over the active reviewers, appends the round, then eliminates the
// active model with the lowest score (ties to the smaller id). Throws
// ConstraintError with fewer than 3 active reviewers.
EliminationState eliminate_step(EliminationState state, const Scorer& scorer,
                                const OptConfig& cfg);

// Index of the smallest loss; ties go to fewer eliminations.
std::size_t auto_threshold(const std::vector<double>& per_round_losses);

struct EliminationResult {
  Ranking ranking;
  EliminationState state;
  std::size_t selected_round = 0;
};

// Fixed mode eliminates min(ceil(fraction * m), m - 2) reviewers and finishes
// with an evaluation round on the survivors. Auto mode eliminates down to 3
// active reviewers, then keeps the prefix whose round loss is smallest. The
// ranking covers all models and uses the selected round's scores.
EliminationResult run_elimination(const ReviewDataset& dataset,
                                  const EliminationConfig& cfg);

// CSV with columns round,eliminated_model,final_loss; the last round of a
// run eliminates nobody.
void write_elimination_csv(const EliminationState& state,
                           const ModelRegistry& registry, std::ostream& out);

}  // namespace peerrank
