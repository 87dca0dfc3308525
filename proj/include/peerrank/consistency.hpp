#pragma once

// Learning reviewer confidence weights by maximizing the Pearson correlation
// between each model's weight and the score those weights induce.

#include <cstdint>
#include <span>
#include <vector>

#include "peerrank/scoring.hpp"
#include "peerrank/types.hpp"

namespace peerrank {

// Product-moment correlation. Throws DegenerateInputError on zero variance
// and ArgumentError on length mismatch or fewer than two points.
double pearson(std::span<const double> x, std::span<const double> y);

// pearson(G(w), w) over the active models.
double objective(const WeightVector& weights, const ReviewDataset& dataset,
                 const ScoringMechanism& mechanism);
double objective(const WeightVector& weights, const ReviewDataset& dataset,
                 const ScoringMechanism& mechanism, const ActiveMask& active);

struct OptConfig {
  double step_size = 0.05;
  int max_iters = 1000;
  double rel_tol = 1e-6;
  std::uint64_t seed = 0;
  ScoringMechanism mechanism = PlainMechanism{};
  double fd_step = 1e-5;  // central differences for Elo and rank scoring
  bool parallel = true;

  void validate() const;
};

struct OptTrace {
  std::vector<double> objective;  // entry 0 is the initial point
  std::vector<double> loss;       // 1 - objective
  bool converged = false;
  int reseeds = 0;
};

struct OptResult {
  WeightVector weights;  // logistic(theta); meaningful for active models
  ActiveMask active;
  ScoreVector scores;    // scores under the final weights, all models
  OptTrace trace;

  double final_objective() const { return trace.objective.back(); }
  double final_loss() const { return trace.loss.back(); }
};

// Gradient of the objective with respect to the logistic parameters theta
// (zero for inactive models). Analytic for plain scoring, central finite
// differences otherwise.
std::vector<double> objective_gradient(const Scorer& scorer,
                                       std::span<const double> theta,
                                       const ActiveMask& active,
                                       const OptConfig& cfg);
// Same, always by central finite differences on theta.
std::vector<double> finite_difference_gradient(const Scorer& scorer,
                                               std::span<const double> theta,
                                               const ActiveMask& active,
                                               double h, bool parallel);

double logistic(double t);

OptResult optimize_weights(const ReviewDataset& dataset, const OptConfig& cfg);
OptResult optimize_weights(const ReviewDataset& dataset, const OptConfig& cfg,
                           const ActiveMask& active);
// Reuses a prepared scorer; its mechanism wins over cfg.mechanism.
OptResult optimize_weights(const Scorer& scorer, const OptConfig& cfg,
                           const ActiveMask& active);

}  // namespace peerrank
