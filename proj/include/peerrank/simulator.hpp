#pragma once

// Synthetic model pools with known abilities, used as ground truth for
// desk-scale validation. Stronger models write better answers and judge more
// reliably; nothing else ties the two together.

#include <cstdint>
#include <string>
#include <vector>

#include "peerrank/random.hpp"
#include "peerrank/types.hpp"

namespace peerrank {

struct SyntheticModel {
  ModelId id;
  double ability = 0.0;  // in [0, 1]
};

enum class AbilitySpacing { kEven, kUniform };

struct SimConfig {
  std::size_t m = 15;
  std::size_t n = 80;
  std::size_t reviewers_per_pair = 5;
  double quality_noise = 0.2;    // sigma of answer quality around ability
  double tie_margin = 0.05;      // quality gap below which judges call a tie
  double judge_sharpness = 0.5;  // tau in the tanh judge model
  std::uint64_t seed = 0;
  AbilitySpacing spacing = AbilitySpacing::kEven;
  // 0 keeps every unordered pair of every question.
  std::size_t pairs_per_question = 0;
  // Judging ability rises linearly from judge_floor (weakest model) to 1
  // (strongest); a negative floor makes weak judges prefer worse answers.
  double judge_floor = 0.0;
  // The weakest ceil(fraction * m) models judge at zero ability.
  double noise_judge_fraction = 0.0;
  // When >= 0, every judge uses this ability instead of its own.
  double judge_ability_override = -1.0;
  // Bias studies: contestants may review their own battle, and the listed
  // judges pick themselves with probability self_bias when they do.
  bool allow_self_review = false;
  std::vector<std::string> self_favoring;
  double self_bias = 1.0;

  void validate() const;
};

std::vector<SyntheticModel> gen_population(const SimConfig& cfg);

// Latent answer quality per (question, model); question q (1-based) is row
// q - 1.
struct QualityTable {
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<double> values;

  double at(std::size_t question_row, ModelIndex model) const {
    return values[question_row * m + model];
  }
};

QualityTable gen_answer_qualities(const std::vector<SyntheticModel>& population,
                                  const SimConfig& cfg);

// Probability that a judge of the given ability prefers the truly better of
// two answers whose quality differs by quality_gap (outside the tie margin).
double synthetic_win_probability(double judge_ability, double quality_gap,
                                 double sharpness);

Outcome synthetic_verdict(double judge_ability, double quality_a,
                          double quality_b, const SimConfig& cfg, Rng& rng);

// Per-model judging ability implied by the config.
std::vector<double> judge_abilities(const std::vector<SyntheticModel>& population,
                                    const SimConfig& cfg);

struct SimulationResult {
  ReviewDataset dataset;
  Ranking ground_truth;
  std::vector<SyntheticModel> population;
  std::vector<double> judge_ability;
  QualityTable qualities;
};

SimulationResult simulate_dataset(const SimConfig& cfg);

}  // namespace peerrank
