#include "peerrank/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <set>

#include "peerrank/errors.hpp"

namespace peerrank {
namespace {

enum Stream : std::uint64_t { kPopulation = 1, kQuality = 2, kReview = 3 };

std::string model_name(std::size_t i, std::size_t m) {
  std::size_t width = std::max<std::size_t>(2, std::to_string(m - 1).size());
  std::string digits = std::to_string(i);
  return "m" + std::string(width - digits.size(), '0') + digits;
}

}  // namespace

void SimConfig::validate() const {
  if (m < 3) throw ArgumentError("simulation needs m >= 3");
  if (n < 1) throw ArgumentError("simulation needs n >= 1");
  if (reviewers_per_pair < 1) throw ArgumentError("reviewers_per_pair >= 1");
  if (!(quality_noise > 0)) throw ArgumentError("quality_noise must be > 0");
  if (!(tie_margin >= 0)) throw ArgumentError("tie_margin must be >= 0");
  if (!(judge_sharpness > 0)) throw ArgumentError("judge_sharpness must be > 0");
  if (!(judge_floor >= -1 && judge_floor <= 1)) {
    throw ArgumentError("judge_floor must be in [-1, 1]");
  }
  if (!(noise_judge_fraction >= 0 && noise_judge_fraction <= 1)) {
    throw ArgumentError("noise_judge_fraction must be in [0, 1]");
  }
  if (!(self_bias >= 0 && self_bias <= 1)) {
    throw ArgumentError("self_bias must be in [0, 1]");
  }
}

std::vector<SyntheticModel> gen_population(const SimConfig& cfg) {
  cfg.validate();
  Rng rng(derive_seed(cfg.seed, {kPopulation}));
  std::vector<double> abilities(cfg.m);
  if (cfg.spacing == AbilitySpacing::kEven) {
    for (std::size_t i = 0; i < cfg.m; ++i) {
      abilities[i] = static_cast<double>(i) / static_cast<double>(cfg.m - 1);
    }
  } else {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto& a : abilities) a = u(rng);
  }
  // Ids carry no information about ability, so id tie-breaks cannot leak it.
  std::shuffle(abilities.begin(), abilities.end(), rng);
  std::vector<SyntheticModel> population;
  population.reserve(cfg.m);
  for (std::size_t i = 0; i < cfg.m; ++i) {
    population.push_back({ModelId(model_name(i, cfg.m)), abilities[i]});
  }
  return population;
}

QualityTable gen_answer_qualities(const std::vector<SyntheticModel>& population,
                                  const SimConfig& cfg) {
  QualityTable table{cfg.n, population.size(), {}};
  table.values.resize(table.n * table.m);
  Rng rng(derive_seed(cfg.seed, {kQuality}));
  std::normal_distribution<double> noise(0.0, cfg.quality_noise);
  for (std::size_t q = 0; q < table.n; ++q) {
    for (std::size_t j = 0; j < table.m; ++j) {
      table.values[q * table.m + j] = population[j].ability + noise(rng);
    }
  }
  return table;
}

double synthetic_win_probability(double judge_ability, double quality_gap,
                                 double sharpness) {
  return 0.5 + 0.5 * judge_ability * std::tanh(std::abs(quality_gap) / sharpness);
}

Outcome synthetic_verdict(double judge_ability, double quality_a,
                          double quality_b, const SimConfig& cfg, Rng& rng) {
  const double gap = quality_a - quality_b;
  if (std::abs(gap) < cfg.tie_margin) return Outcome::kTie;
  const double p =
      synthetic_win_probability(judge_ability, gap, cfg.judge_sharpness);
  const bool picks_better = std::uniform_real_distribution<double>(0, 1)(rng) < p;
  const bool a_better = gap > 0;
  return picks_better == a_better ? Outcome::kFirstWins : Outcome::kSecondWins;
}

std::vector<double> judge_abilities(const std::vector<SyntheticModel>& population,
                                    const SimConfig& cfg) {
  std::vector<double> ability(population.size());
  for (std::size_t j = 0; j < population.size(); ++j) {
    ability[j] = cfg.judge_ability_override >= 0
                     ? cfg.judge_ability_override
                     : cfg.judge_floor +
                           (1.0 - cfg.judge_floor) * population[j].ability;
  }
  const auto noisy = static_cast<std::size_t>(
      std::ceil(cfg.noise_judge_fraction * static_cast<double>(population.size()) -
                1e-9));
  if (noisy > 0) {
    std::vector<ModelIndex> by_ability(population.size());
    std::iota(by_ability.begin(), by_ability.end(), ModelIndex{0});
    std::stable_sort(by_ability.begin(), by_ability.end(),
                     [&](ModelIndex a, ModelIndex b) {
                       return population[a].ability < population[b].ability;
                     });
    for (std::size_t i = 0; i < noisy && i < by_ability.size(); ++i) {
      ability[by_ability[i]] = 0.0;
    }
  }
  return ability;
}

SimulationResult simulate_dataset(const SimConfig& cfg) {
  cfg.validate();
  SimulationResult out;
  out.population = gen_population(cfg);
  out.qualities = gen_answer_qualities(out.population, cfg);
  out.judge_ability = judge_abilities(out.population, cfg);

  std::vector<ModelId> ids;
  for (const auto& model : out.population) ids.push_back(model.id);
  ModelRegistry registry(ids);

  std::vector<char> self_favoring(cfg.m, 0);
  for (const auto& id : cfg.self_favoring) {
    self_favoring[registry.index_of(id)] = 1;
  }

  const std::size_t max_reviewers = cfg.allow_self_review ? cfg.m : cfg.m - 2;
  std::size_t r = cfg.reviewers_per_pair;
  if (r > max_reviewers) {
    std::cerr << "warning: reviewers_per_pair " << r << " clamped to "
              << max_reviewers << '\n';
    r = max_reviewers;
  }

  std::vector<std::pair<ModelIndex, ModelIndex>> all_pairs;
  for (ModelIndex a = 0; a < cfg.m; ++a) {
    for (ModelIndex b = a + 1; b < cfg.m; ++b) all_pairs.emplace_back(a, b);
  }

  Rng rng(derive_seed(cfg.seed, {kReview}));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<ModelIndex> candidates;
  std::vector<ReviewRecord>& records = out.dataset.records;
  for (std::size_t q = 0; q < cfg.n; ++q) {
    const int question_id = static_cast<int>(q + 1);
    auto pairs = all_pairs;
    if (cfg.pairs_per_question > 0 && cfg.pairs_per_question < pairs.size()) {
      std::shuffle(pairs.begin(), pairs.end(), rng);
      pairs.resize(cfg.pairs_per_question);
      std::sort(pairs.begin(), pairs.end());
    }
    for (auto [a, b] : pairs) {
      if (unit(rng) < 0.5) std::swap(a, b);
      candidates.clear();
      for (ModelIndex s = 0; s < cfg.m; ++s) {
        if (cfg.allow_self_review || (s != a && s != b)) candidates.push_back(s);
      }
      std::shuffle(candidates.begin(), candidates.end(), rng);
      std::sort(candidates.begin(), candidates.begin() + static_cast<long>(r));
      for (std::size_t k = 0; k < r; ++k) {
        const ModelIndex s = candidates[k];
        ReviewRecord rec{question_id, a, b, Outcome::kTie, s};
        const double u = unit(rng);
        if (self_favoring[s] && (s == a || s == b) && u < cfg.self_bias) {
          rec.outcome = s == a ? Outcome::kFirstWins : Outcome::kSecondWins;
        } else {
          rec.outcome = synthetic_verdict(out.judge_ability[s],
                                          out.qualities.at(q, a),
                                          out.qualities.at(q, b), cfg, rng);
        }
        records.push_back(rec);
      }
    }
  }

  out.dataset.registry = registry;
  out.dataset.self_review_allowed = cfg.allow_self_review;

  ScoreVector ability(cfg.m);
  for (std::size_t j = 0; j < cfg.m; ++j) ability[j] = out.population[j].ability;
  out.ground_truth = ranking_from_scores(ability, registry);
  return out;
}

}  // namespace peerrank
