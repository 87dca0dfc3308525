#include "peerrank/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "peerrank/errors.hpp"
#include "peerrank/random.hpp"

namespace peerrank {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::vector<char> reviewers_present(const ReviewDataset& ds) {
  std::vector<char> present(ds.registry.size(), 0);
  for (const auto& r : ds.records) {
    if (r.reviewer < present.size()) present[r.reviewer] = 1;
  }
  return present;
}

void check_weights(const ReviewDataset& ds, const WeightVector& weights,
                   const ActiveMask& active,
                   const std::vector<char>& present) {
  const std::size_t m = ds.registry.size();
  if (active.size() != m) throw SchemaError("active mask size mismatch");
  if (weights.size() != m) {
    throw SchemaError("weight vector has " + std::to_string(weights.size()) +
                      " entries for " + std::to_string(m) + " models");
  }
  for (std::size_t s = 0; s < m; ++s) {
    if (present[s] && active[s] && !std::isfinite(weights[s])) {
      throw SchemaError("no weight for reviewer '" + ds.registry.at(s).str() +
                        "'");
    }
  }
}

double outcome_credit_first(Outcome o) {
  switch (o) {
    case Outcome::kFirstWins:
      return 1.0;
    case Outcome::kSecondWins:
      return 0.0;
    case Outcome::kTie:
      break;
  }
  return 0.5;
}

ScoreVector elo_impl(const ReviewDataset& ds, const WeightVector& weights,
                     const EloMechanism& cfg, const ActiveMask& active) {
  const std::size_t m = ds.registry.size();
  ScoreVector g(m, cfg.initial);
  std::vector<std::size_t> order;
  order.reserve(ds.records.size());
  for (std::size_t i = 0; i < ds.records.size(); ++i) {
    if (active[ds.records[i].reviewer]) order.push_back(i);
  }
  Rng rng(cfg.shuffle_seed);
  for (int pass = 0; pass < cfg.passes; ++pass) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i : order) {
      const ReviewRecord& r = ds.records[i];
      const double step = cfg.k_factor * weights[r.reviewer];
      const double credit_a = outcome_credit_first(r.outcome);
      const double ga = g[r.model_a];
      const double gb = g[r.model_b];
      g[r.model_a] += step * elo_term(ga, gb, credit_a, cfg.base, cfg.scale);
      g[r.model_b] +=
          step * elo_term(gb, ga, 1.0 - credit_a, cfg.base, cfg.scale);
    }
  }
  return g;
}

ScoreVector rank_impl(const ReviewDataset& ds,
                      const kernels::ContestTally& tally,
                      const std::vector<double>& unit_credit,
                      const WeightVector& weights, const RankMechanism& cfg,
                      const ActiveMask& active, bool parallel) {
  const std::size_t m = ds.registry.size();
  const WeightVector ones(m, 1.0);
  ScoreVector g(m, 0.0);
  if (parallel) {
    kernels::plain_scores_parallel(unit_credit, ones, active, g);
  } else {
    kernels::plain_scores_serial(unit_credit, ones, active, g);
  }
  std::vector<double> ranks = rank_positions(g, ds.registry);
  for (int pass = 0; pass < cfg.passes; ++pass) {
    if (parallel) {
      kernels::rank_pass_parallel(tally, weights, active, ranks, cfg.k, g);
    } else {
      kernels::rank_pass_serial(tally, weights, active, ranks, cfg.k, g);
    }
    std::vector<double> next = rank_positions(g, ds.registry);
    if (next == ranks) break;
    ranks = std::move(next);
  }
  return g;
}

}  // namespace

void validate(const ScoringMechanism& mechanism) {
  std::visit(Overloaded{
                 [](const PlainMechanism& p) {
                   if (!(p.tie_credit >= 0 && p.tie_credit <= 1)) {
                     throw ArgumentError("tie_credit must be in [0, 1]");
                   }
                 },
                 [](const EloMechanism& e) {
                   if (!(e.base > 1)) throw ArgumentError("Elo base must be > 1");
                   if (!(e.scale > 0)) throw ArgumentError("Elo scale must be > 0");
                   if (e.passes < 1) throw ArgumentError("Elo passes must be >= 1");
                   if (!std::isfinite(e.k_factor) || !std::isfinite(e.initial)) {
                     throw ArgumentError("Elo constants must be finite");
                   }
                 },
                 [](const RankMechanism& r) {
                   if (!(r.k > 0)) throw ArgumentError("rank K must be > 0");
                   if (r.passes < 1) throw ArgumentError("rank passes must be >= 1");
                 },
             },
             mechanism);
}

std::string mechanism_name(const ScoringMechanism& mechanism) {
  return std::visit(Overloaded{
                        [](const PlainMechanism&) { return std::string("plain"); },
                        [](const EloMechanism&) { return std::string("elo"); },
                        [](const RankMechanism&) { return std::string("rank"); },
                    },
                    mechanism);
}

ScoreVector weighted_scores(const ReviewDataset& dataset,
                            const WeightVector& weights, double tie_credit) {
  return weighted_scores(dataset, weights, tie_credit,
                         all_active(dataset.registry.size()));
}

ScoreVector weighted_scores(const ReviewDataset& dataset,
                            const WeightVector& weights, double tie_credit,
                            const ActiveMask& active) {
  return Scorer(dataset, PlainMechanism{tie_credit}).scores(weights, active);
}

double elo_term(double g_j, double g_k, double credit, double base,
                double scale) {
  return credit - 1.0 / (1.0 + std::pow(base, (g_k - g_j) / scale));
}

ScoreVector run_elo(const ReviewDataset& dataset, const WeightVector& weights,
                    const EloMechanism& cfg) {
  return run_elo(dataset, weights, cfg, all_active(dataset.registry.size()));
}

ScoreVector run_elo(const ReviewDataset& dataset, const WeightVector& weights,
                    const EloMechanism& cfg, const ActiveMask& active) {
  validate(cfg);
  check_weights(dataset, weights, active, reviewers_present(dataset));
  return elo_impl(dataset, weights, cfg, active);
}

double rank_term(double rank_j, double rank_k, double credit, double k_const) {
  if (credit >= 1.0) return 1.0 + (rank_j - rank_k) / k_const;
  if (credit <= 0.0) return 0.0;
  return 0.5;
}

ScoreVector run_rank(const ReviewDataset& dataset, const WeightVector& weights,
                     const RankMechanism& cfg) {
  return run_rank(dataset, weights, cfg, all_active(dataset.registry.size()));
}

ScoreVector run_rank(const ReviewDataset& dataset, const WeightVector& weights,
                     const RankMechanism& cfg, const ActiveMask& active) {
  return Scorer(dataset, cfg).scores(weights, active);
}

std::vector<double> rank_positions(const ScoreVector& scores,
                                   const ModelRegistry& registry) {
  Ranking ranking = ranking_from_scores(scores, registry);
  std::vector<double> pos(registry.size(), 0.0);
  for (std::size_t p = 0; p < ranking.order.size(); ++p) {
    pos[registry.index_of(ranking.order[p])] = static_cast<double>(p + 1);
  }
  return pos;
}

Scorer::Scorer(const ReviewDataset& dataset, ScoringMechanism mechanism,
               bool parallel)
    : dataset_(&dataset),
      mechanism_(std::move(mechanism)),
      parallel_(parallel),
      reviewer_present_(reviewers_present(dataset)) {
  validate(mechanism_);
  if (!std::holds_alternative<EloMechanism>(mechanism_)) {
    const std::size_t m = dataset.registry.size();
    tally_ = parallel_ ? kernels::tally_parallel(dataset.records, m)
                       : kernels::tally_serial(dataset.records, m);
    const double tie_credit =
        std::holds_alternative<PlainMechanism>(mechanism_)
            ? std::get<PlainMechanism>(mechanism_).tie_credit
            : 0.5;
    credit_ = kernels::credit_matrix(tally_, tie_credit);
  }
}

ScoreVector Scorer::scores(const WeightVector& weights,
                           const ActiveMask& active) const {
  check_weights(*dataset_, weights, active, reviewer_present_);
  const std::size_t m = dataset_->registry.size();
  // Absent reviewers may carry NaN weights; they contribute nothing.
  WeightVector w = weights;
  for (std::size_t s = 0; s < m; ++s) {
    if (!reviewer_present_[s] || !active[s]) w[s] = 0.0;
  }
  return std::visit(
      Overloaded{
          [&](const PlainMechanism&) {
            ScoreVector g(m, 0.0);
            if (parallel_) {
              kernels::plain_scores_parallel(credit_, w, active, g);
            } else {
              kernels::plain_scores_serial(credit_, w, active, g);
            }
            return g;
          },
          [&](const EloMechanism& e) {
            return elo_impl(*dataset_, w, e, active);
          },
          [&](const RankMechanism& r) {
            return rank_impl(*dataset_, tally_, credit_, w, r, active,
                             parallel_);
          },
      },
      mechanism_);
}

}  // namespace peerrank
