#include "peerrank/elimination.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "peerrank/errors.hpp"
#include "peerrank/data_io.hpp"

namespace peerrank {
namespace {

std::size_t count_active(const ActiveMask& active) {
  std::size_t n = 0;
  for (char a : active) n += a != 0;
  return n;
}

RoundResult optimize_round(const Scorer& scorer, const OptConfig& cfg,
                           const ActiveMask& active) {
  OptResult r = optimize_weights(scorer, cfg, active);
  return {r.weights, r.scores, r.final_loss()};
}

// With only two reviewers left the optimizer cannot run; reuse the previous
// round's weights on the survivors.
RoundResult evaluate_round(const Scorer& scorer, const OptConfig& cfg,
                           const EliminationState& state) {
  if (count_active(state.active) >= 3) {
    return optimize_round(scorer, cfg, state.active);
  }
  RoundResult r;
  r.weights = state.per_round.back().weights;
  r.scores = scorer.scores(r.weights, state.active);
  std::vector<double> x, y;
  for (std::size_t i = 0; i < state.active.size(); ++i) {
    if (!state.active[i]) continue;
    x.push_back(r.scores[i]);
    y.push_back(r.weights[i]);
  }
  try {
    r.final_loss = 1.0 - pearson(x, y);
  } catch (const DegenerateInputError&) {
    r.final_loss = std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

}  // namespace

EliminationState EliminationState::initial(std::size_t m) {
  EliminationState s;
  s.active = all_active(m);
  return s;
}

void EliminationConfig::validate() const {
  if (!(fraction > 0 && fraction < 1)) {
    throw ArgumentError("elimination fraction must be in (0, 1)");
  }
  opt.validate();
}

EliminationState eliminate_step(EliminationState state, const Scorer& scorer,
                                const OptConfig& cfg) {
  if (state.active.size() != scorer.size()) {
    throw SchemaError("active mask size mismatch");
  }
  if (count_active(state.active) < 3) {
    throw ConstraintError("cannot eliminate with fewer than 3 active reviewers");
  }
  RoundResult round = optimize_round(scorer, cfg, state.active);
  const ModelRegistry& registry = scorer.dataset().registry;
  std::size_t worst = state.active.size();
  for (std::size_t i = 0; i < state.active.size(); ++i) {
    if (!state.active[i]) continue;
    if (worst == state.active.size() || round.scores[i] < round.scores[worst] ||
        (round.scores[i] == round.scores[worst] &&
         registry.at(i) < registry.at(worst))) {
      worst = i;
    }
  }
  state.active[worst] = 0;
  state.eliminated.push_back(worst);
  state.per_round.push_back(std::move(round));
  return state;
}

std::size_t auto_threshold(const std::vector<double>& per_round_losses) {
  if (per_round_losses.empty()) throw ArgumentError("no rounds to choose from");
  std::size_t best = 0;
  for (std::size_t i = 1; i < per_round_losses.size(); ++i) {
    if (per_round_losses[i] < per_round_losses[best]) best = i;
  }
  return best;
}

EliminationResult run_elimination(const ReviewDataset& dataset,
                                  const EliminationConfig& cfg) {
  cfg.validate();
  dataset.validate();
  const std::size_t m = dataset.registry.size();
  if (m < 3) throw ConstraintError("elimination needs at least 3 models");
  Scorer scorer(dataset, cfg.opt.mechanism, cfg.opt.parallel);

  EliminationResult result;
  result.state = EliminationState::initial(m);
  EliminationState& state = result.state;

  if (cfg.mode == EliminationMode::kFixed) {
    std::size_t target = static_cast<std::size_t>(
        std::ceil(cfg.fraction * static_cast<double>(m) - 1e-9));
    target = std::min(target, m - 2);
    while (state.eliminated.size() < target) {
      state = eliminate_step(std::move(state), scorer, cfg.opt);
    }
    state.per_round.push_back(evaluate_round(scorer, cfg.opt, state));
    result.selected_round = state.per_round.size() - 1;
  } else {
    while (count_active(state.active) > 3) {
      state = eliminate_step(std::move(state), scorer, cfg.opt);
    }
    state.per_round.push_back(evaluate_round(scorer, cfg.opt, state));
    std::vector<double> losses;
    for (const auto& r : state.per_round) losses.push_back(r.final_loss);
    const std::size_t keep = auto_threshold(losses);
    state.per_round.resize(keep + 1);
    for (std::size_t i = keep; i < state.eliminated.size(); ++i) {
      state.active[state.eliminated[i]] = 1;
    }
    state.eliminated.resize(keep);
    result.selected_round = keep;
  }
  result.ranking = ranking_from_scores(state.per_round.back().scores,
                                       dataset.registry);
  return result;
}

void write_elimination_csv(const EliminationState& state,
                           const ModelRegistry& registry, std::ostream& out) {
  out << "round,eliminated_model,final_loss\n";
  for (std::size_t t = 0; t < state.per_round.size(); ++t) {
    out << t << ',';
    if (t < state.eliminated.size()) out << registry.at(state.eliminated[t]).str();
    out << ',' << format_double(state.per_round[t].final_loss) << '\n';
  }
}

}  // namespace peerrank
