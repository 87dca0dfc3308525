#include "peerrank/consistency.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

#include "peerrank/errors.hpp"
#include "peerrank/random.hpp"

namespace peerrank {
namespace {

constexpr int kMaxReseeds = 5;

std::vector<std::size_t> active_indices(const ActiveMask& active) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < active.size(); ++i) {
    if (active[i]) idx.push_back(i);
  }
  return idx;
}

WeightVector weights_from_theta(std::span<const double> theta) {
  WeightVector w(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) w[i] = logistic(theta[i]);
  return w;
}

double objective_on(const Scorer& scorer, const WeightVector& w,
                    const ActiveMask& active) {
  if (scorer.dataset().records.empty()) {
    throw DegenerateInputError("objective is undefined on an empty dataset");
  }
  ScoreVector g = scorer.scores(w, active);
  std::vector<double> x, y;
  for (std::size_t i : active_indices(active)) {
    x.push_back(g[i]);
    y.push_back(w[i]);
  }
  return pearson(x, y);
}

std::vector<double> analytic_plain_gradient(const Scorer& scorer,
                                            std::span<const double> theta,
                                            const ActiveMask& active) {
  const std::size_t m = scorer.size();
  const std::vector<double>& c = scorer.credit();
  const WeightVector w = weights_from_theta(theta);
  const ScoreVector g = scorer.scores(w, active);
  const auto idx = active_indices(active);
  const double n = static_cast<double>(idx.size());

  double mx = 0, my = 0;
  for (std::size_t a : idx) {
    mx += g[a];
    my += w[a];
  }
  mx /= n;
  my /= n;
  double sxx = 0, syy = 0, sxy = 0;
  for (std::size_t a : idx) {
    sxx += (g[a] - mx) * (g[a] - mx);
    syy += (w[a] - my) * (w[a] - my);
    sxy += (g[a] - mx) * (w[a] - my);
  }
  if (!(sxx > 0) || !(syy > 0)) {
    throw DegenerateInputError("zero variance in scores or weights");
  }
  const double norm = std::sqrt(sxx * syy);
  const double r = sxy / norm;

  // d r / d G_a for each active contestant a.
  std::vector<double> d_g(m, 0.0);
  for (std::size_t a : idx) {
    d_g[a] = (w[a] - my) / norm - r * (g[a] - mx) / sxx;
  }
  std::vector<double> grad(m, 0.0);
  for (std::size_t s : idx) {
    double d_w = (g[s] - mx) / norm - r * (w[s] - my) / syy;
    for (std::size_t a : idx) d_w += d_g[a] * c[a * m + s];
    grad[s] = d_w * w[s] * (1.0 - w[s]);
  }
  return grad;
}

}  // namespace

double logistic(double t) { return 1.0 / (1.0 + std::exp(-t)); }

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw ArgumentError("pearson: sequences differ in length");
  }
  if (x.size() < 2) throw ArgumentError("pearson: need at least 2 points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (!(sxx > 0) || !(syy > 0)) {
    throw DegenerateInputError("pearson: zero variance input");
  }
  double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

double objective(const WeightVector& weights, const ReviewDataset& dataset,
                 const ScoringMechanism& mechanism) {
  return objective(weights, dataset, mechanism,
                   all_active(dataset.registry.size()));
}

double objective(const WeightVector& weights, const ReviewDataset& dataset,
                 const ScoringMechanism& mechanism, const ActiveMask& active) {
  if (dataset.records.empty()) {
    throw DegenerateInputError("objective is undefined on an empty dataset");
  }
  return objective_on(Scorer(dataset, mechanism), weights, active);
}

void OptConfig::validate() const {
  if (!(step_size > 0)) throw ArgumentError("step_size must be > 0");
  if (max_iters < 1) throw ArgumentError("max_iters must be >= 1");
  if (!(rel_tol > 0)) throw ArgumentError("rel_tol must be > 0");
  if (!(fd_step > 0)) throw ArgumentError("fd_step must be > 0");
  peerrank::validate(mechanism);
}

std::vector<double> finite_difference_gradient(const Scorer& scorer,
                                               std::span<const double> theta,
                                               const ActiveMask& active,
                                               double h, bool parallel) {
  const auto idx = active_indices(active);
  std::vector<double> grad(theta.size(), 0.0);
  std::exception_ptr failure;
  const auto count = static_cast<std::int64_t>(idx.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::int64_t c = 0; c < count; ++c) {
    const std::size_t s = idx[static_cast<std::size_t>(c)];
    try {
      std::vector<double> t(theta.begin(), theta.end());
      t[s] = theta[s] + h;
      const double up = objective_on(scorer, weights_from_theta(t), active);
      t[s] = theta[s] - h;
      const double down = objective_on(scorer, weights_from_theta(t), active);
      grad[s] = (up - down) / (2.0 * h);
    } catch (...) {
#pragma omp critical(peerrank_fd_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return grad;
}

std::vector<double> objective_gradient(const Scorer& scorer,
                                       std::span<const double> theta,
                                       const ActiveMask& active,
                                       const OptConfig& cfg) {
  if (std::holds_alternative<PlainMechanism>(scorer.mechanism())) {
    return analytic_plain_gradient(scorer, theta, active);
  }
  return finite_difference_gradient(scorer, theta, active, cfg.fd_step,
                                    cfg.parallel);
}

OptResult optimize_weights(const ReviewDataset& dataset, const OptConfig& cfg) {
  return optimize_weights(dataset, cfg, all_active(dataset.registry.size()));
}

OptResult optimize_weights(const ReviewDataset& dataset, const OptConfig& cfg,
                           const ActiveMask& active) {
  cfg.validate();
  Scorer scorer(dataset, cfg.mechanism, cfg.parallel);
  return optimize_weights(scorer, cfg, active);
}

OptResult optimize_weights(const Scorer& scorer, const OptConfig& cfg,
                           const ActiveMask& active) {
  cfg.validate();
  const std::size_t m = scorer.size();
  if (active.size() != m) throw SchemaError("active mask size mismatch");
  if (active_indices(active).size() < 3) {
    throw ArgumentError("optimization needs at least 3 active models");
  }

  OptResult result;
  result.active = active;
  std::vector<double> theta(m);
  double current = 0.0;
  bool initialized = false;
  for (int attempt = 0; attempt <= kMaxReseeds && !initialized; ++attempt) {
    Rng rng(derive_seed(cfg.seed, {static_cast<std::uint64_t>(attempt)}));
    std::normal_distribution<double> normal(0.0, 1.0);
    for (auto& t : theta) t = normal(rng);
    try {
      current = objective_on(scorer, weights_from_theta(theta), active);
      initialized = true;
    } catch (const DegenerateInputError&) {
      if (scorer.dataset().records.empty()) throw;
      result.trace.reseeds = attempt + 1;
    }
  }
  if (!initialized) {
    throw DegenerateInputError("objective degenerate at every initialization");
  }

  result.trace.objective.push_back(current);
  for (int it = 0; it < cfg.max_iters; ++it) {
    const std::vector<double> grad =
        objective_gradient(scorer, theta, active, cfg);
    for (std::size_t s = 0; s < m; ++s) {
      if (active[s]) theta[s] += cfg.step_size * grad[s];
    }
    const double next = objective_on(scorer, weights_from_theta(theta), active);
    result.trace.objective.push_back(next);
    const double change = std::abs(next - current);
    current = next;
    if (change < cfg.rel_tol * std::max(std::abs(current), 1e-12)) {
      result.trace.converged = true;
      break;
    }
  }

  for (double o : result.trace.objective) result.trace.loss.push_back(1.0 - o);
  result.weights = weights_from_theta(theta);
  result.scores = scorer.scores(result.weights, active);
  return result;
}

}  // namespace peerrank
