#include "peerrank/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <ostream>
#include <tuple>

#include "peerrank/data_io.hpp"
#include "peerrank/errors.hpp"

namespace peerrank {
namespace {

// Win credit for model `i` in a record whose contestants are {i, j}.
double credit_for(const ReviewRecord& r, ModelIndex i) {
  if (r.outcome == Outcome::kTie) return 0.5;
  const bool first = r.outcome == Outcome::kFirstWins;
  return (first ? r.model_a : r.model_b) == i ? 1.0 : 0.0;
}

struct RateTable {
  // (reviewer, i, j) with i < j -> (credit to i, records)
  std::map<std::tuple<ModelIndex, ModelIndex, ModelIndex>,
           std::pair<double, std::size_t>>
      cells;

  explicit RateTable(const ReviewDataset& dataset) {
    for (const auto& r : dataset.records) {
      const ModelIndex lo = std::min(r.model_a, r.model_b);
      const ModelIndex hi = std::max(r.model_a, r.model_b);
      auto& cell = cells[{r.reviewer, lo, hi}];
      cell.first += credit_for(r, lo);
      cell.second += 1;
    }
  }

  // (P_s(i > j), support)
  std::optional<std::pair<double, std::size_t>> rate(ModelIndex s, ModelIndex i,
                                                     ModelIndex j) const {
    auto it = cells.find({s, std::min(i, j), std::max(i, j)});
    if (it == cells.end() || it->second.second == 0) return std::nullopt;
    const double n = static_cast<double>(it->second.second);
    double p = it->second.first / n;
    if (i > j) p = 1.0 - p;
    return std::make_pair(p, it->second.second);
  }
};

std::vector<ModelIndex> resolve_subset(const ReviewDataset& dataset,
                                       const std::vector<ModelIndex>& subset) {
  std::vector<ModelIndex> models = subset;
  if (models.empty()) {
    for (ModelIndex i = 0; i < dataset.registry.size(); ++i) models.push_back(i);
  }
  std::sort(models.begin(), models.end());
  models.erase(std::unique(models.begin(), models.end()), models.end());
  for (ModelIndex i : models) {
    if (i >= dataset.registry.size()) throw SchemaError("subset model out of range");
  }
  return models;
}

PreferenceGapMatrix build_pg(const ReviewDataset& dataset,
                             const std::vector<ModelIndex>& subset,
                             const WeightVector* weights) {
  PreferenceGapMatrix out;
  out.models = resolve_subset(dataset, subset);
  if (weights) {
    if (weights->size() != dataset.registry.size()) {
      throw SchemaError("weight vector size mismatch");
    }
    for (ModelIndex i : out.models) {
      if (!std::isfinite((*weights)[i])) {
        throw SchemaError("no weight for model '" + dataset.registry.at(i).str() + "'");
      }
    }
  }
  const std::size_t k = out.models.size();
  out.pg.assign(k * k, std::nullopt);
  out.counts.assign(k * k, 0);
  const RateTable table(dataset);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      const ModelIndex i = out.models[a];
      const ModelIndex j = out.models[b];
      auto by_i = table.rate(i, i, j);
      auto by_j = table.rate(j, i, j);
      if (!by_i || !by_j) {
        out.missing.emplace_back(i, j);
        continue;
      }
      const double wi = weights ? (*weights)[i] : 1.0;
      const double wj = weights ? (*weights)[j] : 1.0;
      // P_s(j > i) = 1 - P_s(i > j)
      out.pg[a * k + b] = wi * by_i->first - wj * by_j->first;
      out.pg[b * k + a] = wj * (1.0 - by_j->first) - wi * (1.0 - by_i->first);
      out.counts[a * k + b] = out.counts[b * k + a] = by_i->second + by_j->second;
    }
  }
  return out;
}

}  // namespace

std::optional<double> PreferenceGapMatrix::at(ModelIndex i, ModelIndex j) const {
  auto a = std::find(models.begin(), models.end(), i);
  auto b = std::find(models.begin(), models.end(), j);
  if (a == models.end() || b == models.end()) return std::nullopt;
  return pg[static_cast<std::size_t>(a - models.begin()) * models.size() +
            static_cast<std::size_t>(b - models.begin())];
}

std::optional<double> win_rate(const ReviewDataset& dataset, ModelIndex s,
                               ModelIndex i, ModelIndex j) {
  auto r = RateTable(dataset).rate(s, i, j);
  if (!r) return std::nullopt;
  return r->first;
}

PreferenceGapMatrix preference_gap_matrix(const ReviewDataset& dataset,
                                          const std::vector<ModelIndex>& subset) {
  return build_pg(dataset, subset, nullptr);
}

PreferenceGapMatrix reweighted_pg_matrix(const ReviewDataset& dataset,
                                         const WeightVector& weights,
                                         const std::vector<ModelIndex>& subset) {
  return build_pg(dataset, subset, &weights);
}

ScoreVector majority_voting(const ReviewDataset& dataset) {
  ScoreVector scores(dataset.registry.size(), 0.0);
  // (question, lo, hi) -> votes for lo, votes for hi, tie votes
  std::map<std::tuple<int, ModelIndex, ModelIndex>, std::array<int, 3>> votes;
  for (const auto& r : dataset.records) {
    const ModelIndex lo = std::min(r.model_a, r.model_b);
    const ModelIndex hi = std::max(r.model_a, r.model_b);
    auto& v = votes[{r.question_id, lo, hi}];
    const double c = credit_for(r, lo);
    v[c == 1.0 ? 0 : c == 0.0 ? 1 : 2] += 1;
  }
  for (const auto& [key, v] : votes) {
    const ModelIndex lo = std::get<1>(key);
    const ModelIndex hi = std::get<2>(key);
    if (v[0] > v[1] && v[0] > v[2]) {
      scores[lo] += 1.0;
    } else if (v[1] > v[0] && v[1] > v[2]) {
      scores[hi] += 1.0;
    } else {
      scores[lo] += 0.5;
      scores[hi] += 0.5;
    }
  }
  return scores;
}

ScoreVector rating_voting(const ReviewDataset& dataset) {
  ScoreVector scores(dataset.registry.size(), 0.0);
  for (const auto& r : dataset.records) {
    switch (r.outcome) {
      case Outcome::kFirstWins:
        scores[r.model_a] += 1.0;
        break;
      case Outcome::kSecondWins:
        scores[r.model_b] += 1.0;
        break;
      case Outcome::kTie:
        scores[r.model_a] += 0.5;
        scores[r.model_b] += 0.5;
        break;
    }
  }
  return scores;
}

void write_pg_csv(const PreferenceGapMatrix& matrix,
                  const ModelRegistry& registry, std::ostream& out) {
  const std::size_t k = matrix.size();
  out << "model";
  for (ModelIndex i : matrix.models) out << ',' << registry.at(i).str();
  out << '\n';
  for (std::size_t a = 0; a < k; ++a) {
    out << registry.at(matrix.models[a]).str();
    for (std::size_t b = 0; b < k; ++b) {
      out << ',';
      if (const auto& v = matrix.pg[a * k + b]) out << format_double(*v);
    }
    out << '\n';
  }
}

}  // namespace peerrank
