#pragma once

// Preference-gap bias matrices and the crowd-vote baselines.

#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "peerrank/types.hpp"

namespace peerrank {

// PG over a subset of models, rows and columns in registry order. Entries
// lacking support from either self-judge are absent and listed in
// `missing` (i < j in registry order).
struct PreferenceGapMatrix {
  std::vector<ModelIndex> models;
  std::vector<std::optional<double>> pg;  // models.size() squared, row-major
  std::vector<std::size_t> counts;        // records behind each entry
  std::vector<std::pair<ModelIndex, ModelIndex>> missing;

  std::size_t size() const { return models.size(); }
  // Looks up by registry index; nullopt when absent or on the diagonal.
  std::optional<double> at(ModelIndex i, ModelIndex j) const;
};

// Fraction of records with contestants {i, j} and reviewer s in which i
// wins, ties counting half; nullopt without any such record.
std::optional<double> win_rate(const ReviewDataset& dataset, ModelIndex s,
                               ModelIndex i, ModelIndex j);

// pg(i, j) = P_i(i > j) - P_j(i > j). An empty subset means every model.
PreferenceGapMatrix preference_gap_matrix(
    const ReviewDataset& dataset, const std::vector<ModelIndex>& subset = {});

// pg(i, j) = w_i * P_i(i > j) - w_j * P_j(i > j). Throws SchemaError when a
// subset model has no finite weight.
PreferenceGapMatrix reweighted_pg_matrix(
    const ReviewDataset& dataset, const WeightVector& weights,
    const std::vector<ModelIndex>& subset = {});

// Per (question, pair), the contestant with a strict plurality of votes
// (against the other contestant and tie votes) gains 1; otherwise both gain
// 0.5.
ScoreVector majority_voting(const ReviewDataset& dataset);

// Raw vote totals: 1 per win vote, 0.5 to both per tie vote.
ScoreVector rating_voting(const ReviewDataset& dataset);

// Heatmap CSV: header row of ids, then one row per model; absent cells are
// empty.
void write_pg_csv(const PreferenceGapMatrix& matrix,
                  const ModelRegistry& registry, std::ostream& out);

}  // namespace peerrank
