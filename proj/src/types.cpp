#include "peerrank/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "peerrank/errors.hpp"

namespace peerrank {

ModelId::ModelId(std::string value) : value_(std::move(value)) {
  if (value_.empty()) throw SchemaError("model id must be non-empty");
}

ModelRegistry::ModelRegistry(std::vector<ModelId> models)
    : models_(std::move(models)) {
  if (models_.size() < 2) {
    throw SchemaError("registry needs at least 2 models, got " +
                      std::to_string(models_.size()));
  }
  for (ModelIndex i = 0; i < models_.size(); ++i) {
    if (models_[i].str().empty()) throw SchemaError("empty model id");
    if (!index_.emplace(models_[i].str(), i).second) {
      throw SchemaError("duplicate model id '" + models_[i].str() + "'");
    }
  }
}

ModelRegistry ModelRegistry::from_strings(const std::vector<std::string>& ids) {
  std::vector<ModelId> models;
  models.reserve(ids.size());
  for (const auto& id : ids) models.emplace_back(id);
  return ModelRegistry(std::move(models));
}

std::optional<ModelIndex> ModelRegistry::find(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

ModelIndex ModelRegistry::index_of(const std::string& id) const {
  auto found = find(id);
  if (!found) throw SchemaError("unknown model id '" + id + "'");
  return *found;
}

ModelIndex ModelRegistry::index_of(const ModelId& id) const {
  return index_of(id.str());
}

Outcome mirror(Outcome o) {
  switch (o) {
    case Outcome::kFirstWins:
      return Outcome::kSecondWins;
    case Outcome::kSecondWins:
      return Outcome::kFirstWins;
    case Outcome::kTie:
      break;
  }
  return Outcome::kTie;
}

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::kFirstWins:
      return "FIRST_WINS";
    case Outcome::kSecondWins:
      return "SECOND_WINS";
    case Outcome::kTie:
      break;
  }
  return "TIE";
}

bool canonical_less(const ReviewRecord& a, const ReviewRecord& b) {
  return std::tie(a.question_id, a.model_a, a.model_b, a.reviewer, a.outcome) <
         std::tie(b.question_id, b.model_a, b.model_b, b.reviewer, b.outcome);
}

void ReviewDataset::validate() const {
  const std::size_t m = registry.size();
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.model_a >= m || r.model_b >= m || r.reviewer >= m) {
      throw SchemaError("record " + std::to_string(i) +
                        " references a model outside the registry");
    }
    if (r.model_a == r.model_b) {
      throw ConstraintError("record " + std::to_string(i) +
                            " pairs a model with itself");
    }
    if (!self_review_allowed &&
        (r.reviewer == r.model_a || r.reviewer == r.model_b)) {
      throw ConstraintError("record " + std::to_string(i) + ": judge '" +
                            registry.at(r.reviewer).str() +
                            "' reviews its own battle");
    }
  }
}

ActiveMask all_active(std::size_t m) { return ActiveMask(m, 1); }

Ranking ranking_from_scores(const ScoreVector& scores,
                            const ModelRegistry& registry) {
  if (scores.size() != registry.size()) {
    throw SchemaError("score vector has " + std::to_string(scores.size()) +
                      " entries for " + std::to_string(registry.size()) +
                      " models");
  }
  for (ModelIndex i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) {
      throw SchemaError("missing or non-finite score for '" +
                        registry.at(i).str() + "'");
    }
  }
  std::vector<ModelIndex> order(scores.size());
  std::iota(order.begin(), order.end(), ModelIndex{0});
  std::sort(order.begin(), order.end(), [&](ModelIndex a, ModelIndex b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return registry.at(a) < registry.at(b);
  });
  Ranking ranking;
  ranking.order.reserve(order.size());
  for (ModelIndex i : order) ranking.order.push_back(registry.at(i));
  return ranking;
}

}  // namespace peerrank
