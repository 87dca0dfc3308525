#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace peerrank {

// Short, non-empty token naming one model in the pool.
class ModelId {
 public:
  ModelId() = default;
  explicit ModelId(std::string value);

  const std::string& str() const { return value_; }

  friend auto operator<=>(const ModelId&, const ModelId&) = default;
  friend bool operator==(const ModelId&, const ModelId&) = default;

 private:
  std::string value_;
};

// Position of a model inside its registry.
using ModelIndex = std::size_t;

// Ordered pool of at least two distinct models.
class ModelRegistry {
 public:
  ModelRegistry() = default;
  explicit ModelRegistry(std::vector<ModelId> models);
  static ModelRegistry from_strings(const std::vector<std::string>& ids);

  std::size_t size() const { return models_.size(); }
  const ModelId& at(ModelIndex i) const { return models_.at(i); }
  const std::vector<ModelId>& models() const { return models_; }

  // Throws SchemaError for an unknown id.
  ModelIndex index_of(const ModelId& id) const;
  ModelIndex index_of(const std::string& id) const;
  std::optional<ModelIndex> find(const std::string& id) const;
  bool contains(const std::string& id) const { return find(id).has_value(); }

  friend bool operator==(const ModelRegistry& a, const ModelRegistry& b) {
    return a.models_ == b.models_;
  }

 private:
  std::vector<ModelId> models_;
  std::unordered_map<std::string, ModelIndex> index_;
};

// Result of one pairwise judgment, relative to the first contestant.
enum class Outcome { kFirstWins, kSecondWins, kTie };

Outcome mirror(Outcome o);
const char* to_string(Outcome o);

struct ReviewRecord {
  int question_id = 0;
  ModelIndex model_a = 0;
  ModelIndex model_b = 0;
  Outcome outcome = Outcome::kTie;
  ModelIndex reviewer = 0;

  friend bool operator==(const ReviewRecord&, const ReviewRecord&) = default;
};

// Canonical persistence order: (question, model_a, model_b, reviewer).
bool canonical_less(const ReviewRecord& a, const ReviewRecord& b);

struct ReviewDataset {
  ModelRegistry registry;
  std::vector<ReviewRecord> records;
  // Bias studies need judges that review their own battles.
  bool self_review_allowed = false;

  // Throws SchemaError / ConstraintError when a record breaks an invariant.
  void validate() const;
};

// Per-model vectors aligned with registry positions.
using ScoreVector = std::vector<double>;
using WeightVector = std::vector<double>;
// Reviewer participation flags aligned with registry positions.
using ActiveMask = std::vector<char>;

ActiveMask all_active(std::size_t m);

struct Ranking {
  std::vector<ModelId> order;  // best first

  friend bool operator==(const Ranking&, const Ranking&) = default;
};

// Sort by score descending; exact ties go to the smaller ModelId.
Ranking ranking_from_scores(const ScoreVector& scores,
                            const ModelRegistry& registry);

}  // namespace peerrank
