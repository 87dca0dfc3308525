#pragma once

// Line-delimited JSON readers and writers for questions, answers and review
// rows, plus leaderboard, ranking and weight documents.

#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "peerrank/types.hpp"

namespace peerrank {

struct Question {
  int question_id = 0;
  std::string category;
  std::vector<std::string> turns;
  // Present only for categories with a definitive answer.
  std::optional<std::vector<std::string>> reference;

  friend bool operator==(const Question&, const Question&) = default;
};

using QuestionSet = std::vector<Question>;

struct Answer {
  int question_id = 0;
  std::string answer_id;
  ModelId model;
  std::vector<std::string> turns;

  friend bool operator==(const Answer&, const Answer&) = default;
};

// Verdict of one presentation order, named by contestant slot.
enum class Winner { kModel1, kModel2, kTie };

const char* to_string(Winner w);

struct RawReviewRow {
  int question_id = 0;
  ModelId model_1;
  ModelId model_2;
  Winner g1_winner = Winner::kTie;
  Winner g2_winner = Winner::kTie;
  ModelId judge;

  friend bool operator==(const RawReviewRow&, const RawReviewRow&) = default;
};

struct ReadOptions {
  bool allow_self_review = false;
};

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

QuestionSet read_question_set(std::istream& in);
void write_question_set(const QuestionSet& questions, std::ostream& out);

std::vector<Answer> read_answer_set(std::istream& in);
void write_answer_set(const std::vector<Answer>& answers, std::ostream& out);

std::vector<RawReviewRow> read_review_dataset(std::istream& in,
                                              const ModelRegistry& registry,
                                              ReadOptions options = {});
void write_review_rows(const std::vector<RawReviewRow>& rows,
                       std::ostream& out);

// Agreement keeps the winner; any disagreement or tie verdict is a tie.
Outcome aggregate_dual_order(Winner g1, Winner g2);

ReviewDataset to_dataset(const std::vector<RawReviewRow>& rows,
                         const ModelRegistry& registry,
                         ReadOptions options = {});
// Rows with both presentation orders carrying the aggregated verdict.
std::vector<RawReviewRow> to_rows(const ReviewDataset& dataset);

// Sorted unique ids of every model named in the rows.
ModelRegistry infer_registry(const std::vector<RawReviewRow>& rows);
// Parses rows without a registry; useful before the pool is known.
std::vector<RawReviewRow> read_review_rows_unchecked(std::istream& in);

struct LeaderboardEntry {
  std::size_t rank = 0;
  ModelId model;
  double grade = 0.0;
  bool eliminated = false;

  friend bool operator==(const LeaderboardEntry&,
                         const LeaderboardEntry&) = default;
};

std::vector<LeaderboardEntry> make_leaderboard(
    const Ranking& ranking, const ScoreVector& scores,
    const ModelRegistry& registry, const std::set<ModelId>& eliminated);

// Emits "#<rank>  <id> | Grade: <score>[ | Eliminated]" per model to `text`
// and the same rows as a JSON document to `json`.
void write_leaderboard(const Ranking& ranking, const ScoreVector& scores,
                       const ModelRegistry& registry,
                       const std::set<ModelId>& eliminated, std::ostream& text,
                       std::ostream& json);
std::vector<LeaderboardEntry> read_leaderboard_json(std::istream& in);
std::vector<LeaderboardEntry> read_leaderboard_text(std::istream& in);

// Accepts a bare JSON array of ids, {"ranking": [...]}, or a leaderboard.
Ranking read_ranking(std::istream& in);
void write_ranking(const Ranking& ranking, std::ostream& out);

// {"weights": {"<id>": w, ...}} in registry order; only listed models.
void write_weights(const WeightVector& weights, const ActiveMask& active,
                   const ModelRegistry& registry, std::ostream& out);
struct LoadedWeights {
  WeightVector weights;  // NaN for models absent from the document
  ActiveMask present;
};
LoadedWeights read_weights(std::istream& in, const ModelRegistry& registry);

}  // namespace peerrank
