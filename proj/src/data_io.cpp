#include "peerrank/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "peerrank/errors.hpp"

namespace peerrank {
namespace {

using json = nlohmann::ordered_json;

template <typename Fn>
void for_each_record(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!record.is_object()) throw ParseError(line_no, "expected an object");
    try {
      fn(record, line_no);
    } catch (const json::exception& e) {
      throw ParseError(line_no, e.what());
    }
  }
  if (in.bad()) throw IoError("read failure");
}

const json& require(const json& record, const char* key, std::size_t line) {
  auto it = record.find(key);
  if (it == record.end()) {
    throw ParseError(line, std::string("missing field '") + key + "'");
  }
  return *it;
}

int require_int(const json& record, const char* key, std::size_t line) {
  const json& v = require(record, key, line);
  if (!v.is_number_integer()) {
    throw ParseError(line, std::string("field '") + key + "' must be an integer");
  }
  return v.get<int>();
}

std::string require_string(const json& record, const char* key,
                           std::size_t line) {
  const json& v = require(record, key, line);
  if (!v.is_string()) {
    throw ParseError(line, std::string("field '") + key + "' must be a string");
  }
  return v.get<std::string>();
}

// A text field is either a string (one turn) or a list of turn strings.
std::vector<std::string> parse_turns(const json& v, const char* key,
                                     std::size_t line) {
  if (v.is_string()) return {v.get<std::string>()};
  if (v.is_array()) {
    std::vector<std::string> turns;
    for (const auto& t : v) {
      if (!t.is_string()) {
        throw ParseError(line, std::string("field '") + key +
                                   "' must hold strings");
      }
      turns.push_back(t.get<std::string>());
    }
    return turns;
  }
  throw ParseError(line, std::string("field '") + key +
                             "' must be a string or list of strings");
}

json turns_to_json(const std::vector<std::string>& turns) {
  if (turns.size() == 1) return turns.front();
  return json(turns);
}

ModelId parse_model(const json& record, const char* key, std::size_t line) {
  std::string id = require_string(record, key, line);
  if (id.empty()) throw ParseError(line, std::string("empty '") + key + "'");
  return ModelId(std::move(id));
}

Winner parse_winner(const json& record, const char* key, std::size_t line) {
  std::string v = require_string(record, key, line);
  if (v == "model_1") return Winner::kModel1;
  if (v == "model_2") return Winner::kModel2;
  if (v == "tie") return Winner::kTie;
  throw ParseError(line, std::string("field '") + key + "' has value '" + v +
                             "', expected model_1, model_2 or tie");
}

RawReviewRow parse_review_row(const json& record, std::size_t line) {
  RawReviewRow row;
  row.question_id = require_int(record, "question_id", line);
  row.model_1 = parse_model(record, "model_1", line);
  row.model_2 = parse_model(record, "model_2", line);
  row.g1_winner = parse_winner(record, "g1_winner", line);
  row.g2_winner = parse_winner(record, "g2_winner", line);
  row.judge = parse_model(record, "judge", line);
  if (row.model_1 == row.model_2) {
    throw ParseError(line, "model_1 and model_2 are the same model");
  }
  return row;
}

void write_line(const json& j, std::ostream& out) {
  out << j.dump() << '\n';
  if (!out) throw IoError("write failure");
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

const char* to_string(Winner w) {
  switch (w) {
    case Winner::kModel1:
      return "model_1";
    case Winner::kModel2:
      return "model_2";
    case Winner::kTie:
      break;
  }
  return "tie";
}

QuestionSet read_question_set(std::istream& in) {
  QuestionSet questions;
  std::unordered_set<int> seen;
  for_each_record(in, [&](const json& record, std::size_t line) {
    Question q;
    q.question_id = require_int(record, "question_id", line);
    if (!seen.insert(q.question_id).second) {
      throw SchemaError("line " + std::to_string(line) +
                        ": duplicate question_id " +
                        std::to_string(q.question_id));
    }
    if (auto it = record.find("category"); it != record.end() && !it->is_null()) {
      q.category = it->get<std::string>();
    }
    q.turns = parse_turns(require(record, "question", line), "question", line);
    if (auto it = record.find("reference"); it != record.end() && !it->is_null()) {
      auto ref = parse_turns(*it, "reference", line);
      bool blank = std::all_of(ref.begin(), ref.end(),
                               [](const std::string& s) { return s.empty(); });
      if (!blank) q.reference = std::move(ref);
    }
    questions.push_back(std::move(q));
  });
  return questions;
}

void write_question_set(const QuestionSet& questions, std::ostream& out) {
  for (const auto& q : questions) {
    json j;
    j["question_id"] = q.question_id;
    j["category"] = q.category;
    j["question"] = turns_to_json(q.turns);
    j["reference"] = q.reference ? turns_to_json(*q.reference) : json("");
    write_line(j, out);
  }
}

std::vector<Answer> read_answer_set(std::istream& in) {
  std::vector<Answer> answers;
  std::set<std::pair<int, std::string>> seen;
  for_each_record(in, [&](const json& record, std::size_t line) {
    Answer a;
    a.question_id = require_int(record, "question_id", line);
    if (auto it = record.find("answer_id"); it != record.end()) {
      a.answer_id = it->is_string() ? it->get<std::string>() : it->dump();
    }
    a.model = parse_model(record, "model_id", line);
    a.turns = parse_turns(require(record, "answer", line), "answer", line);
    if (!seen.emplace(a.question_id, a.model.str()).second) {
      throw SchemaError("line " + std::to_string(line) + ": model '" +
                        a.model.str() + "' answered question " +
                        std::to_string(a.question_id) + " twice");
    }
    answers.push_back(std::move(a));
  });
  return answers;
}

void write_answer_set(const std::vector<Answer>& answers, std::ostream& out) {
  for (const auto& a : answers) {
    json j;
    j["question_id"] = a.question_id;
    j["answer_id"] = a.answer_id;
    j["model_id"] = a.model.str();
    j["answer"] = turns_to_json(a.turns);
    write_line(j, out);
  }
}

std::vector<RawReviewRow> read_review_rows_unchecked(std::istream& in) {
  std::vector<RawReviewRow> rows;
  for_each_record(in, [&](const json& record, std::size_t line) {
    rows.push_back(parse_review_row(record, line));
  });
  return rows;
}

std::vector<RawReviewRow> read_review_dataset(std::istream& in,
                                              const ModelRegistry& registry,
                                              ReadOptions options) {
  std::vector<RawReviewRow> rows;
  for_each_record(in, [&](const json& record, std::size_t line) {
    RawReviewRow row = parse_review_row(record, line);
    for (const ModelId* id : {&row.model_1, &row.model_2, &row.judge}) {
      if (!registry.contains(id->str())) {
        throw SchemaError("line " + std::to_string(line) +
                          ": unknown model id '" + id->str() + "'");
      }
    }
    if (!options.allow_self_review &&
        (row.judge == row.model_1 || row.judge == row.model_2)) {
      throw ConstraintError("line " + std::to_string(line) + ": judge '" +
                            row.judge.str() + "' reviews its own battle");
    }
    rows.push_back(std::move(row));
  });
  return rows;
}

void write_review_rows(const std::vector<RawReviewRow>& rows,
                       std::ostream& out) {
  for (const auto& r : rows) {
    json j;
    j["question_id"] = r.question_id;
    j["model_1"] = r.model_1.str();
    j["model_2"] = r.model_2.str();
    j["g1_winner"] = to_string(r.g1_winner);
    j["g2_winner"] = to_string(r.g2_winner);
    j["judge"] = r.judge.str();
    write_line(j, out);
  }
}

Outcome aggregate_dual_order(Winner g1, Winner g2) {
  if (g1 == g2) {
    if (g1 == Winner::kModel1) return Outcome::kFirstWins;
    if (g1 == Winner::kModel2) return Outcome::kSecondWins;
  }
  return Outcome::kTie;
}

ReviewDataset to_dataset(const std::vector<RawReviewRow>& rows,
                         const ModelRegistry& registry, ReadOptions options) {
  ReviewDataset ds;
  ds.registry = registry;
  ds.self_review_allowed = options.allow_self_review;
  ds.records.reserve(rows.size());
  for (const auto& row : rows) {
    ReviewRecord r;
    r.question_id = row.question_id;
    r.model_a = registry.index_of(row.model_1);
    r.model_b = registry.index_of(row.model_2);
    r.reviewer = registry.index_of(row.judge);
    r.outcome = aggregate_dual_order(row.g1_winner, row.g2_winner);
    ds.records.push_back(r);
  }
  ds.validate();
  return ds;
}

std::vector<RawReviewRow> to_rows(const ReviewDataset& dataset) {
  std::vector<RawReviewRow> rows;
  rows.reserve(dataset.records.size());
  for (const auto& r : dataset.records) {
    Winner w = r.outcome == Outcome::kFirstWins    ? Winner::kModel1
               : r.outcome == Outcome::kSecondWins ? Winner::kModel2
                                                   : Winner::kTie;
    rows.push_back({r.question_id, dataset.registry.at(r.model_a),
                    dataset.registry.at(r.model_b), w, w,
                    dataset.registry.at(r.reviewer)});
  }
  return rows;
}

ModelRegistry infer_registry(const std::vector<RawReviewRow>& rows) {
  std::set<std::string> ids;
  for (const auto& r : rows) {
    ids.insert(r.model_1.str());
    ids.insert(r.model_2.str());
    ids.insert(r.judge.str());
  }
  return ModelRegistry::from_strings({ids.begin(), ids.end()});
}

std::vector<LeaderboardEntry> make_leaderboard(
    const Ranking& ranking, const ScoreVector& scores,
    const ModelRegistry& registry, const std::set<ModelId>& eliminated) {
  if (registry.size() == 0 || ranking.order.empty()) {
    throw SchemaError("cannot write a leaderboard for an empty registry");
  }
  if (ranking.order.size() != registry.size() ||
      scores.size() != registry.size()) {
    throw SchemaError("ranking, scores and registry sizes disagree");
  }
  std::vector<LeaderboardEntry> entries;
  entries.reserve(ranking.order.size());
  for (std::size_t pos = 0; pos < ranking.order.size(); ++pos) {
    const ModelId& id = ranking.order[pos];
    entries.push_back({pos + 1, id, scores[registry.index_of(id)],
                       eliminated.count(id) > 0});
  }
  return entries;
}

void write_leaderboard(const Ranking& ranking, const ScoreVector& scores,
                       const ModelRegistry& registry,
                       const std::set<ModelId>& eliminated, std::ostream& text,
                       std::ostream& json_out) {
  auto entries = make_leaderboard(ranking, scores, registry, eliminated);
  json rows = json::array();
  for (const auto& e : entries) {
    text << '#' << e.rank << "  " << e.model.str()
         << " | Grade: " << format_double(e.grade);
    if (e.eliminated) text << " | Eliminated";
    text << '\n';
    json row;
    row["rank"] = e.rank;
    row["model"] = e.model.str();
    row["grade"] = e.grade;
    row["eliminated"] = e.eliminated;
    rows.push_back(std::move(row));
  }
  json doc;
  doc["leaderboard"] = std::move(rows);
  json_out << doc.dump(2) << '\n';
  if (!text || !json_out) throw IoError("write failure");
}

std::vector<LeaderboardEntry> read_leaderboard_json(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(1, e.what());
  }
  std::vector<LeaderboardEntry> entries;
  try {
    for (const auto& row : doc.at("leaderboard")) {
      entries.push_back({row.at("rank").get<std::size_t>(),
                         ModelId(row.at("model").get<std::string>()),
                         row.at("grade").get<double>(),
                         row.at("eliminated").get<bool>()});
    }
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed leaderboard: ") + e.what());
  }
  return entries;
}

std::vector<LeaderboardEntry> read_leaderboard_text(std::istream& in) {
  std::vector<LeaderboardEntry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    LeaderboardEntry e;
    std::istringstream ss(line);
    char hash = 0;
    std::string id, bar, grade_label;
    std::string grade;
    if (!(ss >> hash >> e.rank >> id >> bar >> grade_label >> grade) ||
        hash != '#' || bar != "|" || grade_label != "Grade:") {
      throw ParseError(line_no, "malformed leaderboard row");
    }
    e.model = ModelId(id);
    auto res = std::from_chars(grade.data(), grade.data() + grade.size(),
                               e.grade);
    if (res.ec != std::errc()) throw ParseError(line_no, "bad grade");
    std::string rest;
    std::getline(ss, rest);
    e.eliminated = rest.find("Eliminated") != std::string::npos;
    entries.push_back(std::move(e));
  }
  return entries;
}

Ranking read_ranking(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(1, e.what());
  }
  Ranking ranking;
  try {
    if (doc.is_object() && doc.contains("leaderboard")) {
      std::vector<std::pair<std::size_t, std::string>> rows;
      for (const auto& row : doc.at("leaderboard")) {
        rows.emplace_back(row.at("rank").get<std::size_t>(),
                          row.at("model").get<std::string>());
      }
      std::sort(rows.begin(), rows.end());
      for (auto& [rank, id] : rows) ranking.order.emplace_back(std::move(id));
    } else {
      const json& list = doc.is_array() ? doc : doc.at("ranking");
      for (const auto& id : list) {
        ranking.order.emplace_back(id.get<std::string>());
      }
    }
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed ranking: ") + e.what());
  }
  std::set<ModelId> unique(ranking.order.begin(), ranking.order.end());
  if (unique.size() != ranking.order.size()) {
    throw SchemaError("ranking lists a model twice");
  }
  return ranking;
}

void write_ranking(const Ranking& ranking, std::ostream& out) {
  json ids = json::array();
  for (const auto& id : ranking.order) ids.push_back(id.str());
  json doc;
  doc["ranking"] = std::move(ids);
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("write failure");
}

void write_weights(const WeightVector& weights, const ActiveMask& active,
                   const ModelRegistry& registry, std::ostream& out) {
  if (weights.size() != registry.size() || active.size() != registry.size()) {
    throw SchemaError("weights and registry sizes disagree");
  }
  json w = json::object();
  for (ModelIndex i = 0; i < registry.size(); ++i) {
    if (active[i]) w[registry.at(i).str()] = weights[i];
  }
  json doc;
  doc["weights"] = std::move(w);
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("write failure");
}

LoadedWeights read_weights(std::istream& in, const ModelRegistry& registry) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(1, e.what());
  }
  LoadedWeights out{
      WeightVector(registry.size(), std::numeric_limits<double>::quiet_NaN()),
      ActiveMask(registry.size(), 0)};
  const json& w = doc.is_object() && doc.contains("weights") ? doc["weights"]
                                                             : doc;
  if (!w.is_object()) throw SchemaError("weights must be an object");
  for (auto it = w.begin(); it != w.end(); ++it) {
    ModelIndex i = registry.index_of(it.key());
    if (!it.value().is_number()) {
      throw SchemaError("weight for '" + it.key() + "' is not a number");
    }
    out.weights[i] = it.value().get<double>();
    out.present[i] = 1;
  }
  return out;
}

}  // namespace peerrank
