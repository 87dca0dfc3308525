#include "peerrank/review.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iostream>
#include <mutex>
#include <thread>

#include "peerrank/errors.hpp"
#include "peerrank/random.hpp"

namespace peerrank {
namespace {

enum Stream : std::uint64_t { kPairs = 11, kReviewers = 12, kVerdicts = 13 };

}  // namespace

PairingStrategy PairingStrategy::all_pairs(double data_fraction) {
  PairingStrategy s;
  s.data_fraction = data_fraction;
  return s;
}

PairingStrategy PairingStrategy::sampled(std::size_t pairs_per_question,
                                         double data_fraction) {
  PairingStrategy s;
  s.kind = Kind::kSampled;
  s.pairs_per_question = pairs_per_question;
  s.data_fraction = data_fraction;
  return s;
}

void PairingStrategy::validate() const {
  if (kind == Kind::kSampled && pairs_per_question < 1) {
    throw ArgumentError("pairs_per_question must be >= 1");
  }
  if (!(data_fraction > 0 && data_fraction <= 1)) {
    throw ArgumentError("data_fraction must be in (0, 1]");
  }
}

std::vector<BattlePair> build_pairs(const std::vector<Answer>& answers,
                                    const ModelRegistry& registry,
                                    const PairingStrategy& strategy,
                                    std::uint64_t seed) {
  strategy.validate();
  std::map<int, std::vector<ModelId>> by_question;
  for (const auto& a : answers) {
    registry.index_of(a.model);
    by_question[a.question_id].push_back(a.model);
  }

  std::vector<BattlePair> out;
  for (auto& [qid, models] : by_question) {
    std::sort(models.begin(), models.end());
    models.erase(std::unique(models.begin(), models.end()), models.end());
    if (models.size() < 2) {
      std::cerr << "warning: question " << qid
                << " has fewer than 2 answers, skipped\n";
      continue;
    }
    std::vector<std::pair<std::size_t, std::size_t>> candidates;
    for (std::size_t i = 0; i < models.size(); ++i) {
      for (std::size_t j = i + 1; j < models.size(); ++j) {
        candidates.emplace_back(i, j);
      }
    }
    Rng rng(derive_seed(seed, {kPairs, static_cast<std::uint64_t>(qid)}));
    std::size_t count = candidates.size();
    if (strategy.kind == PairingStrategy::Kind::kSampled) {
      count = std::min(count, strategy.pairs_per_question);
    }
    std::size_t keep = count;
    if (strategy.data_fraction < 1.0) {
      keep = static_cast<std::size_t>(
          std::floor(strategy.data_fraction * static_cast<double>(count) + 1e-9));
      keep = std::max<std::size_t>(keep, 1);
    }
    if (keep < candidates.size()) {
      std::shuffle(candidates.begin(), candidates.end(), rng);
      candidates.resize(keep);
      std::sort(candidates.begin(), candidates.end());
    }
    for (auto [i, j] : candidates) {
      BattlePair p{qid, registry.index_of(models[i]), registry.index_of(models[j])};
      if (std::bernoulli_distribution(0.5)(rng)) std::swap(p.model_a, p.model_b);
      out.push_back(p);
    }
  }
  return out;
}

std::vector<ModelIndex> assign_reviewers(const BattlePair& pair,
                                         const ModelRegistry& registry,
                                         std::size_t r, std::uint64_t seed,
                                         bool allow_self_review) {
  std::vector<ModelIndex> candidates;
  for (ModelIndex s = 0; s < registry.size(); ++s) {
    if (allow_self_review || (s != pair.model_a && s != pair.model_b)) {
      candidates.push_back(s);
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [&](ModelIndex a, ModelIndex b) { return registry.at(a) < registry.at(b); });
  if (r > candidates.size()) {
    std::cerr << "warning: reviewers_per_pair " << r << " clamped to "
              << candidates.size() << '\n';
    r = candidates.size();
  }
  std::string lo = registry.at(pair.model_a).str();
  std::string hi = registry.at(pair.model_b).str();
  if (hi < lo) std::swap(lo, hi);
  Rng rng(derive_seed(seed, {kReviewers, static_cast<std::uint64_t>(pair.question_id),
                             fnv1a64(lo), fnv1a64(hi)}));
  for (std::size_t i = 0; i < r; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, candidates.size() - 1);
    std::swap(candidates[i], candidates[pick(rng)]);
  }
  candidates.resize(r);
  std::sort(candidates.begin(), candidates.end());
  return candidates;
}

RemotePairJudge::RemotePairJudge(
    const QuestionSet& questions, const std::vector<Answer>& answers,
    const ModelRegistry& registry,
    std::map<ModelIndex, std::shared_ptr<ChatClient>> clients,
    std::optional<PromptKind> kind)
    : clients_(std::move(clients)), kind_(kind) {
  for (const auto& q : questions) questions_.emplace(q.question_id, q);
  for (const auto& a : answers) {
    answers_[{a.question_id, registry.index_of(a.model)}] = a.turns;
  }
}

Outcome RemotePairJudge::judge(const BattlePair& pair, ModelIndex reviewer) {
  auto q = questions_.find(pair.question_id);
  if (q == questions_.end()) {
    throw SchemaError("unknown question " + std::to_string(pair.question_id));
  }
  auto a = answers_.find({pair.question_id, pair.model_a});
  auto b = answers_.find({pair.question_id, pair.model_b});
  if (a == answers_.end() || b == answers_.end()) {
    throw SchemaError("missing answer for question " +
                      std::to_string(pair.question_id));
  }
  auto client = clients_.find(reviewer);
  if (client == clients_.end() || !client->second) {
    throw ArgumentError("no endpoint configured for reviewer #" +
                        std::to_string(reviewer));
  }
  const PromptKind kind = kind_ ? *kind_ : choose_prompt_kind(q->second);
  return judge_pair(*client->second, q->second, a->second, b->second, kind);
}

SyntheticPairJudge::SyntheticPairJudge(const SimulationResult& simulation,
                                       SimConfig cfg)
    : judge_ability_(simulation.judge_ability),
      qualities_(simulation.qualities),
      cfg_(std::move(cfg)) {}

Outcome SyntheticPairJudge::judge(const BattlePair& pair, ModelIndex reviewer) {
  if (pair.question_id < 1 ||
      static_cast<std::size_t>(pair.question_id) > qualities_.n) {
    throw SchemaError("question " + std::to_string(pair.question_id) +
                      " outside the simulated set");
  }
  const std::size_t row = static_cast<std::size_t>(pair.question_id - 1);
  Rng rng(derive_seed(cfg_.seed, {kVerdicts, row, pair.model_a, pair.model_b,
                                  reviewer}));
  return synthetic_verdict(judge_ability_.at(reviewer),
                           qualities_.at(row, pair.model_a),
                           qualities_.at(row, pair.model_b), cfg_, rng);
}

CollectResult collect_reviews(const std::vector<BattlePair>& pairs,
                              PairJudge& judge, const ModelRegistry& registry,
                              const CollectOptions& options) {
  if (options.max_in_flight < 1) throw ArgumentError("max_in_flight must be >= 1");
  if (options.reviewers_per_pair < 1) {
    throw ArgumentError("reviewers_per_pair must be >= 1");
  }

  std::vector<ReviewRecord> tasks;
  for (const auto& pair : pairs) {
    for (ModelIndex s : assign_reviewers(pair, registry, options.reviewers_per_pair,
                                         options.seed, options.allow_self_review)) {
      tasks.push_back({pair.question_id, pair.model_a, pair.model_b,
                       Outcome::kTie, s});
    }
  }

  enum class Status : char { kOk, kInvalid, kTransport };
  std::vector<Status> status(tasks.size(), Status::kOk);
  std::vector<std::string> errors(tasks.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr fatal;
  std::mutex fatal_mutex;

  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      ReviewRecord& t = tasks[i];
      try {
        t.outcome = judge.judge({t.question_id, t.model_a, t.model_b}, t.reviewer);
      } catch (const InvalidVerdictError& e) {
        status[i] = Status::kInvalid;
        errors[i] = e.what();
      } catch (const TransportError& e) {
        status[i] = Status::kTransport;
        errors[i] = e.what();
      } catch (...) {
        std::lock_guard lock(fatal_mutex);
        if (!fatal) fatal = std::current_exception();
        next = tasks.size();
      }
    }
  };
  const std::size_t workers = std::min(options.max_in_flight, tasks.size());
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (fatal) std::rethrow_exception(fatal);

  CollectResult result;
  result.dataset.registry = registry;
  result.dataset.self_review_allowed = options.allow_self_review;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const ReviewRecord& t = tasks[i];
    if (status[i] == Status::kOk) {
      result.dataset.records.push_back(t);
      continue;
    }
    (status[i] == Status::kInvalid ? result.failures.invalid_verdicts
                                   : result.failures.transport_failures)++;
    result.failures.messages.push_back(
        "question " + std::to_string(t.question_id) + " " +
        registry.at(t.model_a).str() + " vs " + registry.at(t.model_b).str() +
        " by " + registry.at(t.reviewer).str() + ": " + errors[i]);
  }
  std::sort(result.dataset.records.begin(), result.dataset.records.end(),
            canonical_less);
  if (!result.failures.empty()) {
    std::cerr << "review: " << result.failures.invalid_verdicts
              << " invalid verdicts, " << result.failures.transport_failures
              << " transport failures\n";
  }
  return result;
}

}  // namespace peerrank
