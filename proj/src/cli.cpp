#include "peerrank/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "peerrank/analysis.hpp"
#include "peerrank/config.hpp"
#include "peerrank/data_io.hpp"
#include "peerrank/errors.hpp"
#include "peerrank/metrics.hpp"
#include "peerrank/random.hpp"

namespace peerrank {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

struct Options {
  std::string config_path;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool allow_self_review = false;
  std::string mechanism;
  std::string mode;
  std::string reviews;
  std::string questions;
  std::string answers;
  std::string weights;
  std::string baseline;
  std::string learned;
  std::string reference;
  std::vector<int> ks;
  double persistence = 0.8;
  std::vector<std::string> subset;
  std::optional<std::size_t> sim_m;
  std::optional<std::size_t> sim_n;
};

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return in;
}

class OutDir {
 public:
  explicit OutDir(const std::string& dir) : dir_(dir) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create '" + dir + "': " + ec.message());
  }

  std::ofstream open(const std::string& name) const {
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out) throw IoError("cannot write '" + (dir_ / name).string() + "'");
    return out;
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

 private:
  fs::path dir_;
};

ReviewDataset load_dataset(const std::string& path, const EngineConfig& cfg,
                           bool allow_self_review) {
  auto in = open_in(path);
  const auto rows = read_review_rows_unchecked(in);
  const ModelRegistry registry = cfg.models.empty()
                                     ? infer_registry(rows)
                                     : ModelRegistry::from_strings(cfg.models);
  return to_dataset(rows, registry, {allow_self_review});
}

WeightVector load_weights(const std::string& path, const ModelRegistry& registry,
                          ActiveMask* present) {
  auto in = open_in(path);
  LoadedWeights w = read_weights(in, registry);
  if (present) *present = w.present;
  return w.weights;
}

void write_leaderboards(const OutDir& dir, const Ranking& ranking,
                        const ScoreVector& scores, const ModelRegistry& registry,
                        const std::set<ModelId>& eliminated) {
  auto text = dir.open("leaderboard.txt");
  auto js = dir.open("leaderboard.json");
  write_leaderboard(ranking, scores, registry, eliminated, text, js);
}

void write_trace(const OutDir& dir, const OptTrace& trace) {
  auto out = dir.open("trace.csv");
  out << "iteration,objective,loss\n";
  for (std::size_t i = 0; i < trace.objective.size(); ++i) {
    out << i << ',' << format_double(trace.objective[i]) << ','
        << format_double(trace.loss[i]) << '\n';
  }
}

std::string review_path(const Options& o, const EngineConfig& cfg) {
  return o.reviews.empty() ? (fs::path(cfg.out) / "reviews.jsonl").string()
                           : o.reviews;
}

int cmd_simulate(const Options& o, EngineConfig& cfg, const OutDir& dir,
                 std::ostream& out) {
  if (o.sim_m) cfg.simulation.m = *o.sim_m;
  if (o.sim_n) cfg.simulation.n = *o.sim_n;
  if (o.allow_self_review) cfg.simulation.allow_self_review = true;
  SimulationResult sim = simulate_dataset(cfg.simulation);
  {
    auto f = dir.open("reviews.jsonl");
    write_review_rows(to_rows(sim.dataset), f);
  }
  {
    auto f = dir.open("ground_truth.json");
    write_ranking(sim.ground_truth, f);
  }
  out << "simulated " << sim.dataset.records.size() << " records over "
      << sim.dataset.registry.size() << " models\n";
  return 0;
}

int cmd_review(const Options& o, EngineConfig& cfg, const OutDir& dir,
               std::ostream& out, std::ostream& err) {
  if (o.questions.empty() || o.answers.empty()) {
    throw ArgumentError("review needs --questions and --answers");
  }
  auto qin = open_in(o.questions);
  const QuestionSet questions = read_question_set(qin);
  auto ain = open_in(o.answers);
  const std::vector<Answer> answers = read_answer_set(ain);

  ModelRegistry registry;
  if (cfg.models.empty()) {
    std::set<ModelId> ids;
    for (const auto& a : answers) ids.insert(a.model);
    registry = ModelRegistry(std::vector<ModelId>(ids.begin(), ids.end()));
  } else {
    registry = ModelRegistry::from_strings(cfg.models);
  }
  const bool self = o.allow_self_review || cfg.review.allow_self_review;

  std::map<ModelIndex, std::shared_ptr<ChatClient>> clients;
  for (ModelIndex i = 0; i < registry.size(); ++i) {
    clients[i] = std::make_shared<HttpChatClient>(
        cfg.endpoint_for(registry.at(i).str()));
  }
  RemotePairJudge judge(questions, answers, registry, std::move(clients),
                        cfg.review.prompt_kind);
  const auto pairs = build_pairs(answers, registry, cfg.pairing, cfg.seed);
  CollectOptions options{cfg.review.reviewers_per_pair, cfg.seed,
                         cfg.review.max_in_flight, self};
  CollectResult result = collect_reviews(pairs, judge, registry, options);
  {
    auto f = dir.open("reviews.jsonl");
    write_review_rows(to_rows(result.dataset), f);
  }
  if (!result.failures.empty()) {
    auto f = dir.open("review_failures.txt");
    for (const auto& m : result.failures.messages) f << m << '\n';
  }
  out << "collected " << result.dataset.records.size() << " records from "
      << pairs.size() << " pairs\n";
  if (result.dataset.records.empty() && result.failures.transport_failures > 0) {
    err << "error: every judgment failed to reach its endpoint\n";
    return 1;
  }
  return 0;
}

int cmd_optimize(const Options& o, EngineConfig& cfg, const OutDir& dir,
                 std::ostream& out) {
  const ReviewDataset dataset =
      load_dataset(review_path(o, cfg), cfg, o.allow_self_review);
  const OptResult r = optimize_weights(dataset, cfg.optimization);
  {
    auto f = dir.open("weights.json");
    write_weights(r.weights, r.active, dataset.registry, f);
  }
  write_trace(dir, r.trace);
  const Ranking ranking = ranking_from_scores(r.scores, dataset.registry);
  write_leaderboards(dir, ranking, r.scores, dataset.registry, {});
  out << "final objective " << format_double(r.final_objective()) << " after "
      << r.trace.objective.size() - 1 << " iterations\n";
  return 0;
}

int cmd_eliminate(const Options& o, EngineConfig& cfg, const OutDir& dir,
                  std::ostream& out) {
  const ReviewDataset dataset =
      load_dataset(review_path(o, cfg), cfg, o.allow_self_review);
  const EliminationResult r = run_elimination(dataset, cfg.elimination);
  {
    auto f = dir.open("elimination.csv");
    write_elimination_csv(r.state, dataset.registry, f);
  }
  const RoundResult& last = r.state.per_round.back();
  {
    auto f = dir.open("weights.json");
    write_weights(last.weights, r.state.active, dataset.registry, f);
  }
  std::set<ModelId> eliminated;
  for (ModelIndex i : r.state.eliminated) eliminated.insert(dataset.registry.at(i));
  write_leaderboards(dir, r.ranking, last.scores, dataset.registry, eliminated);
  out << "eliminated " << r.state.eliminated.size() << " reviewers; loss "
      << format_double(last.final_loss) << '\n';
  return 0;
}

int cmd_rank(const Options& o, EngineConfig& cfg, const OutDir& dir,
             std::ostream& out) {
  const ReviewDataset dataset =
      load_dataset(review_path(o, cfg), cfg, o.allow_self_review);
  const std::size_t m = dataset.registry.size();
  ScoreVector scores;
  if (o.baseline == "majority") {
    scores = majority_voting(dataset);
  } else if (o.baseline == "rating") {
    scores = rating_voting(dataset);
  } else if (!o.baseline.empty()) {
    throw ArgumentError("--baseline must be majority or rating");
  } else {
    WeightVector w(m, 1.0);
    ActiveMask active = all_active(m);
    if (!o.weights.empty()) w = load_weights(o.weights, dataset.registry, &active);
    for (std::size_t i = 0; i < m; ++i) {
      if (!active[i]) w[i] = 0.0;
    }
    scores = Scorer(dataset, cfg.scoring).scores(w, active);
  }
  const Ranking ranking = ranking_from_scores(scores, dataset.registry);
  write_leaderboards(dir, ranking, scores, dataset.registry, {});
  out << "ranked " << m << " models\n";
  return 0;
}

int cmd_metrics(const Options& o, EngineConfig&, const OutDir& dir,
                std::ostream& out) {
  if (o.learned.empty() || o.reference.empty()) {
    throw ArgumentError("metrics needs --learned and --reference");
  }
  auto lin = open_in(o.learned);
  const Ranking learned = read_ranking(lin);
  auto rin = open_in(o.reference);
  const Ranking reference = read_ranking(rin);
  const std::vector<int> ks = o.ks.empty() ? std::vector<int>{8, 9, 10} : o.ks;
  for (int k : ks) {
    if (k < 1) throw ArgumentError("--k values must be >= 1");
  }
  const AlignmentReport r = alignment_report(learned, reference, ks, o.persistence);
  json j;
  j["spearman"] = r.spearman;
  j["kendall"] = r.kendall;
  j["pen"] = r.pen;
  j["cin"] = r.cin;
  j["lis"] = r.lis;
  json p = json::object(), b = json::object();
  for (const auto& [k, v] : r.precision_at) p[std::to_string(k)] = v;
  for (const auto& [k, v] : r.rbp_at) b[std::to_string(k)] = v;
  j["precision_at"] = p;
  j["rbp_at"] = b;
  const std::string text = j.dump(2) + "\n";
  dir.open("metrics.json") << text;
  out << text;
  return 0;
}

int cmd_pg(const Options& o, EngineConfig& cfg, const OutDir& dir,
           std::ostream& out) {
  const ReviewDataset dataset = load_dataset(review_path(o, cfg), cfg, true);
  std::vector<ModelIndex> subset;
  for (const auto& id : o.subset) subset.push_back(dataset.registry.index_of(id));
  WeightVector w;
  if (!o.weights.empty()) {
    w = load_weights(o.weights, dataset.registry, nullptr);
  } else {
    const OptResult r = optimize_weights(dataset, cfg.optimization);
    w = r.weights;
    auto f = dir.open("weights.json");
    write_weights(r.weights, r.active, dataset.registry, f);
  }
  const PreferenceGapMatrix plain = preference_gap_matrix(dataset, subset);
  const PreferenceGapMatrix weighted = reweighted_pg_matrix(dataset, w, subset);
  {
    auto f = dir.open("pg_matrix.csv");
    write_pg_csv(plain, dataset.registry, f);
  }
  {
    auto f = dir.open("pg_reweighted.csv");
    write_pg_csv(weighted, dataset.registry, f);
  }
  if (!plain.missing.empty()) {
    auto f = dir.open("pg_coverage.txt");
    for (auto [i, j] : plain.missing) {
      f << dataset.registry.at(i).str() << ',' << dataset.registry.at(j).str()
        << '\n';
    }
  }
  out << "pg over " << plain.size() << " models, " << plain.missing.size()
      << " pairs without self-judgments\n";
  return 0;
}

void write_manifest(const OutDir& dir, const std::string& subcommand,
                    const EngineConfig& cfg, const Options& o) {
  const std::string canonical = dump_engine_config(cfg);
  char hash[17];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical)));
  json inputs = json::object();
  auto add = [&](const char* key, const std::string& v) {
    if (!v.empty()) inputs[key] = v;
  };
  add("config", o.config_path);
  add("reviews", o.reviews);
  add("questions", o.questions);
  add("answers", o.answers);
  add("weights", o.weights);
  add("learned", o.learned);
  add("reference", o.reference);
  json j;
  j["subcommand"] = subcommand;
  j["seed"] = cfg.seed;
  j["config_hash"] = hash;
  j["version"] = PEERRANK_VERSION;
  j["inputs"] = inputs;
  dir.open("run_manifest.json") << j.dump(2) << '\n';
}

int dispatch(CLI::App& app, Options& o, std::ostream& out, std::ostream& err) {
  EngineConfig cfg;
  if (!o.config_path.empty()) cfg = load_engine_config(o.config_path);
  if (!o.out.empty()) cfg.out = o.out;
  if (o.allow_self_review) cfg.review.allow_self_review = true;
  if (!o.mechanism.empty()) {
    ScoringMechanism m;
    if (o.mechanism == "plain") {
      m = std::holds_alternative<PlainMechanism>(cfg.scoring) ? cfg.scoring
                                                              : PlainMechanism{};
    } else if (o.mechanism == "elo") {
      m = std::holds_alternative<EloMechanism>(cfg.scoring) ? cfg.scoring
                                                            : EloMechanism{};
    } else if (o.mechanism == "rank") {
      m = std::holds_alternative<RankMechanism>(cfg.scoring) ? cfg.scoring
                                                             : RankMechanism{};
    } else {
      throw ArgumentError("--mechanism must be plain, elo or rank");
    }
    cfg.scoring = m;
  }
  if (o.mode == "fixed") {
    cfg.elimination.mode = EliminationMode::kFixed;
  } else if (o.mode == "auto") {
    cfg.elimination.mode = EliminationMode::kAuto;
  } else if (!o.mode.empty()) {
    throw ArgumentError("--mode must be fixed or auto");
  }
  cfg.apply_seed(o.seed ? *o.seed : cfg.seed);
  cfg.validate();

  const std::string name = app.get_subcommands().front()->get_name();
  OutDir dir(cfg.out);
  int code = 0;
  if (name == "simulate") {
    code = cmd_simulate(o, cfg, dir, out);
  } else if (name == "review") {
    code = cmd_review(o, cfg, dir, out, err);
  } else if (name == "optimize") {
    code = cmd_optimize(o, cfg, dir, out);
  } else if (name == "eliminate") {
    code = cmd_eliminate(o, cfg, dir, out);
  } else if (name == "rank") {
    code = cmd_rank(o, cfg, dir, out);
  } else if (name == "metrics") {
    code = cmd_metrics(o, cfg, dir, out);
  } else if (name == "pg") {
    code = cmd_pg(o, cfg, dir, out);
  }
  write_manifest(dir, name, cfg, o);
  return code;
}

int run_app(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Peer-review ranking of language models", "peerrank"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--config", o.config_path, "Engine config (JSON)");
  app.add_option("--out", o.out, "Output directory");
  app.add_option("--seed", o.seed, "Global seed");
  app.set_version_flag("--version", PEERRANK_VERSION);

  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic review dataset");
  simulate->add_option("--models", o.sim_m, "Number of synthetic models");
  simulate->add_option("--questions", o.sim_n, "Number of synthetic questions");
  simulate->add_flag("--allow-self-review", o.allow_self_review);

  auto* review = app.add_subcommand("review", "Collect judgments from model endpoints");
  review->add_option("--questions", o.questions)->required();
  review->add_option("--answers", o.answers)->required();
  review->add_flag("--allow-self-review", o.allow_self_review);

  auto* optimize = app.add_subcommand("optimize", "Learn reviewer confidence weights");
  optimize->add_option("--reviews", o.reviews);
  optimize->add_option("--mechanism", o.mechanism, "plain, elo or rank");
  optimize->add_flag("--allow-self-review", o.allow_self_review);

  auto* eliminate = app.add_subcommand("eliminate", "Iteratively drop weak reviewers");
  eliminate->add_option("--reviews", o.reviews);
  eliminate->add_option("--mechanism", o.mechanism, "plain, elo or rank");
  eliminate->add_option("--mode", o.mode, "fixed or auto");
  eliminate->add_flag("--allow-self-review", o.allow_self_review);

  auto* rank = app.add_subcommand("rank", "Score models with given weights or a baseline");
  rank->add_option("--reviews", o.reviews);
  rank->add_option("--weights", o.weights);
  rank->add_option("--mechanism", o.mechanism, "plain, elo or rank");
  rank->add_option("--baseline", o.baseline, "majority or rating");
  rank->add_flag("--allow-self-review", o.allow_self_review);

  auto* metrics = app.add_subcommand("metrics", "Compare a learned ranking to a reference");
  metrics->add_option("--learned", o.learned)->required();
  metrics->add_option("--reference", o.reference)->required();
  metrics->add_option("--k", o.ks, "Cutoffs for precision and RBP")->delimiter(',');
  metrics->add_option("--persistence", o.persistence, "RBP persistence");

  auto* pg = app.add_subcommand("pg", "Preference-gap matrices");
  pg->add_option("--reviews", o.reviews);
  pg->add_option("--weights", o.weights);
  pg->add_option("--subset", o.subset, "Comma-separated model ids")->delimiter(',');

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << PEERRANK_VERSION << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    std::string what = e.what();
    for (std::size_t i = 0; i < args.size(); ++i) {
      const bool value = i > 0 && (args[i - 1] == "--config" ||
                                   args[i - 1] == "--out" || args[i - 1] == "--seed");
      if (args[i].starts_with("-") || value) continue;
      bool known = false;
      for (const auto* sub : app.get_subcommands({})) known |= sub->get_name() == args[i];
      if (!known) what = "unknown subcommand '" + args[i] + "'";
      break;
    }
    err << "error: " << what << "\n\n" << app.help();
    return 2;
  }

  try {
    return dispatch(app, o, out, err);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const TransportError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  return run_app(args, out, err);
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_app(args, std::cout, std::cerr);
}

}  // namespace peerrank
