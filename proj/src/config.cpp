#include "peerrank/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "peerrank/errors.hpp"

namespace peerrank {
namespace {

using json = nlohmann::ordered_json;

void check_keys(const json& j, const std::string& section,
                std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw SchemaError(section + " must be an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!ok.count(key)) throw SchemaError("unknown key '" + key + "' in " + section);
  }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& section) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->template get<T>();
  } catch (const json::exception&) {
    throw SchemaError(section + "." + key + " has the wrong type");
  }
}

void read_seconds_ms(const json& j, const char* key,
                     std::chrono::milliseconds& out, const std::string& section) {
  double ms = static_cast<double>(out.count());
  read(j, key, ms, section);
  out = std::chrono::milliseconds(static_cast<long long>(ms));
}

void parse_endpoint(const json& j, JudgeEndpointConfig& e,
                    const std::string& section) {
  check_keys(j, section,
             {"base_url", "model_name", "api_key_env", "timeout_seconds",
              "max_retries", "temperature", "initial_backoff_ms",
              "backoff_factor", "max_in_flight"});
  read(j, "base_url", e.base_url, section);
  read(j, "model_name", e.model_name, section);
  read(j, "api_key_env", e.api_key_env, section);
  read(j, "timeout_seconds", e.timeout_seconds, section);
  read(j, "max_retries", e.max_retries, section);
  read(j, "temperature", e.temperature, section);
  read_seconds_ms(j, "initial_backoff_ms", e.initial_backoff, section);
  read(j, "backoff_factor", e.backoff_factor, section);
  read(j, "max_in_flight", e.max_in_flight, section);
}

json endpoint_json(const JudgeEndpointConfig& e) {
  return {{"base_url", e.base_url},
          {"model_name", e.model_name},
          {"api_key_env", e.api_key_env},
          {"timeout_seconds", e.timeout_seconds},
          {"max_retries", e.max_retries},
          {"temperature", e.temperature},
          {"initial_backoff_ms", e.initial_backoff.count()},
          {"backoff_factor", e.backoff_factor},
          {"max_in_flight", e.max_in_flight}};
}

void parse_simulation(const json& j, SimConfig& s) {
  const std::string sec = "simulation";
  check_keys(j, sec,
             {"m", "n", "reviewers_per_pair", "quality_noise", "tie_margin",
              "judge_sharpness", "spacing", "pairs_per_question", "judge_floor",
              "noise_judge_fraction", "judge_ability_override",
              "allow_self_review", "self_favoring", "self_bias"});
  read(j, "m", s.m, sec);
  read(j, "n", s.n, sec);
  read(j, "reviewers_per_pair", s.reviewers_per_pair, sec);
  read(j, "quality_noise", s.quality_noise, sec);
  read(j, "tie_margin", s.tie_margin, sec);
  read(j, "judge_sharpness", s.judge_sharpness, sec);
  std::string spacing = s.spacing == AbilitySpacing::kEven ? "even" : "uniform";
  read(j, "spacing", spacing, sec);
  if (spacing == "even") {
    s.spacing = AbilitySpacing::kEven;
  } else if (spacing == "uniform") {
    s.spacing = AbilitySpacing::kUniform;
  } else {
    throw SchemaError("simulation.spacing must be 'even' or 'uniform'");
  }
  read(j, "pairs_per_question", s.pairs_per_question, sec);
  read(j, "judge_floor", s.judge_floor, sec);
  read(j, "noise_judge_fraction", s.noise_judge_fraction, sec);
  read(j, "judge_ability_override", s.judge_ability_override, sec);
  read(j, "allow_self_review", s.allow_self_review, sec);
  read(j, "self_favoring", s.self_favoring, sec);
  read(j, "self_bias", s.self_bias, sec);
}

void parse_scoring(const json& j, ScoringMechanism& out) {
  const std::string sec = "scoring";
  check_keys(j, sec, {"mechanism", "tie_credit", "elo", "rank"});
  std::string name = "plain";
  read(j, "mechanism", name, sec);
  PlainMechanism plain;
  read(j, "tie_credit", plain.tie_credit, sec);
  EloMechanism elo;
  if (auto it = j.find("elo"); it != j.end()) {
    check_keys(*it, "scoring.elo",
               {"base", "scale", "initial", "k_factor", "passes"});
    read(*it, "base", elo.base, "scoring.elo");
    read(*it, "scale", elo.scale, "scoring.elo");
    read(*it, "initial", elo.initial, "scoring.elo");
    read(*it, "k_factor", elo.k_factor, "scoring.elo");
    read(*it, "passes", elo.passes, "scoring.elo");
  }
  RankMechanism rank;
  if (auto it = j.find("rank"); it != j.end()) {
    check_keys(*it, "scoring.rank", {"k", "passes"});
    read(*it, "k", rank.k, "scoring.rank");
    read(*it, "passes", rank.passes, "scoring.rank");
  }
  if (name == "plain") {
    out = plain;
  } else if (name == "elo") {
    out = elo;
  } else if (name == "rank") {
    out = rank;
  } else {
    throw SchemaError("scoring.mechanism must be plain, elo or rank");
  }
}

json scoring_json(const ScoringMechanism& m) {
  json j;
  j["mechanism"] = mechanism_name(m);
  if (auto* p = std::get_if<PlainMechanism>(&m)) j["tie_credit"] = p->tie_credit;
  if (auto* e = std::get_if<EloMechanism>(&m)) {
    j["elo"] = {{"base", e->base},         {"scale", e->scale},
                {"initial", e->initial},   {"k_factor", e->k_factor},
                {"passes", e->passes}};
  }
  if (auto* r = std::get_if<RankMechanism>(&m)) {
    j["rank"] = {{"k", r->k}, {"passes", r->passes}};
  }
  return j;
}

}  // namespace

void EngineConfig::apply_seed(std::uint64_t new_seed) {
  seed = new_seed;
  simulation.seed = new_seed;
  optimization.seed = new_seed;
  elimination.opt.seed = new_seed;
  if (auto* e = std::get_if<EloMechanism>(&scoring)) e->shuffle_seed = new_seed;
  optimization.mechanism = scoring;
  elimination.opt.mechanism = scoring;
}

void EngineConfig::validate() const {
  simulation.validate();
  pairing.validate();
  peerrank::validate(scoring);
  optimization.validate();
  elimination.validate();
  if (review.reviewers_per_pair < 1) {
    throw ArgumentError("review.reviewers_per_pair must be >= 1");
  }
  if (review.max_in_flight < 1) throw ArgumentError("review.max_in_flight must be >= 1");
  if (!models.empty()) ModelRegistry::from_strings(models);
}

JudgeEndpointConfig EngineConfig::endpoint_for(const std::string& model) const {
  auto it = judges.find(model);
  JudgeEndpointConfig e = it == judges.end() ? default_judge : it->second;
  if (e.model_name.empty()) e.model_name = model;
  return e;
}

EngineConfig parse_engine_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(0, std::string("config: ") + e.what());
  }
  check_keys(root, "config",
             {"seed", "out", "models", "simulation", "pairing", "review",
              "judges", "scoring", "optimization", "elimination"});
  EngineConfig cfg;
  read(root, "seed", cfg.seed, "config");
  read(root, "out", cfg.out, "config");
  read(root, "models", cfg.models, "config");
  if (auto it = root.find("simulation"); it != root.end()) {
    parse_simulation(*it, cfg.simulation);
  }
  if (auto it = root.find("pairing"); it != root.end()) {
    check_keys(*it, "pairing", {"strategy", "pairs_per_question", "data_fraction"});
    std::string strategy = "all_pairs";
    read(*it, "strategy", strategy, "pairing");
    if (strategy == "all_pairs") {
      cfg.pairing.kind = PairingStrategy::Kind::kAllPairs;
    } else if (strategy == "sampled") {
      cfg.pairing.kind = PairingStrategy::Kind::kSampled;
    } else {
      throw SchemaError("pairing.strategy must be all_pairs or sampled");
    }
    read(*it, "pairs_per_question", cfg.pairing.pairs_per_question, "pairing");
    read(*it, "data_fraction", cfg.pairing.data_fraction, "pairing");
  }
  if (auto it = root.find("review"); it != root.end()) {
    check_keys(*it, "review",
               {"reviewers_per_pair", "max_in_flight", "prompt_kind",
                "allow_self_review"});
    read(*it, "reviewers_per_pair", cfg.review.reviewers_per_pair, "review");
    read(*it, "max_in_flight", cfg.review.max_in_flight, "review");
    read(*it, "allow_self_review", cfg.review.allow_self_review, "review");
    std::string kind = "auto";
    read(*it, "prompt_kind", kind, "review");
    if (kind != "auto") {
      try {
        cfg.review.prompt_kind = parse_prompt_kind(kind);
      } catch (const Error&) {
        throw SchemaError("review.prompt_kind '" + kind + "' is not a template");
      }
    }
  }
  if (auto it = root.find("judges"); it != root.end()) {
    check_keys(*it, "judges", {"default", "endpoints"});
    if (auto d = it->find("default"); d != it->end()) {
      parse_endpoint(*d, cfg.default_judge, "judges.default");
    }
    if (auto eps = it->find("endpoints"); eps != it->end()) {
      if (!eps->is_object()) throw SchemaError("judges.endpoints must be an object");
      for (const auto& [model, body] : eps->items()) {
        JudgeEndpointConfig e = cfg.default_judge;
        parse_endpoint(body, e, "judges.endpoints." + model);
        cfg.judges[model] = e;
      }
    }
  }
  if (auto it = root.find("scoring"); it != root.end()) {
    parse_scoring(*it, cfg.scoring);
  }
  if (auto it = root.find("optimization"); it != root.end()) {
    check_keys(*it, "optimization",
               {"step_size", "max_iters", "rel_tol", "fd_step", "parallel"});
    read(*it, "step_size", cfg.optimization.step_size, "optimization");
    read(*it, "max_iters", cfg.optimization.max_iters, "optimization");
    read(*it, "rel_tol", cfg.optimization.rel_tol, "optimization");
    read(*it, "fd_step", cfg.optimization.fd_step, "optimization");
    read(*it, "parallel", cfg.optimization.parallel, "optimization");
  }
  cfg.elimination.opt = cfg.optimization;
  if (auto it = root.find("elimination"); it != root.end()) {
    check_keys(*it, "elimination", {"mode", "fraction"});
    std::string mode = "fixed";
    read(*it, "mode", mode, "elimination");
    if (mode == "fixed") {
      cfg.elimination.mode = EliminationMode::kFixed;
    } else if (mode == "auto") {
      cfg.elimination.mode = EliminationMode::kAuto;
    } else {
      throw SchemaError("elimination.mode must be fixed or auto");
    }
    read(*it, "fraction", cfg.elimination.fraction, "elimination");
  }
  cfg.apply_seed(cfg.seed);
  return cfg;
}

EngineConfig load_engine_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_engine_config(buf.str());
}

std::string dump_engine_config(const EngineConfig& cfg) {
  const SimConfig& s = cfg.simulation;
  json j;
  j["seed"] = cfg.seed;
  j["out"] = cfg.out;
  j["models"] = cfg.models;
  j["simulation"] = {
      {"m", s.m},
      {"n", s.n},
      {"reviewers_per_pair", s.reviewers_per_pair},
      {"quality_noise", s.quality_noise},
      {"tie_margin", s.tie_margin},
      {"judge_sharpness", s.judge_sharpness},
      {"spacing", s.spacing == AbilitySpacing::kEven ? "even" : "uniform"},
      {"pairs_per_question", s.pairs_per_question},
      {"judge_floor", s.judge_floor},
      {"noise_judge_fraction", s.noise_judge_fraction},
      {"judge_ability_override", s.judge_ability_override},
      {"allow_self_review", s.allow_self_review},
      {"self_favoring", s.self_favoring},
      {"self_bias", s.self_bias}};
  j["pairing"] = {
      {"strategy", cfg.pairing.kind == PairingStrategy::Kind::kAllPairs
                       ? "all_pairs"
                       : "sampled"},
      {"pairs_per_question", cfg.pairing.pairs_per_question},
      {"data_fraction", cfg.pairing.data_fraction}};
  j["review"] = {
      {"reviewers_per_pair", cfg.review.reviewers_per_pair},
      {"max_in_flight", cfg.review.max_in_flight},
      {"prompt_kind",
       cfg.review.prompt_kind ? to_string(*cfg.review.prompt_kind) : "auto"},
      {"allow_self_review", cfg.review.allow_self_review}};
  json endpoints = json::object();
  for (const auto& [model, e] : cfg.judges) endpoints[model] = endpoint_json(e);
  j["judges"] = {{"default", endpoint_json(cfg.default_judge)},
                 {"endpoints", endpoints}};
  j["scoring"] = scoring_json(cfg.scoring);
  const OptConfig& o = cfg.optimization;
  j["optimization"] = {{"step_size", o.step_size},
                       {"max_iters", o.max_iters},
                       {"rel_tol", o.rel_tol},
                       {"fd_step", o.fd_step},
                       {"parallel", o.parallel}};
  j["elimination"] = {
      {"mode", cfg.elimination.mode == EliminationMode::kFixed ? "fixed" : "auto"},
      {"fraction", cfg.elimination.fraction}};
  return j.dump(2);
}

}  // namespace peerrank
