#include <gtest/gtest.h>

#include "peerrank/config.hpp"
#include "peerrank/errors.hpp"

using namespace peerrank;

TEST(EngineConfig, DefaultsFromEmptyDocument) {
  auto cfg = parse_engine_config("{}");
  EXPECT_EQ(cfg.seed, 0u);
  EXPECT_EQ(cfg.simulation.m, 15u);
  EXPECT_TRUE(std::holds_alternative<PlainMechanism>(cfg.scoring));
  EXPECT_EQ(cfg.elimination.mode, EliminationMode::kFixed);
  EXPECT_DOUBLE_EQ(cfg.elimination.fraction, 0.6);
}

TEST(EngineConfig, ParsesSections) {
  auto cfg = parse_engine_config(R"({
    "seed": 42,
    "out": "runs/a",
    "simulation": {"m": 9, "n": 30, "judge_floor": -0.5, "spacing": "uniform"},
    "pairing": {"strategy": "sampled", "pairs_per_question": 7, "data_fraction": 0.5},
    "review": {"reviewers_per_pair": 3, "prompt_kind": "single"},
    "judges": {"default": {"base_url": "http://localhost:9"},
               "endpoints": {"m01": {"model_name": "judge-1"}}},
    "scoring": {"mechanism": "elo", "elo": {"k_factor": 16}},
    "optimization": {"step_size": 0.1, "max_iters": 50},
    "elimination": {"mode": "auto"}
  })");
  EXPECT_EQ(cfg.seed, 42u);
  EXPECT_EQ(cfg.out, "runs/a");
  EXPECT_EQ(cfg.simulation.m, 9u);
  EXPECT_DOUBLE_EQ(cfg.simulation.judge_floor, -0.5);
  EXPECT_EQ(cfg.simulation.spacing, AbilitySpacing::kUniform);
  EXPECT_EQ(cfg.pairing.kind, PairingStrategy::Kind::kSampled);
  EXPECT_EQ(cfg.pairing.pairs_per_question, 7u);
  EXPECT_EQ(cfg.review.reviewers_per_pair, 3u);
  ASSERT_TRUE(cfg.review.prompt_kind.has_value());
  EXPECT_EQ(*cfg.review.prompt_kind, PromptKind::kSingle);
  EXPECT_EQ(cfg.endpoint_for("m01").base_url, "http://localhost:9");
  EXPECT_EQ(cfg.endpoint_for("m01").model_name, "judge-1");
  ASSERT_TRUE(std::holds_alternative<EloMechanism>(cfg.scoring));
  EXPECT_DOUBLE_EQ(std::get<EloMechanism>(cfg.scoring).k_factor, 16.0);
  EXPECT_EQ(cfg.optimization.max_iters, 50);
  EXPECT_EQ(cfg.elimination.opt.max_iters, 50);
  EXPECT_EQ(cfg.elimination.mode, EliminationMode::kAuto);
}

TEST(EngineConfig, ApplySeedReachesEveryComponent) {
  auto cfg = parse_engine_config(R"({"scoring": {"mechanism": "elo"}})");
  cfg.apply_seed(11);
  EXPECT_EQ(cfg.simulation.seed, 11u);
  EXPECT_EQ(cfg.optimization.seed, 11u);
  EXPECT_EQ(cfg.elimination.opt.seed, 11u);
  EXPECT_EQ(std::get<EloMechanism>(cfg.scoring).shuffle_seed, 11u);
  EXPECT_TRUE(std::holds_alternative<EloMechanism>(cfg.optimization.mechanism));
}

TEST(EngineConfig, UnknownKeysAreSchemaErrors) {
  EXPECT_THROW(parse_engine_config(R"({"sead": 1})"), SchemaError);
  EXPECT_THROW(parse_engine_config(R"({"simulation": {"mm": 3}})"), SchemaError);
  EXPECT_THROW(parse_engine_config(R"({"scoring": {"elo": {"kk": 3}}})"), SchemaError);
  EXPECT_THROW(parse_engine_config(R"({"scoring": {"mechanism": "glicko"}})"), SchemaError);
  EXPECT_THROW(parse_engine_config(R"({"seed": "x"})"), SchemaError);
  EXPECT_THROW(parse_engine_config("not json"), ParseError);
}

TEST(EngineConfig, MissingFileIsIoError) {
  EXPECT_THROW(load_engine_config("/nonexistent/peerrank.json"), IoError);
}

TEST(EngineConfig, DumpRoundTrips) {
  auto cfg = parse_engine_config(R"({"seed": 3, "simulation": {"m": 7},
                                     "scoring": {"mechanism": "rank", "rank": {"k": 50}}})");
  const std::string text = dump_engine_config(cfg);
  auto again = parse_engine_config(text);
  EXPECT_EQ(dump_engine_config(again), text);
  EXPECT_EQ(again.simulation.m, 7u);
  EXPECT_DOUBLE_EQ(std::get<RankMechanism>(again.scoring).k, 50.0);
}
