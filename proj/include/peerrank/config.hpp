#pragma once

// The single JSON document describing a run. Every section is optional;
// unknown keys are rejected so typos fail loudly.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "peerrank/consistency.hpp"
#include "peerrank/elimination.hpp"
#include "peerrank/judge.hpp"
#include "peerrank/review.hpp"
#include "peerrank/simulator.hpp"

namespace peerrank {

struct ReviewSettings {
  std::size_t reviewers_per_pair = 5;
  std::size_t max_in_flight = 8;
  std::optional<PromptKind> prompt_kind;  // chosen per question when unset
  bool allow_self_review = false;
};

struct EngineConfig {
  std::uint64_t seed = 0;
  std::string out = "out";
  std::vector<std::string> models;  // empty: inferred from the data
  SimConfig simulation;
  PairingStrategy pairing;
  ReviewSettings review;
  JudgeEndpointConfig default_judge;
  // Per-reviewer overrides; missing fields fall back to default_judge.
  std::map<std::string, JudgeEndpointConfig> judges;
  ScoringMechanism scoring = PlainMechanism{};
  OptConfig optimization;
  EliminationConfig elimination;

  // Pushes the global seed into every seeded component.
  void apply_seed(std::uint64_t new_seed);
  void validate() const;
  JudgeEndpointConfig endpoint_for(const std::string& model) const;
};

// Throws SchemaError on unknown keys or mistyped values.
EngineConfig parse_engine_config(const std::string& json_text);
EngineConfig load_engine_config(const std::string& path);

// Canonical JSON form; the run manifest hashes this text.
std::string dump_engine_config(const EngineConfig& cfg);

}  // namespace peerrank
