#pragma once

// Prompt rendering, verdict parsing and the chat-completion client used to
// turn a reviewer model into a pairwise judge.

#include <atomic>
#include <chrono>
#include <memory>
#include <optional>
#include <semaphore>
#include <span>
#include <string>
#include <vector>

#include "peerrank/data_io.hpp"
#include "peerrank/types.hpp"

namespace peerrank {

enum class PromptKind { kSingle, kSingleRef, kMulti, kMultiRef };

const char* to_string(PromptKind kind);
PromptKind parse_prompt_kind(const std::string& name);
// Multi-turn when the question has more than one turn; referenced when the
// question carries a reference answer.
PromptKind choose_prompt_kind(const Question& question);

struct Prompt {
  std::string system;
  std::string user;

  friend bool operator==(const Prompt&, const Prompt&) = default;
};

// Fills the judge template for `kind`. Answer A is always rendered as
// "Assistant A". Throws ArgumentError when a referenced kind lacks a
// reference or a multi-turn kind has fewer than two turns.
Prompt render_prompt(PromptKind kind,
                     std::span<const std::string> question_turns,
                     std::span<const std::string> answer_a,
                     std::span<const std::string> answer_b,
                     const std::optional<std::vector<std::string>>& reference);

enum class Verdict { kA, kB, kC };

// Letter of the last "[[A]]", "[[B]]" or "[[C]]" marker in the completion.
// Throws InvalidVerdictError when no marker is present.
Verdict parse_verdict(const std::string& text);

struct JudgeEndpointConfig {
  std::string base_url;  // e.g. http://localhost:8000/v1
  std::string model_name;
  std::string api_key_env = "OPENAI_API_KEY";
  double timeout_seconds = 60.0;
  int max_retries = 3;
  double temperature = 0.0;
  std::chrono::milliseconds initial_backoff{500};
  double backoff_factor = 2.0;
  int max_in_flight = 8;

  void validate() const;
};

// Single-completion chat interface. Implementations must be safe to call
// from many threads.
class ChatClient {
 public:
  virtual ~ChatClient() = default;
  virtual std::string complete(const Prompt& prompt) = 0;
};

// Request body for POST {base_url}/chat/completions.
std::string build_chat_request(const JudgeEndpointConfig& config,
                               const Prompt& prompt);
// Extracts choices[0].message.content; throws TransportError when absent.
std::string parse_chat_response(const std::string& body);

// HTTP client with exponential backoff on connection errors, 408, 429 and
// 5xx responses. In-flight requests are capped at max_in_flight.
class HttpChatClient : public ChatClient {
 public:
  explicit HttpChatClient(JudgeEndpointConfig config);

  std::string complete(const Prompt& prompt) override;

  std::size_t retries_consumed() const { return retries_.load(); }
  const JudgeEndpointConfig& config() const { return config_; }

 private:
  JudgeEndpointConfig config_;
  std::string scheme_host_port_;
  std::string path_prefix_;
  std::string api_key_;
  std::counting_semaphore<> in_flight_;
  std::atomic<std::size_t> retries_{0};
};

// Judges one pair in both presentation orders and folds the two verdicts
// with aggregate_dual_order. An unparseable verdict in one order counts as a
// tie vote; if both orders are unparseable the pair is rejected with
// InvalidVerdictError.
Outcome judge_pair(ChatClient& client, const Question& question,
                   std::span<const std::string> answer_a,
                   std::span<const std::string> answer_b, PromptKind kind);

// Thin helper for producing contestant answers with the same client.
std::vector<std::string> generate_answer(ChatClient& client,
                                         const Question& question);

}  // namespace peerrank
