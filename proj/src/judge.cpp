#include "peerrank/judge.hpp"

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <regex>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "peerrank/errors.hpp"

namespace peerrank {
namespace {

using json = nlohmann::ordered_json;

// Reviewer system prompts, verbatim including their original punctuation.
constexpr const char* kSingleSystem =
    "Please act as a judge and evaluate the quality of the responses provided "
    "by two AI assistants to the user question displayed below. You do not "
    "need to explain, just give your judgment. Output your final verdict by "
    "strictly following this format: \"[[A]]\" if assistant A is better, "
    "\"[[B]]\" if assistant B is better, and \"[[C]]\" for a tie.";

constexpr const char* kSingleRefSystem =
    "Please act as a judge and evaluate the quality of the responses provided "
    "by two AI assistants to the user question displayed below, with "
    "reference to the provided reference answers. You do not need to explain, "
    "just give your judgment. Output your final verdict by strictly following "
    "this format: \"[[A]]\"if assistant A is better, \"[[B]]\" if assistant B "
    "is better, and \"[[C]]\" for a tie.";

constexpr const char* kMultiSystem =
    "Please act as a judge and evaluate the quality of the responses provided "
    "by two AI assistants to the user question displayed below. You do not "
    "need to explain, just give your judgment. Output your final verdict by "
    "strictly following this format: \"[[A]]\" if assistant A is better, "
    "\"[[B]]\" if assistant B is better, and \"[[C]]\" for a tie";

constexpr const char* kMultiRefSystem =
    "Please act as a judge and evaluate the quality of the responses provided "
    "by two AI assistants to the user question displayed below, in comparison "
    "to the reference answers. You do not need to explain, just give your "
    "judgment. Output your final verdict by strictly following this format: "
    "\"[[A]]\"if assistant A is better, \"[[B]]\" if assistant B is better, "
    "and \"[[C]]\" for a tie.";

constexpr const char* kIndent = "    ";

void require_turns(std::span<const std::string> turns, std::size_t n,
                   const char* what) {
  if (turns.size() < n) {
    throw ArgumentError(std::string(what) + " needs at least " +
                        std::to_string(n) + " turn(s), got " +
                        std::to_string(turns.size()));
  }
}

std::string conversation(char assistant,
                         std::span<const std::string> question_turns,
                         std::span<const std::string> answer_turns) {
  std::string out = "Assistant ";
  out += assistant;
  out += "'s Conversation with User:\n";
  for (std::size_t t = 0; t < question_turns.size(); ++t) {
    out += "\n";
    out += kIndent;
    out += "User: " + question_turns[t] + "\n\n";
    out += kIndent;
    out += "Assistant ";
    out += assistant;
    out += ": " + answer_turns[t] + "\n";
  }
  return out;
}

void log_warning(const std::string& msg) {
  std::cerr << "warning: " << msg << '\n';
}

bool is_transient_status(int status) {
  return status == 408 || status == 429 || status >= 500;
}

}  // namespace

const char* to_string(PromptKind kind) {
  switch (kind) {
    case PromptKind::kSingle:
      return "single";
    case PromptKind::kSingleRef:
      return "single_ref";
    case PromptKind::kMulti:
      return "multi";
    case PromptKind::kMultiRef:
      break;
  }
  return "multi_ref";
}

PromptKind parse_prompt_kind(const std::string& name) {
  if (name == "single") return PromptKind::kSingle;
  if (name == "single_ref") return PromptKind::kSingleRef;
  if (name == "multi") return PromptKind::kMulti;
  if (name == "multi_ref") return PromptKind::kMultiRef;
  throw ArgumentError("unknown prompt kind '" + name + "'");
}

PromptKind choose_prompt_kind(const Question& question) {
  const bool multi = question.turns.size() > 1;
  const bool ref = question.reference.has_value();
  if (multi) return ref ? PromptKind::kMultiRef : PromptKind::kMulti;
  return ref ? PromptKind::kSingleRef : PromptKind::kSingle;
}

Prompt render_prompt(PromptKind kind,
                     std::span<const std::string> question_turns,
                     std::span<const std::string> answer_a,
                     std::span<const std::string> answer_b,
                     const std::optional<std::vector<std::string>>& reference) {
  const bool needs_ref =
      kind == PromptKind::kSingleRef || kind == PromptKind::kMultiRef;
  if (needs_ref && (!reference || reference->empty())) {
    throw ArgumentError(std::string(to_string(kind)) +
                        " prompt requires a reference answer");
  }

  Prompt p;
  switch (kind) {
    case PromptKind::kSingle:
    case PromptKind::kSingleRef: {
      require_turns(question_turns, 1, "question");
      require_turns(answer_a, 1, "answer A");
      require_turns(answer_b, 1, "answer B");
      p.system = kind == PromptKind::kSingle ? kSingleSystem : kSingleRefSystem;
      p.user = "User Question: " + question_turns[0] + "\n\n";
      if (kind == PromptKind::kSingleRef) {
        p.user += "Reference Answer: " + reference->front() + "\n\n";
      }
      p.user += "Assistant A's Answer: " + answer_a[0] + "\n\n";
      p.user += "Assistant B's Answer: " + answer_b[0] + "\n";
      break;
    }
    case PromptKind::kMulti:
    case PromptKind::kMultiRef: {
      const std::size_t turns = question_turns.size();
      require_turns(question_turns, 2, "multi-turn question");
      require_turns(answer_a, turns, "answer A");
      require_turns(answer_b, turns, "answer B");
      p.system = kind == PromptKind::kMulti ? kMultiSystem : kMultiRefSystem;
      if (kind == PromptKind::kMultiRef) {
        require_turns(*reference, turns, "reference");
        p.user += "Reference Answer\n";
        for (std::size_t t = 0; t < turns; ++t) {
          p.user += "\n";
          p.user += kIndent;
          p.user += "User: " + question_turns[t] + "\n\n";
          p.user += kIndent;
          p.user += "Reference answer: " + (*reference)[t] + "\n";
        }
        p.user += "\n";
      }
      p.user += conversation('A', question_turns, answer_a.first(turns));
      p.user += "\n";
      p.user += conversation('B', question_turns, answer_b.first(turns));
      break;
    }
  }
  return p;
}

Verdict parse_verdict(const std::string& text) {
  std::size_t best = std::string::npos;
  Verdict verdict = Verdict::kC;
  for (auto [marker, v] : {std::pair{"[[A]]", Verdict::kA},
                           std::pair{"[[B]]", Verdict::kB},
                           std::pair{"[[C]]", Verdict::kC}}) {
    std::size_t pos = text.rfind(marker);
    if (pos != std::string::npos && (best == std::string::npos || pos > best)) {
      best = pos;
      verdict = v;
    }
  }
  if (best == std::string::npos) {
    throw InvalidVerdictError("no [[A]]/[[B]]/[[C]] verdict in judge output");
  }
  return verdict;
}

void JudgeEndpointConfig::validate() const {
  if (base_url.empty()) throw ArgumentError("endpoint base_url is empty");
  if (!(timeout_seconds > 0)) throw ArgumentError("timeout must be > 0");
  if (max_retries < 0) throw ArgumentError("max_retries must be >= 0");
  if (max_in_flight < 1) throw ArgumentError("max_in_flight must be >= 1");
  if (backoff_factor < 1.0) throw ArgumentError("backoff_factor must be >= 1");
}

std::string build_chat_request(const JudgeEndpointConfig& config,
                               const Prompt& prompt) {
  json messages = json::array();
  if (!prompt.system.empty()) {
    messages.push_back({{"role", "system"}, {"content", prompt.system}});
  }
  messages.push_back({{"role", "user"}, {"content", prompt.user}});
  json body;
  body["model"] = config.model_name;
  body["messages"] = std::move(messages);
  body["temperature"] = config.temperature;
  body["n"] = 1;
  return body.dump();
}

std::string parse_chat_response(const std::string& body) {
  try {
    auto doc = json::parse(body);
    return doc.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw TransportError(std::string("malformed chat completion: ") + e.what());
  }
}

HttpChatClient::HttpChatClient(JudgeEndpointConfig config)
    : config_(std::move(config)), in_flight_(std::max(1, config_.max_in_flight)) {
  config_.validate();
  static const std::regex kUrl(R"(^(https?://[^/]+)(/.*)?$)",
                               std::regex::icase);
  std::smatch match;
  if (!std::regex_match(config_.base_url, match, kUrl)) {
    throw ArgumentError("invalid endpoint url '" + config_.base_url + "'");
  }
  scheme_host_port_ = match[1].str();
  path_prefix_ = match[2].matched ? match[2].str() : "";
  while (!path_prefix_.empty() && path_prefix_.back() == '/') {
    path_prefix_.pop_back();
  }
  if (!config_.api_key_env.empty()) {
    if (const char* key = std::getenv(config_.api_key_env.c_str())) {
      api_key_ = key;
    }
  }
}

std::string HttpChatClient::complete(const Prompt& prompt) {
  const std::string body = build_chat_request(config_, prompt);
  const std::string path = path_prefix_ + "/chat/completions";

  in_flight_.acquire();
  struct Release {
    std::counting_semaphore<>& s;
    ~Release() { s.release(); }
  } release{in_flight_};

  httplib::Client client(scheme_host_port_);
  const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::duration<double>(config_.timeout_seconds));
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  httplib::Headers headers;
  if (!api_key_.empty()) {
    headers.emplace("Authorization", "Bearer " + api_key_);
  }

  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      ++retries_;
      auto delay = std::chrono::duration<double, std::milli>(
          config_.initial_backoff.count() *
          std::pow(config_.backoff_factor, attempt - 1));
      std::this_thread::sleep_for(delay);
    }
    auto res = client.Post(path, headers, body, "application/json");
    if (!res) {
      last_error = "connection error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 200 && res->status < 300) {
      return parse_chat_response(res->body);
    }
    last_error = "HTTP " + std::to_string(res->status);
    if (!is_transient_status(res->status)) {
      throw TransportError(config_.base_url + ": " + last_error);
    }
  }
  throw TransportError(config_.base_url + ": retries exhausted after " +
                       std::to_string(config_.max_retries + 1) +
                       " attempts (" + last_error + ")");
}

Outcome judge_pair(ChatClient& client, const Question& question,
                   std::span<const std::string> answer_a,
                   std::span<const std::string> answer_b, PromptKind kind) {
  // Order 1 shows model_1 as A; order 2 swaps the presentation.
  auto verdict_in_order = [&](bool swapped) -> std::optional<Winner> {
    Prompt p = swapped ? render_prompt(kind, question.turns, answer_b,
                                       answer_a, question.reference)
                       : render_prompt(kind, question.turns, answer_a,
                                       answer_b, question.reference);
    std::string completion = client.complete(p);
    try {
      Verdict v = parse_verdict(completion);
      if (v == Verdict::kC) return Winner::kTie;
      const bool first_slot = (v == Verdict::kA) != swapped;
      return first_slot ? Winner::kModel1 : Winner::kModel2;
    } catch (const InvalidVerdictError&) {
      log_warning("question " + std::to_string(question.question_id) +
                  ": unparseable verdict in " +
                  (swapped ? "reversed" : "forward") +
                  " order, counted as tie vote");
      return std::nullopt;
    }
  };
  auto g1 = verdict_in_order(false);
  auto g2 = verdict_in_order(true);
  if (!g1 && !g2) {
    throw InvalidVerdictError("question " +
                              std::to_string(question.question_id) +
                              ": no parseable verdict in either order");
  }
  return aggregate_dual_order(g1.value_or(Winner::kTie),
                              g2.value_or(Winner::kTie));
}

std::vector<std::string> generate_answer(ChatClient& client,
                                         const Question& question) {
  std::vector<std::string> answers;
  // Later turns see the earlier exchange as a plain transcript.
  std::string history;
  for (const auto& turn : question.turns) {
    std::string user = history.empty() ? turn : history + "\n\nUser: " + turn;
    answers.push_back(client.complete(Prompt{"", user}));
    history = (history.empty() ? "User: " + turn
                               : history + "\n\nUser: " + turn) +
              "\n\nAssistant: " + answers.back();
  }
  return answers;
}

}  // namespace peerrank
