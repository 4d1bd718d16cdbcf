#pragma once

// Chat-completion access to interchangeable providers, a content-addressed
// record/replay fixture store, and response classification.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "honeygen/error.hpp"
#include "honeygen/prompt_kit.hpp"
#include "honeygen/text.hpp"
#include "honeygen/token_specs.hpp"

namespace honeygen::llm {

enum class ProviderKind { kOpenAiCompatible, kGemini, kReplay };

inline std::string_view to_string(ProviderKind k) {
  switch (k) {
    case ProviderKind::kOpenAiCompatible: return "openai";
    case ProviderKind::kGemini: return "gemini";
    case ProviderKind::kReplay: return "replay";
  }
  return "unknown";
}

inline ProviderKind parse_provider_kind(std::string_view s) {
  const std::string v = text::to_lower(s);
  if (v == "openai" || v == "openai-compatible" || v == "chat-completions")
    return ProviderKind::kOpenAiCompatible;
  if (v == "gemini") return ProviderKind::kGemini;
  if (v == "replay") return ProviderKind::kReplay;
  throw Error(ErrorCode::kConfigError, "unknown provider kind '" + std::string(s) + "'");
}

struct ProviderConfig {
  std::string name;
  ProviderKind kind = ProviderKind::kOpenAiCompatible;
  std::string endpoint;
  std::string model_id;
  // Name of the environment variable holding the API key. Empty for
  // endpoints that need no credential.
  std::string auth_env;
  std::optional<double> temperature;
  std::optional<int> max_tokens;
  std::chrono::milliseconds timeout{60'000};
  // Minimum spacing between requests to this provider; 0 disables.
  std::chrono::milliseconds min_interval{0};
};

inline bool is_absolute_url(std::string_view url) {
  return (url.starts_with("http://") || url.starts_with("https://")) &&
         url.find('/', url.find("://") + 3) != std::string_view::npos;
}

inline void check_provider(const ProviderConfig& p) {
  if (p.name.empty()) throw Error(ErrorCode::kConfigError, "provider without a name");
  if (p.kind == ProviderKind::kReplay) return;
  if (!is_absolute_url(p.endpoint))
    throw Error(ErrorCode::kConfigError,
                "provider " + p.name + ": endpoint must be an absolute URL, got '" + p.endpoint + "'");
  if (p.temperature && *p.temperature < 0)
    throw Error(ErrorCode::kConfigError, "provider " + p.name + ": negative temperature");
  if (p.max_tokens && *p.max_tokens <= 0)
    throw Error(ErrorCode::kConfigError, "provider " + p.name + ": max_tokens must be positive");
}

inline ProviderConfig provider_from_json(const nlohmann::json& j) {
  ProviderConfig p;
  try {
    p.name = j.at("name").get<std::string>();
    p.kind = parse_provider_kind(j.value("kind", std::string("openai")));
    p.endpoint = j.value("endpoint", std::string());
    p.model_id = j.value("model", std::string());
    p.auth_env = j.value("auth_env", std::string());
    if (j.contains("temperature")) p.temperature = j.at("temperature").get<double>();
    if (j.contains("max_tokens")) p.max_tokens = j.at("max_tokens").get<int>();
    if (j.contains("timeout_ms")) p.timeout = std::chrono::milliseconds(j.at("timeout_ms").get<long>());
    if (j.contains("min_interval_ms"))
      p.min_interval = std::chrono::milliseconds(j.at("min_interval_ms").get<long>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfigError, std::string("provider entry: ") + e.what());
  }
  check_provider(p);
  return p;
}

enum class FinishReason { kComplete, kTruncated, kFiltered, kError };

inline std::string_view to_string(FinishReason r) {
  switch (r) {
    case FinishReason::kComplete: return "complete";
    case FinishReason::kTruncated: return "truncated";
    case FinishReason::kFiltered: return "filtered";
    case FinishReason::kError: return "error";
  }
  return "error";
}

inline FinishReason parse_finish_reason(std::string_view s) {
  if (s == "complete") return FinishReason::kComplete;
  if (s == "truncated") return FinishReason::kTruncated;
  if (s == "filtered") return FinishReason::kFiltered;
  if (s == "error") return FinishReason::kError;
  throw Error(ErrorCode::kParseError, "unknown finish_reason '" + std::string(s) + "'");
}

enum class GatewayError {
  kNone,
  kTimeout,
  kAuthMissing,
  kTransportError,
  kHttpStatus,
  kBadResponse,
  kFixtureMissing,
};

inline std::string_view to_string(GatewayError e) {
  switch (e) {
    case GatewayError::kNone: return "None";
    case GatewayError::kTimeout: return "Timeout";
    case GatewayError::kAuthMissing: return "AuthMissing";
    case GatewayError::kTransportError: return "TransportError";
    case GatewayError::kHttpStatus: return "HttpStatus";
    case GatewayError::kBadResponse: return "BadResponse";
    case GatewayError::kFixtureMissing: return "FixtureMissing";
  }
  return "Unknown";
}

struct ChatMessage {
  std::string role;  // "user" or "assistant"
  std::string content;
};

// Text is present exactly when finish_reason is complete or truncated.
struct ChatResponse {
  std::optional<std::string> text;
  FinishReason finish_reason = FinishReason::kError;
  std::chrono::milliseconds latency{0};
  std::string provider;
  GatewayError error = GatewayError::kNone;
  std::string error_detail;

  static ChatResponse failure(std::string provider, GatewayError error, std::string detail) {
    ChatResponse r;
    r.provider = std::move(provider);
    r.error = error;
    r.error_detail = std::move(detail);
    return r;
  }
};

// The text a conversation is keyed and recorded under. A single user turn is
// just its content.
inline std::string conversation_text(const std::vector<ChatMessage>& messages) {
  if (messages.size() == 1 && messages.front().role == "user") return messages.front().content;
  std::string out;
  for (const auto& m : messages) {
    if (!out.empty()) out += "\n\n";
    out += "[" + m.role + "] " + m.content;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Fixture store

struct Fixture {
  std::string key;
  std::string provider;
  std::string prompt_text;
  std::string response_text;
  FinishReason finish_reason = FinishReason::kComplete;
};

inline std::string fixture_key(std::string_view provider, std::string_view prompt_text) {
  std::string material(provider);
  material.push_back('\0');
  material.append(prompt_text);
  return text::sha256_hex(material);
}

// A directory of <key>.json files. Writes are serialized and go through a
// temporary file so readers never see a partial fixture.
class FixtureStore {
 public:
  explicit FixtureStore(std::filesystem::path dir) : dir_(std::move(dir)) {}

  const std::filesystem::path& dir() const { return dir_; }

  std::filesystem::path path_for(std::string_view key) const {
    return dir_ / (std::string(key) + ".json");
  }

  std::optional<Fixture> find(std::string_view provider, std::string_view prompt_text) const {
    const std::string key = fixture_key(provider, prompt_text);
    const auto path = path_for(key);
    std::error_code ec;
    if (!std::filesystem::exists(path, ec)) return std::nullopt;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text::read_file(path));
      Fixture f{j.at("key").get<std::string>(), j.value("provider", std::string(provider)),
                j.at("prompt_text").get<std::string>(), j.at("response_text").get<std::string>(),
                parse_finish_reason(j.value("finish_reason", std::string("complete")))};
      return f;
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
    }
  }

  Fixture record(std::string_view provider, std::string_view prompt_text,
                 std::string_view response_text,
                 FinishReason finish_reason = FinishReason::kComplete) {
    Fixture f{fixture_key(provider, prompt_text), std::string(provider), std::string(prompt_text),
              std::string(response_text), finish_reason};
    const nlohmann::json j = {{"key", f.key},
                              {"provider", f.provider},
                              {"prompt_text", f.prompt_text},
                              {"response_text", f.response_text},
                              {"finish_reason", std::string(to_string(f.finish_reason))}};
    std::lock_guard lock(mutex_);
    std::filesystem::create_directories(dir_);
    const auto target = path_for(f.key);
    auto tmp = target;
    tmp += ".tmp";
    text::write_file(tmp, j.dump(2) + "\n");
    std::error_code ec;
    std::filesystem::rename(tmp, target, ec);
    if (ec) throw Error(ErrorCode::kIoFailure, "cannot store fixture " + target.string());
    return f;
  }

  std::size_t size() const {
    std::error_code ec;
    if (!std::filesystem::is_directory(dir_, ec)) return 0;
    std::size_t n = 0;
    for (const auto& e : std::filesystem::directory_iterator(dir_))
      if (e.path().extension() == ".json") ++n;
    return n;
  }

 private:
  std::filesystem::path dir_;
  mutable std::mutex mutex_;
};

// ---------------------------------------------------------------------------
// Providers

class ChatProvider {
 public:
  virtual ~ChatProvider() = default;
  virtual const std::string& name() const = 0;
  // Never throws for provider-side failures; they come back as
  // finish_reason == kError.
  virtual ChatResponse complete(const std::vector<ChatMessage>& messages) = 0;
};

class RateLimiter {
 public:
  explicit RateLimiter(std::chrono::milliseconds interval) : interval_(interval) {}

  void acquire() {
    if (interval_.count() <= 0) return;
    std::chrono::steady_clock::time_point slot;
    {
      std::lock_guard lock(mutex_);
      const auto now = std::chrono::steady_clock::now();
      slot = std::max(now, next_);
      next_ = slot + interval_;
    }
    std::this_thread::sleep_until(slot);
  }

 private:
  std::chrono::milliseconds interval_;
  std::mutex mutex_;
  std::chrono::steady_clock::time_point next_{};
};

namespace wire {

inline nlohmann::json openai_request(const ProviderConfig& p,
                                     const std::vector<ChatMessage>& messages) {
  nlohmann::json msgs = nlohmann::json::array();
  for (const auto& m : messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
  nlohmann::json body = {{"model", p.model_id}, {"messages", msgs}};
  if (p.temperature) body["temperature"] = *p.temperature;
  if (p.max_tokens) body["max_tokens"] = *p.max_tokens;
  return body;
}

inline ChatResponse openai_response(const nlohmann::json& j, std::string provider) {
  ChatResponse r;
  r.provider = std::move(provider);
  const auto& choice = j.at("choices").at(0);
  const std::string reason = choice.value("finish_reason", std::string("stop"));
  if (reason == "content_filter") {
    r.finish_reason = FinishReason::kFiltered;
    return r;
  }
  const auto& content = choice.at("message").at("content");
  r.text = content.is_null() ? std::string() : content.get<std::string>();
  r.finish_reason = reason == "length" ? FinishReason::kTruncated : FinishReason::kComplete;
  return r;
}

inline nlohmann::json gemini_request(const ProviderConfig& p,
                                     const std::vector<ChatMessage>& messages) {
  nlohmann::json contents = nlohmann::json::array();
  for (const auto& m : messages) {
    contents.push_back({{"role", m.role == "assistant" ? "model" : "user"},
                        {"parts", nlohmann::json::array({{{"text", m.content}}})}});
  }
  nlohmann::json body = {{"contents", contents}};
  nlohmann::json generation = nlohmann::json::object();
  if (p.temperature) generation["temperature"] = *p.temperature;
  if (p.max_tokens) generation["maxOutputTokens"] = *p.max_tokens;
  if (!generation.empty()) body["generationConfig"] = generation;
  return body;
}

inline ChatResponse gemini_response(const nlohmann::json& j, std::string provider) {
  ChatResponse r;
  r.provider = std::move(provider);
  if (!j.contains("candidates") || j.at("candidates").empty()) {
    if (j.contains("promptFeedback") && j.at("promptFeedback").contains("blockReason")) {
      r.finish_reason = FinishReason::kFiltered;
      return r;
    }
    return ChatResponse::failure(r.provider, GatewayError::kBadResponse, "no candidates in response");
  }
  const auto& cand = j.at("candidates").at(0);
  const std::string reason = cand.value("finishReason", std::string("STOP"));
  if (reason == "SAFETY" || reason == "RECITATION" || reason == "BLOCKLIST" ||
      reason == "PROHIBITED_CONTENT" || reason == "SPII") {
    r.finish_reason = FinishReason::kFiltered;
    return r;
  }
  std::string out;
  if (cand.contains("content") && cand.at("content").contains("parts")) {
    for (const auto& part : cand.at("content").at("parts")) out += part.value("text", std::string());
  }
  r.text = std::move(out);
  r.finish_reason = reason == "MAX_TOKENS" ? FinishReason::kTruncated : FinishReason::kComplete;
  return r;
}

}  // namespace wire

class HttpChatProvider : public ChatProvider {
 public:
  explicit HttpChatProvider(ProviderConfig config)
      : config_(std::move(config)), limiter_(config_.min_interval) {
    check_provider(config_);
  }

  const std::string& name() const override { return config_.name; }
  const ProviderConfig& config() const { return config_; }

  ChatResponse complete(const std::vector<ChatMessage>& messages) override {
    std::string secret;
    if (!config_.auth_env.empty()) {
      const char* value = std::getenv(config_.auth_env.c_str());
      if (value == nullptr || *value == '\0')
        return ChatResponse::failure(config_.name, GatewayError::kAuthMissing,
                                     "environment variable " + config_.auth_env + " is not set");
      secret = value;
    }
    const auto scheme_end = config_.endpoint.find("://");
    const auto path_start = config_.endpoint.find('/', scheme_end + 3);
    const std::string origin = config_.endpoint.substr(0, path_start);
    const std::string path = config_.endpoint.substr(path_start);

    httplib::Headers headers;
    nlohmann::json body;
    if (config_.kind == ProviderKind::kGemini) {
      body = wire::gemini_request(config_, messages);
      if (!secret.empty()) headers.emplace("x-goog-api-key", secret);
    } else {
      body = wire::openai_request(config_, messages);
      if (!secret.empty()) headers.emplace("Authorization", "Bearer " + secret);
    }

    limiter_.acquire();
    httplib::Client client(origin);
    if (!client.is_valid())
      return ChatResponse::failure(config_.name, GatewayError::kTransportError,
                                   "unsupported endpoint " + config_.endpoint);
    const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
    const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - seconds);
    client.set_connection_timeout(seconds.count(), micros.count());
    client.set_read_timeout(seconds.count(), micros.count());
    client.set_write_timeout(seconds.count(), micros.count());

    const auto started = std::chrono::steady_clock::now();
    auto res = client.Post(path, headers, body.dump(), "application/json");
    const auto latency = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - started);
    if (!res) {
      const bool timed_out = res.error() == httplib::Error::ConnectionTimeout ||
                             (res.error() == httplib::Error::Read && latency >= config_.timeout);
      auto r = ChatResponse::failure(config_.name,
                                     timed_out ? GatewayError::kTimeout : GatewayError::kTransportError,
                                     httplib::to_string(res.error()));
      r.latency = latency;
      return r;
    }
    if (res->status != 200) {
      auto r = ChatResponse::failure(config_.name, GatewayError::kHttpStatus,
                                     "HTTP " + std::to_string(res->status));
      r.latency = latency;
      return r;
    }
    try {
      const auto j = nlohmann::json::parse(res->body);
      ChatResponse r = config_.kind == ProviderKind::kGemini
                           ? wire::gemini_response(j, config_.name)
                           : wire::openai_response(j, config_.name);
      r.latency = latency;
      return r;
    } catch (const nlohmann::json::exception& e) {
      auto r = ChatResponse::failure(config_.name, GatewayError::kBadResponse, e.what());
      r.latency = latency;
      return r;
    }
  }

 private:
  ProviderConfig config_;
  RateLimiter limiter_;
};

// Serves recorded fixtures for a provider name. Strict mode reports a
// missing fixture as FixtureMissing instead of falling through.
class ReplayProvider : public ChatProvider {
 public:
  ReplayProvider(std::string provider_name, const FixtureStore& store)
      : name_(std::move(provider_name)), store_(store) {}

  const std::string& name() const override { return name_; }

  ChatResponse complete(const std::vector<ChatMessage>& messages) override {
    const std::string prompt = conversation_text(messages);
    auto fixture = store_.find(name_, prompt);
    if (!fixture)
      return ChatResponse::failure(name_, GatewayError::kFixtureMissing,
                                   "no fixture " + fixture_key(name_, prompt));
    ChatResponse r;
    r.provider = name_;
    r.finish_reason = fixture->finish_reason;
    if (r.finish_reason == FinishReason::kComplete || r.finish_reason == FinishReason::kTruncated)
      r.text = fixture->response_text;
    return r;
  }

 private:
  std::string name_;
  const FixtureStore& store_;
};

// Forwards to another provider and stores every successful exchange.
class RecordingProvider : public ChatProvider {
 public:
  RecordingProvider(ChatProvider& inner, FixtureStore& store) : inner_(inner), store_(store) {}

  const std::string& name() const override { return inner_.name(); }

  ChatResponse complete(const std::vector<ChatMessage>& messages) override {
    ChatResponse r = inner_.complete(messages);
    if (r.finish_reason != FinishReason::kError)
      store_.record(inner_.name(), conversation_text(messages), r.text.value_or(""), r.finish_reason);
    return r;
  }

 private:
  ChatProvider& inner_;
  FixtureStore& store_;
};

inline ChatResponse complete(const AssembledPrompt& prompt, ChatProvider& provider) {
  return provider.complete({{"user", prompt.text}});
}

// Follow-up request in the same conversation ("give me more examples").
inline ChatResponse continue_conversation(std::vector<ChatMessage>& history,
                                          std::string_view follow_up, ChatProvider& provider) {
  history.push_back({"user", std::string(follow_up)});
  ChatResponse r = provider.complete(history);
  if (r.text) history.push_back({"assistant", *r.text});
  return r;
}

inline std::unique_ptr<ChatProvider> make_provider(const ProviderConfig& config,
                                                   const FixtureStore* fixtures = nullptr) {
  if (config.kind == ProviderKind::kReplay) {
    if (fixtures == nullptr)
      throw Error(ErrorCode::kConfigError, "replay provider " + config.name + " needs a fixture store");
    return std::make_unique<ReplayProvider>(config.name, *fixtures);
  }
  return std::make_unique<HttpChatProvider>(config);
}

// ---------------------------------------------------------------------------
// Classification

enum class ResponseKind { kOk, kRefusal, kEmpty, kMalformed };

inline std::string_view to_string(ResponseKind k) {
  switch (k) {
    case ResponseKind::kOk: return "Ok";
    case ResponseKind::kRefusal: return "Refusal";
    case ResponseKind::kEmpty: return "Empty";
    case ResponseKind::kMalformed: return "Malformed";
  }
  return "Malformed";
}

inline ResponseKind parse_response_kind(std::string_view s) {
  if (s == "Ok") return ResponseKind::kOk;
  if (s == "Refusal") return ResponseKind::kRefusal;
  if (s == "Empty") return ResponseKind::kEmpty;
  if (s == "Malformed") return ResponseKind::kMalformed;
  throw Error(ErrorCode::kParseError, "unknown response class '" + std::string(s) + "'");
}

struct ResponseClass {
  ResponseKind kind = ResponseKind::kOk;
  std::string evidence;
};

inline const std::vector<std::string>& default_refusal_lexicon() {
  static const std::vector<std::string> lexicon = {
      "i cannot", "i can't", "unable to", "against our policy", "as an ai", "i'm sorry"};
  return lexicon;
}

inline std::vector<std::string> load_refusal_lexicon(const std::filesystem::path& path) {
  std::vector<std::string> out;
  const std::string content = text::read_file(path);
  for (std::string_view line : text::split_lines(content)) {
    line = text::trim(line);
    if (line.empty() || line.front() == '#') continue;
    out.push_back(text::to_lower(line));
  }
  return out;
}

// Empty for whitespace-only text. A response the type validator accepts is
// Ok even if a lexicon phrase occurs inside it (log files say "unable to" all
// the time); otherwise a lexicon hit is a Refusal, and a response with no
// parsable content is Malformed.
inline ResponseClass classify_response(std::string_view response, TokenTypeId type,
                                       const std::vector<std::string>& lexicon =
                                           default_refusal_lexicon()) {
  if (text::is_blank(response)) return {ResponseKind::kEmpty, {}};
  const ValidationResult validation = validate(type, response);
  if (validation.valid) return {ResponseKind::kOk, {}};
  const std::string lowered = text::to_lower(response);
  // Typographic apostrophes are common in chat output.
  const std::string normalized = text::replace_all(lowered, "\xE2\x80\x99", "'");
  for (const auto& phrase : lexicon) {
    if (!phrase.empty() && normalized.find(text::to_lower(phrase)) != std::string::npos)
      return {ResponseKind::kRefusal, phrase};
  }
  if (validation.parsed_units == 0) {
    std::string evidence = validation.findings.empty() ? "no parsable content"
                                                       : validation.findings.front().message;
    return {ResponseKind::kMalformed, std::move(evidence)};
  }
  return {ResponseKind::kOk, {}};
}

}  // namespace honeygen::llm
