#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rapp/domain.hpp"

namespace rapp {

/// Any failure to obtain a completion: connection refused, timeout, non-2xx, unparseable envelope.
class TransportError : public Error {
public:
  using Error::Error;
};

struct ChatMessage {
  std::string role;  // system | user | assistant
  std::string content;
  bool operator==(const ChatMessage&) const = default;
};

struct ChatRequest {
  std::string model;
  std::vector<ChatMessage> messages;
  std::optional<double> temperature;

  /// OpenAI-compatible chat-completion body, JSON response format requested.
  Json to_json() const;
};

struct ChatResponse {
  std::string content;
};

class ChatTransport {
public:
  virtual ~ChatTransport() = default;
  virtual ChatResponse complete(const ChatRequest& request) = 0;
  /// Short identification for reports, e.g. "mock-noisy(seed=7)".
  virtual std::string descriptor() const = 0;
  /// Model name placed into requests.
  virtual std::string model() const { return "mock"; }
};

struct HttpConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string model = "gpt-5";
  std::string api_key;
  std::optional<double> temperature;
  int timeout_seconds = 120;

  /// RAPP_LLM_BASE_URL, RAPP_LLM_MODEL, RAPP_LLM_API_KEY (falls back to OPENAI_API_KEY),
  /// RAPP_LLM_TEMPERATURE.
  static HttpConfig from_env();
};

/// POSTs to {base_url}/chat/completions and returns choices[0].message.content.
class HttpTransport final : public ChatTransport {
public:
  explicit HttpTransport(HttpConfig cfg) : cfg_(std::move(cfg)) {}
  ChatResponse complete(const ChatRequest& request) override;
  std::string descriptor() const override { return "http(" + cfg_.model + ")"; }
  std::string model() const override { return cfg_.model; }
  const HttpConfig& config() const { return cfg_; }

private:
  HttpConfig cfg_;
};

}  // namespace rapp
