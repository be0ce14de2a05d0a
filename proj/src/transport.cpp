#include "rapp/transport.hpp"

#include <cstdlib>

#include "http_util.hpp"

namespace rapp {

Json ChatRequest::to_json() const {
  Json msgs = Json::array();
  for (const auto& m : messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
  Json body{{"model", model}, {"messages", std::move(msgs)}, {"response_format", {{"type", "json_object"}}}};
  if (temperature) body["temperature"] = *temperature;
  return body;
}

HttpConfig HttpConfig::from_env() {
  HttpConfig c;
  if (const char* v = std::getenv("RAPP_LLM_BASE_URL")) c.base_url = v;
  if (const char* v = std::getenv("RAPP_LLM_MODEL")) c.model = v;
  if (const char* v = std::getenv("RAPP_LLM_API_KEY")) c.api_key = v;
  else if (const char* k = std::getenv("OPENAI_API_KEY")) c.api_key = k;
  if (const char* v = std::getenv("RAPP_LLM_TEMPERATURE")) {
    try {
      c.temperature = std::stod(v);
    } catch (const std::exception&) {
      throw Error(std::string("RAPP_LLM_TEMPERATURE is not a number: ") + v);
    }
  }
  return c;
}

ChatResponse HttpTransport::complete(const ChatRequest& request) {
  std::vector<std::pair<std::string, std::string>> headers;
  if (!cfg_.api_key.empty()) headers.emplace_back("Authorization", "Bearer " + cfg_.api_key);
  detail::HttpReply reply;
  try {
    ChatRequest req = request;
    if (!req.temperature) req.temperature = cfg_.temperature;
    reply = detail::post_json(cfg_.base_url, "/chat/completions", req.to_json().dump(), headers,
                              cfg_.timeout_seconds);
  } catch (const std::exception& e) {
    throw TransportError(e.what());
  }
  if (reply.status < 200 || reply.status >= 300)
    throw TransportError("chat endpoint answered HTTP " + std::to_string(reply.status) + ": " +
                         reply.body.substr(0, 200));
  try {
    auto j = Json::parse(reply.body);
    const auto& content = j.at("choices").at(0).at("message").at("content");
    if (!content.is_string()) throw TransportError("completion content is not a string");
    return {content.get<std::string>()};
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(std::string("malformed completion envelope: ") + e.what());
  }
}

}  // namespace rapp
