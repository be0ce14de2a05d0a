#include <gtest/gtest.h>

#include <cstdlib>
#include <httplib.h>
#include <thread>

#include "rapp/retrieval.hpp"
#include "rapp/transport.hpp"

using namespace rapp;

namespace {

// Local OpenAI-style endpoint on an ephemeral port.
class FakeServer {
public:
  FakeServer() {
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeServer() {
    server_.stop();
    thread_.join();
  }
  httplib::Server& server() { return server_; }
  std::string base() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }

private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

ChatRequest hello() { return {"test-model", {{"system", "be brief"}, {"user", "hi"}}, std::nullopt}; }

}  // namespace

TEST(ChatRequest, BodyShape) {
  auto j = hello().to_json();
  EXPECT_EQ(j["model"], "test-model");
  EXPECT_EQ(j["messages"].size(), 2u);
  EXPECT_EQ(j["response_format"]["type"], "json_object");
  EXPECT_FALSE(j.contains("temperature"));
  auto r = hello();
  r.temperature = 0.2;
  EXPECT_DOUBLE_EQ(r.to_json()["temperature"].get<double>(), 0.2);
}

TEST(HttpTransport, PostsAndExtractsContent) {
  FakeServer fake;
  Json seen;
  std::string auth;
  fake.server().Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    seen = Json::parse(req.body);
    auth = req.get_header_value("Authorization");
    res.set_content(R"({"choices":[{"message":{"role":"assistant","content":"{\"ok\":true}"}}]})",
                    "application/json");
  });
  HttpConfig cfg;
  cfg.base_url = fake.base();
  cfg.api_key = "k123";
  cfg.temperature = 0.0;
  cfg.timeout_seconds = 5;
  HttpTransport t(cfg);
  EXPECT_EQ(t.complete(hello()).content, "{\"ok\":true}");
  EXPECT_EQ(auth, "Bearer k123");
  EXPECT_EQ(seen["messages"][1]["content"], "hi");
  EXPECT_DOUBLE_EQ(seen["temperature"].get<double>(), 0.0);
  EXPECT_EQ(t.descriptor(), "http(gpt-5)");
}

TEST(HttpTransport, ErrorStatusAndMalformedEnvelope) {
  FakeServer fake;
  fake.server().Post("/v1/chat/completions", [](const httplib::Request& req, httplib::Response& res) {
    if (req.body.find("fail") != std::string::npos) {
      res.status = 503;
      res.set_content("overloaded", "text/plain");
    } else {
      res.set_content(R"({"choices":[]})", "application/json");
    }
  });
  HttpConfig cfg;
  cfg.base_url = fake.base();
  cfg.timeout_seconds = 5;
  HttpTransport t(cfg);
  auto req = hello();
  req.messages[1].content = "fail";
  EXPECT_THROW(t.complete(req), TransportError);
  EXPECT_THROW(t.complete(hello()), TransportError);
}

TEST(HttpTransport, Outage) {
  HttpConfig cfg;
  cfg.base_url = "http://127.0.0.1:1/v1";
  cfg.timeout_seconds = 1;
  EXPECT_THROW(HttpTransport(cfg).complete(hello()), TransportError);
}

TEST(HttpConfig, FromEnvironment) {
  ::setenv("RAPP_LLM_BASE_URL", "http://example.invalid/v9", 1);
  ::setenv("RAPP_LLM_MODEL", "local-model", 1);
  ::setenv("RAPP_LLM_TEMPERATURE", "0.5", 1);
  ::setenv("RAPP_LLM_API_KEY", "abc", 1);
  auto c = HttpConfig::from_env();
  EXPECT_EQ(c.base_url, "http://example.invalid/v9");
  EXPECT_EQ(c.model, "local-model");
  EXPECT_EQ(c.api_key, "abc");
  ASSERT_TRUE(c.temperature.has_value());
  EXPECT_DOUBLE_EQ(*c.temperature, 0.5);
  for (const char* v : {"RAPP_LLM_BASE_URL", "RAPP_LLM_MODEL", "RAPP_LLM_TEMPERATURE", "RAPP_LLM_API_KEY"}) ::unsetenv(v);
}

TEST(RemoteEmbedder, ParsesAndNormalises) {
  FakeServer fake;
  fake.server().Post("/v1/embeddings", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"data":[{"embedding":[3.0,4.0]}]})", "application/json");
  });
  RemoteEmbedder e({fake.base(), "m", "", 5});
  auto v = e.embed("hello");
  ASSERT_EQ(v.dimension(), 2u);
  EXPECT_DOUBLE_EQ(v.components[0], 0.6);
  EXPECT_DOUBLE_EQ(v.components[1], 0.8);
}
