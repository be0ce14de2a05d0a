#include "http_util.hpp"

#include <stdexcept>

#include <httplib.h>

namespace rapp::detail {

namespace {

// Splits "scheme://host[:port][/prefix]" into the origin and the path prefix.
std::pair<std::string, std::string> split_base(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw std::runtime_error("base URL needs a scheme: " + url);
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, ""};
  std::string prefix = url.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {url.substr(0, path_start), prefix};
}

}  // namespace

HttpReply post_json(const std::string& base_url, const std::string& path, const std::string& body,
                    const std::vector<std::pair<std::string, std::string>>& headers, int timeout_seconds) {
  auto [origin, prefix] = split_base(base_url);
  httplib::Client cli(origin);
  cli.set_connection_timeout(timeout_seconds, 0);
  cli.set_read_timeout(timeout_seconds, 0);
  cli.set_write_timeout(timeout_seconds, 0);

  httplib::Headers h;
  for (const auto& [k, v] : headers) h.emplace(k, v);

  auto res = cli.Post(prefix + path, h, body, "application/json");
  if (!res) throw std::runtime_error("HTTP request to " + origin + prefix + path + " failed: " +
                                     httplib::to_string(res.error()));
  return {res->status, res->body};
}

}  // namespace rapp::detail
