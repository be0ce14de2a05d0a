#pragma once

#include <string>
#include <utility>
#include <vector>

namespace rapp::detail {

struct HttpReply {
  int status = 0;
  std::string body;
};

/// POSTs a JSON body to base_url + path. Throws std::runtime_error on connection failure.
/// `base_url` may carry a path prefix ("http://host:8080/v1").
HttpReply post_json(const std::string& base_url, const std::string& path, const std::string& body,
                    const std::vector<std::pair<std::string, std::string>>& headers, int timeout_seconds);

}  // namespace rapp::detail
