#pragma once

#include <chrono>
#include <string>
#include <utility>
#include <vector>

#include "atlas/json_io.hpp"

namespace atlas {

struct HttpPostOptions {
  std::chrono::milliseconds timeout{30000};
  int max_retries = 2;  // attempts = 1 + max_retries
  std::chrono::milliseconds retry_backoff{250};
  std::vector<std::pair<std::string, std::string>> headers;
};

/// POSTs a JSON body and decodes a JSON reply. Connection failures, 429 and
/// 5xx answers are retried; exhausting the attempts throws TransportError.
/// Other non-2xx answers and undecodable bodies throw ProtocolError.
json post_json(const std::string& url, const json& body, const HttpPostOptions& options);

/// Adds "Authorization: Bearer ..." when the named environment variable is set.
void add_bearer_from_env(HttpPostOptions& options, const std::string& env_var);

}  // namespace atlas
