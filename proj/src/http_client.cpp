#include "atlas/http_client.hpp"

#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "atlas/errors.hpp"

namespace atlas {

namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw InputError("endpoint URL lacks a scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

json post_json(const std::string& url, const json& body, const HttpPostOptions& options) {
  const auto [origin, path] = split_url(url);
  httplib::Client client(origin);
  const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(options.timeout);
  const auto micros =
      std::chrono::duration_cast<std::chrono::microseconds>(options.timeout - seconds);
  client.set_connection_timeout(seconds.count(), micros.count());
  client.set_read_timeout(seconds.count(), micros.count());
  client.set_write_timeout(seconds.count(), micros.count());

  httplib::Headers headers;
  for (const auto& [name, value] : options.headers) headers.emplace(name, value);
  const std::string payload = body.dump();

  std::string last_failure;
  const int attempts = 1 + std::max(0, options.max_retries);
  for (int attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(options.retry_backoff * attempt);
    auto result = client.Post(path, headers, payload, "application/json");
    if (!result) {
      last_failure = httplib::to_string(result.error());
      continue;
    }
    const int status = result->status;
    if (status == 429 || status >= 500) {
      last_failure = "HTTP " + std::to_string(status);
      continue;
    }
    if (status < 200 || status >= 300) {
      throw ProtocolError(url + " answered HTTP " + std::to_string(status) + ": " + result->body);
    }
    try {
      return json::parse(result->body);
    } catch (const json::parse_error& e) {
      throw ProtocolError(url + " returned a body that is not JSON: " + e.what());
    }
  }
  throw TransportError(url + " unreachable after " + std::to_string(attempts) +
                       " attempt(s): " + last_failure);
}

void add_bearer_from_env(HttpPostOptions& options, const std::string& env_var) {
  if (env_var.empty()) return;
  if (const char* value = std::getenv(env_var.c_str()); value != nullptr && *value != '\0') {
    options.headers.emplace_back("Authorization", std::string("Bearer ") + value);
  }
}

}  // namespace atlas
