#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "atlas/atlas_document.hpp"
#include "atlas/search.hpp"

namespace httplib {
class Server;
}

namespace atlas::service {

struct Response {
  int status = 200;
  std::string body;  // JSON, UTF-8
};

using QueryParams = std::multimap<std::string, std::string>;

inline constexpr std::size_t kDefaultSearchLimit = 10;

/// Read-only request handling over an immutable atlas. Independent of any
/// transport, so the HTTP layer is a thin adapter.
class AtlasService {
 public:
  explicit AtlasService(AtlasDocument atlas);

  const AtlasDocument& atlas() const { return atlas_; }
  const search::SearchIndex& index() const { return index_; }

  Response get_atlas() const;
  Response get_use(const std::string& use_id) const;
  Response get_search(const QueryParams& params) const;
  Response get_filter(const QueryParams& params) const;
  Response get_facets() const;

 private:
  AtlasDocument atlas_;
  search::SearchIndex index_;
  std::string atlas_body_;
  std::string facets_body_;
};

/// Registers the /api routes and, when `static_dir` names a directory, serves it at /.
void mount_routes(httplib::Server& server, const AtlasService& service,
                  const std::optional<std::filesystem::path>& static_dir);

/// Owns an HTTP server running on a background thread.
class HttpService {
 public:
  /// Loads and validates the atlas (throws on an invalid file), binds
  /// host:port (port 0 picks a free one) and starts listening.
  HttpService(const std::filesystem::path& atlas_path, const std::string& host, int port,
              std::optional<std::filesystem::path> static_dir = std::nullopt);
  HttpService(AtlasDocument atlas, const std::string& host, int port,
              std::optional<std::filesystem::path> static_dir = std::nullopt);
  ~HttpService();

  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  int port() const { return port_; }
  void stop();
  /// Blocks until the server stops.
  void wait();

 private:
  void start(const std::string& host, int port, const std::optional<std::filesystem::path>& static_dir);

  std::unique_ptr<AtlasService> service_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
};

}  // namespace atlas::service
