#include "atlas/service.hpp"

#include <httplib.h>

#include "atlas/errors.hpp"

namespace atlas::service {

namespace {

Response json_response(int status, const json& body) { return {status, body.dump()}; }

Response error_response(int status, const std::string& message) {
  return json_response(status, json{{"error", message}, {"status", status}});
}

}  // namespace

AtlasService::AtlasService(AtlasDocument atlas) : atlas_(std::move(atlas)) {
  if (auto report = validate_atlas(atlas_); !report.ok()) throw ValidationError(report.messages());
  std::vector<UseRecord> uses;
  uses.reserve(atlas_.uses.size());
  for (const auto& entry : atlas_.uses) uses.push_back(entry.use);
  index_ = search::SearchIndex::build(std::move(uses));
  atlas_body_ = serialize_atlas(atlas_);
  facets_body_ = index_.facet_counts().dump();
}

Response AtlasService::get_atlas() const { return {200, atlas_body_}; }

Response AtlasService::get_use(const std::string& use_id) const {
  const AtlasUse* entry = atlas_.find(use_id);
  if (entry == nullptr) return error_response(404, "unknown use '" + use_id + "'");
  json body = entry->use;
  body["x"] = entry->x;
  body["y"] = entry->y;
  return json_response(200, body);
}

Response AtlasService::get_search(const QueryParams& params) const {
  for (const auto& [key, value] : params) {
    if (key != "q" && key != "limit") return error_response(400, "unknown search parameter '" + key + "'");
  }
  if (params.count("q") > 1 || params.count("limit") > 1) {
    return error_response(400, "q and limit may each appear at most once");
  }
  const auto q_it = params.find("q");
  const std::string query = q_it == params.end() ? "" : q_it->second;

  std::size_t limit = kDefaultSearchLimit;
  if (auto it = params.find("limit"); it != params.end()) {
    const std::string& text = it->second;
    std::size_t consumed = 0;
    long long parsed = 0;
    try {
      parsed = std::stoll(text, &consumed);
    } catch (const std::exception&) {
      consumed = 0;
    }
    if (text.empty() || consumed != text.size() || parsed <= 0) {
      return error_response(400, "limit must be a positive integer, got '" + text + "'");
    }
    limit = static_cast<std::size_t>(parsed);
  }
  json hits = json::array();
  for (const auto& hit : index_.search(query, limit)) hits.push_back(search::to_json(hit));
  return json_response(200, json{{"query", query}, {"hits", hits}});
}

Response AtlasService::get_filter(const QueryParams& params) const {
  search::FacetSelections selections;
  for (const auto& [facet, value] : params) {
    if (!search::is_facet_name(facet)) return error_response(400, "unknown facet '" + facet + "'");
    selections[facet].insert(value);
  }
  const auto ids = index_.filter(selections);
  return json_response(200, json{{"use_ids", std::vector<std::string>(ids.begin(), ids.end())}});
}

Response AtlasService::get_facets() const { return {200, facets_body_}; }

void mount_routes(httplib::Server& server, const AtlasService& service,
                  const std::optional<std::filesystem::path>& static_dir) {
  auto reply = [](httplib::Response& res, const Response& r) {
    res.status = r.status;
    res.set_content(r.body, "application/json; charset=utf-8");
  };
  auto params_of = [](const httplib::Request& req) {
    QueryParams params;
    for (const auto& [k, v] : req.params) params.emplace(k, v);
    return params;
  };

  server.Get("/api/atlas", [&service, reply](const httplib::Request&, httplib::Response& res) {
    reply(res, service.get_atlas());
  });
  server.Get(R"(/api/uses/([^/]+))", [&service, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.get_use(req.matches[1].str()));
  });
  server.Get("/api/search", [&service, reply, params_of](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.get_search(params_of(req)));
  });
  server.Get("/api/filter", [&service, reply, params_of](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.get_filter(params_of(req)));
  });
  server.Get("/api/facets", [&service, reply](const httplib::Request&, httplib::Response& res) {
    reply(res, service.get_facets());
  });
  server.Get(R"(/api/.*)", [reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, error_response(404, "no such endpoint " + req.path));
  });
  server.set_exception_handler([reply](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string message = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const InputError& e) {
      reply(res, error_response(400, e.what()));
      return;
    } catch (const std::exception& e) {
      message = e.what();
    }
    reply(res, error_response(500, message));
  });
  if (static_dir) {
    if (!std::filesystem::is_directory(*static_dir)) {
      throw InputError("static directory does not exist: " + static_dir->string());
    }
    server.set_mount_point("/", static_dir->string());
  }
}

HttpService::HttpService(const std::filesystem::path& atlas_path, const std::string& host, int port,
                         std::optional<std::filesystem::path> static_dir)
    : HttpService(load_atlas(atlas_path), host, port, std::move(static_dir)) {}

HttpService::HttpService(AtlasDocument atlas, const std::string& host, int port,
                         std::optional<std::filesystem::path> static_dir)
    : service_(std::make_unique<AtlasService>(std::move(atlas))),
      server_(std::make_unique<httplib::Server>()) {
  start(host, port, static_dir);
}

void HttpService::start(const std::string& host, int port,
                        const std::optional<std::filesystem::path>& static_dir) {
  mount_routes(*server_, *service_, static_dir);
  if (port == 0) {
    port_ = server_->bind_to_any_port(host);
  } else {
    port_ = server_->bind_to_port(host, port) ? port : -1;
  }
  if (port_ < 0) throw InputError("cannot bind " + host + ":" + std::to_string(port));
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

void HttpService::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

void HttpService::wait() {
  if (thread_.joinable()) thread_.join();
}

HttpService::~HttpService() { stop(); }

}  // namespace atlas::service
