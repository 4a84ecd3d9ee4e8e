#include "riseer/service.hpp"

#include <cstdlib>
#include <regex>
#include <thread>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "riseer/error.hpp"
#include "riseer/schema.hpp"

namespace riseer {
using nlohmann::json;

namespace {

int status_for(Errc code) {
  switch (code) {
    case Errc::not_found: return 404;
    case Errc::invalid_argument:
    case Errc::parse_error: return 400;
    default: return 500;
  }
}

ApiResponse error_response(int status, std::string code, std::string message) {
  return {status, {{"code", std::move(code)}, {"message", std::move(message)}}, "riseer.error.v1"};
}

std::optional<std::string> param(const ApiRequest& r, const std::string& key) {
  auto it = r.query.find(key);
  if (it == r.query.end() || it->second.empty()) return std::nullopt;
  return it->second;
}

Month month_param(const std::string& text, const char* name) {
  auto m = Month::parse(text);
  if (!m) throw Error(Errc::invalid_argument, std::string("bad month in ") + name);
  return *m;
}

std::size_t size_param(const std::string& text, const char* name) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(text, &used);
    if (used == text.size()) return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
  }
  throw Error(Errc::invalid_argument, std::string("bad integer in ") + name);
}

}  // namespace

ApiService::ApiService(std::shared_ptr<const ArtifactStore> store) : store_(std::move(store)) {}

ApiResponse ApiService::handle(const ApiRequest& req) const {
  static const std::regex details(R"(^/api/v1/clusters/([^/]+)/details$)");
  static const std::regex schema(R"(^/api/v1/schemas/([^/]+)$)");
  const std::string& p = req.path;
  try {
    std::smatch match;
    if (p == "/api/v1/compare") {
      if (req.method != "POST") return error_response(405, "method_not_allowed", "use POST");
      json body;
      try {
        body = json::parse(req.body);
      } catch (const json::exception& e) {
        throw Error(Errc::invalid_argument, std::string("bad JSON body: ") + e.what());
      }
      const json& ids = body.is_object() && body.contains("ids") ? body.at("ids") : body;
      if (!ids.is_array()) throw Error(Errc::invalid_argument, "body must hold an ids array");
      std::vector<std::string> list;
      for (const auto& id : ids) {
        if (!id.is_string()) throw Error(Errc::invalid_argument, "ids must be strings");
        list.push_back(id.get<std::string>());
      }
      return {200, store_->compare_clusters(list), "riseer.compare.v1"};
    }
    if (req.method != "GET") return error_response(405, "method_not_allowed", "use GET");
    if (p == "/api/v1/manifest") return {200, store_->manifest(), "riseer.manifest.v1"};
    if (p == "/api/v1/projection") return {200, store_->artifact("projection"), "riseer.projection.v1"};
    if (p == "/api/v1/segments") return {200, store_->artifact("segments"), "riseer.segments.v1"};
    if (p == "/api/v1/paths") return {200, store_->artifact("paths"), "riseer.paths.v1"};
    if (p == "/api/v1/indicators") return {200, store_->artifact("indicators"), "riseer.indicators.v1"};
    if (p == "/api/v1/snapshots") {
      json out = store_->artifact("snapshots");
      auto from = param(req, "from");
      auto to = param(req, "to");
      if (from || to) {
        const auto& rows = out.at("snapshots");
        const Month lo = from ? month_param(*from, "from")
                              : *Month::parse(rows.front().at("month").get<std::string>());
        const Month hi = to ? month_param(*to, "to")
                            : *Month::parse(rows.back().at("month").get<std::string>());
        out["snapshots"] = store_->query_range(lo, hi).at("snapshots");
      }
      return {200, out, "riseer.snapshots.v1"};
    }
    if (p == "/api/v1/range") {
      auto from = param(req, "from");
      auto to = param(req, "to");
      if (!from || !to) throw Error(Errc::invalid_argument, "range needs from and to");
      return {200, store_->query_range(month_param(*from, "from"), month_param(*to, "to")),
              "riseer.range.v1"};
    }
    if (p == "/api/v1/forecast") {
      std::optional<Tier> tier;
      std::optional<ModelKind> model;
      if (auto t = param(req, "tier"); t && *t != "all") {
        tier = parse_tier(*t);
        if (!tier) throw Error(Errc::invalid_argument, "unknown tier " + *t);
      }
      if (auto m = param(req, "model"); m && *m != "all") {
        model = parse_model(*m);
        if (!model) throw Error(Errc::invalid_argument, "unknown model " + *m);
      }
      return {200, store_->forecast(tier, model), "riseer.forecast.v1"};
    }
    if (p == "/api/v1/clusters") {
      std::optional<std::size_t> period;
      if (auto v = param(req, "period"); v && *v != "all") period = size_param(*v, "period");
      return {200, store_->clusters(period), "riseer.clusters.v1"};
    }
    if (std::regex_match(p, match, details)) {
      std::size_t grid = 100;
      if (auto g = param(req, "grid")) grid = size_param(*g, "grid");
      if (grid < 1 || grid > 1000) throw Error(Errc::invalid_argument, "grid must lie in [1, 1000]");
      return {200, store_->cluster_details(match[1].str(), grid), "riseer.cluster_details.v1"};
    }
    if (std::regex_match(p, match, schema)) {
      return {200, published_schema(match[1].str()), ""};
    }
    return error_response(404, "not_found", "no route " + p);
  } catch (const Error& e) {
    return error_response(status_for(e.code()), std::string(to_string(e.code())), e.what());
  } catch (const std::exception& e) {
    return error_response(500, "internal", e.what());
  }
}

struct HttpServer::Impl {
  std::shared_ptr<const ArtifactStore> store;
  ServeOptions options;
  ApiService api;
  httplib::Server server;
  std::thread thread;

  Impl(std::shared_ptr<const ArtifactStore> s, ServeOptions o)
      : store(s), options(std::move(o)), api(std::move(s)) {
    auto handler = [this](const httplib::Request& hreq, httplib::Response& hres) {
      ApiRequest req;
      req.method = hreq.method;
      req.path = hreq.path;
      for (const auto& [k, v] : hreq.params) req.query.emplace(k, v);
      req.body = hreq.body;
      const ApiResponse res = api.handle(req);
      hres.status = res.status;
      if (!res.schema.empty()) hres.set_header("X-Schema", res.schema);
      hres.set_content(res.body.dump(), "application/json");
    };
    server.Get(R"(/api/v1/.*)", handler);
    server.Post(R"(/api/v1/.*)", handler);
    if (options.ui_dir && !server.set_mount_point("/", options.ui_dir->string())) {
      throw Error(Errc::not_found, "ui directory " + options.ui_dir->string() + " not found");
    }
  }

  int bind() {
    const int port = options.port == 0 ? server.bind_to_any_port(options.host)
                                       : (server.bind_to_port(options.host, options.port)
                                              ? options.port
                                              : -1);
    if (port < 0) {
      throw Error(Errc::io_error, "cannot bind " + options.host + ":" + std::to_string(options.port));
    }
    return port;
  }
};

HttpServer::HttpServer(std::shared_ptr<const ArtifactStore> store, ServeOptions options)
    : impl_(std::make_unique<Impl>(std::move(store), std::move(options))) {}

HttpServer::~HttpServer() { stop(); }

int HttpServer::start() {
  const int port = impl_->bind();
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return port;
}

void HttpServer::run() {
  const int port = impl_->bind();
  spdlog::info("serving {} on http://{}:{}", impl_->store->directory().string(),
               impl_->options.host, port);
  impl_->server.listen_after_bind();
}

void HttpServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

std::filesystem::path store_from_env(const std::filesystem::path& fallback) {
  const char* env = std::getenv("RISEER_STORE");
  return env && *env ? std::filesystem::path(env) : fallback;
}

}  // namespace riseer
