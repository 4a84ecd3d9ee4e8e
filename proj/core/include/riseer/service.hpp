#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "riseer/store.hpp"

namespace riseer {

struct ApiRequest {
  std::string method = "GET";
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
};

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
  std::string schema;  // published schema id the body conforms to
};

/// Routes /api/v1/* requests onto the read-only store. Errors become
/// {code, message} bodies with a 4xx/5xx status.
class ApiService {
 public:
  explicit ApiService(std::shared_ptr<const ArtifactStore> store);

  ApiResponse handle(const ApiRequest& request) const;

 private:
  std::shared_ptr<const ArtifactStore> store_;
};

struct ServeOptions {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0: any free port
  std::optional<std::filesystem::path> ui_dir;  // static bundle mounted at /
};

/// HTTP/1.1 front end over ApiService.
class HttpServer {
 public:
  HttpServer(std::shared_ptr<const ArtifactStore> store, ServeOptions options);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds and serves on a background thread; returns the bound port.
  int start();
  /// Binds and serves on the calling thread until stop().
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Store directory from RISEER_STORE, else the fallback.
std::filesystem::path store_from_env(const std::filesystem::path& fallback);

}  // namespace riseer
