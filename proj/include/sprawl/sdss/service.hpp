#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>

#include "sprawl/ingest/regions.hpp"
#include "sprawl/sdss/bundle.hpp"

namespace sprawl::sdss {

struct Response {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

/// Read-only HTTP/JSON API over one bundle and its yearly label maps.
///
///   POST /api/predict          {"Attr": number, ...}
///   POST /api/impact           {"from": A, "to": B, "value": optional number}
///   GET  /api/attributes
///   GET  /api/rules?filter=...
///   GET  /api/map/{year}.geojson
///   GET  /api/model/summary
///
/// Failures answer 400 with {"code", "message"}; unknown years and routes 404.
class Service {
 public:
  Service(ModelBundle bundle, std::map<int, ingest::LabeledRegionSet> maps = {});

  // `query` is the decoded `filter` parameter when present.
  Response handle(std::string_view method, std::string_view path, std::string_view body,
                  const std::map<std::string, std::string>& query = {}) const;

  const ModelBundle& bundle() const noexcept { return bundle_; }

 private:
  Response predict(std::string_view body) const;
  Response impact(std::string_view body) const;
  Response attributes() const;
  Response rules(const std::map<std::string, std::string>& query) const;
  Response map(std::string_view year) const;
  Response summary() const;

  ModelBundle bundle_;
  std::map<int, std::string> geojson_;
};

/// Splits "host:port" (or ":port", or "port"). Throws Error{InvalidParameter}.
std::pair<std::string, int> parse_bind_address(std::string_view text);

/// httplib server around a Service. Runs on its own thread until stopped.
class HttpServer {
 public:
  explicit HttpServer(std::shared_ptr<const Service> service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Port 0 picks a free port. Returns the bound port.
  int start(const std::string& host, int port);
  // Blocks until stop() is called from another thread or a signal handler.
  void run(const std::string& host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace sprawl::sdss
