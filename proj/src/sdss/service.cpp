#include "sprawl/sdss/service.hpp"

#include <charconv>
#include <thread>

#include "httplib.h"
#include "sprawl/error.hpp"
#include "sprawl/mapviz.hpp"
#include "sprawl/sdss/engine.hpp"

namespace sprawl::sdss {
namespace {

using nlohmann::json;

Response json_response(const json& j, int status = 200) { return {status, "application/json", j.dump()}; }

Response error_response(int status, std::string_view code, const std::string& message) {
  return json_response({{"code", code}, {"message", message}}, status);
}

Response error_response(const Error& e) {
  const int status = e.code() == ErrorCode::UnknownYear ? 404 : 400;
  return error_response(status, to_string(e.code()), e.what());
}

json parse_body(std::string_view body) {
  try {
    return json::parse(body);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidQuery, std::string("request body is not JSON: ") + e.what());
  }
}

}  // namespace

Service::Service(ModelBundle bundle, std::map<int, ingest::LabeledRegionSet> maps) : bundle_(std::move(bundle)) {
  for (const auto& [year, regions] : maps) geojson_.emplace(year, mapviz::export_geojson_text(regions));
}

Response Service::handle(std::string_view method, std::string_view path, std::string_view body,
                         const std::map<std::string, std::string>& query) const {
  try {
    if (method == "POST" && path == "/api/predict") return predict(body);
    if (method == "POST" && path == "/api/impact") return impact(body);
    if (method == "GET" && path == "/api/attributes") return attributes();
    if (method == "GET" && path == "/api/rules") return rules(query);
    if (method == "GET" && path == "/api/model/summary") return summary();
    constexpr std::string_view kMapPrefix = "/api/map/";
    constexpr std::string_view kMapSuffix = ".geojson";
    if (method == "GET" && path.starts_with(kMapPrefix) && path.ends_with(kMapSuffix)) {
      return map(path.substr(kMapPrefix.size(), path.size() - kMapPrefix.size() - kMapSuffix.size()));
    }
    return error_response(404, "NotFound", "no route for " + std::string(method) + " " + std::string(path));
  } catch (const Error& e) {
    return error_response(e);
  } catch (const std::exception& e) {
    return error_response(500, "Internal", e.what());
  }
}

Response Service::predict(std::string_view body) const {
  const auto j = parse_body(body);
  if (!j.is_object()) throw Error(ErrorCode::InvalidQuery, "predict expects a JSON object of attribute values");
  Assignment assignment;
  for (const auto& [name, value] : j.items()) {
    if (!value.is_number()) throw Error(ErrorCode::InvalidQuery, "value for '" + name + "' is not a number");
    assignment.emplace(name, value.get<double>());
  }
  return json_response(predict_sprawl(bundle_, assignment));
}

Response Service::impact(std::string_view body) const {
  const auto j = parse_body(body);
  if (!j.is_object() || !j.contains("from") || !j.contains("to") || !j["from"].is_string() ||
      !j["to"].is_string()) {
    throw Error(ErrorCode::InvalidQuery, "impact expects {\"from\": name, \"to\": name}");
  }
  std::optional<double> value;
  if (j.contains("value") && !j["value"].is_null()) {
    if (!j["value"].is_number()) throw Error(ErrorCode::InvalidQuery, "value must be a number");
    value = j["value"].get<double>();
  }
  return json_response(query_impact(bundle_, j["from"].get<std::string>(), j["to"].get<std::string>(), value));
}

Response Service::attributes() const {
  json out = json::array();
  for (const auto& a : bundle_.attributes) {
    json entry = {{"name", a.name}, {"units", a.units}, {"min", a.min}, {"max", a.max}};
    if (const auto* bins = bundle_.binning.find(a.name)) {
      entry["bins"] = bins->labels;
      entry["cuts"] = bins->cuts;
    }
    out.push_back(std::move(entry));
  }
  return json_response({{"attributes", std::move(out)}, {"target", bundle_.target_column}});
}

Response Service::rules(const std::map<std::string, std::string>& query) const {
  rules::RuleFilter filter;
  if (auto it = query.find("filter"); it != query.end()) filter = rules::parse_rule_filter(it->second);
  const auto matched = rules::filter_rules(bundle_.rules, filter);
  return json_response({{"count", matched.size()}, {"rules", matched}});
}

Response Service::map(std::string_view year_text) const {
  int year = 0;
  const auto [ptr, ec] = std::from_chars(year_text.data(), year_text.data() + year_text.size(), year);
  if (ec != std::errc{} || ptr != year_text.data() + year_text.size()) {
    throw Error(ErrorCode::InvalidQuery, "year must be an integer, got '" + std::string(year_text) + "'");
  }
  const auto it = geojson_.find(year);
  if (it == geojson_.end()) throw Error(ErrorCode::UnknownYear, "no map for year " + std::to_string(year));
  return {200, "application/geo+json", it->second};
}

Response Service::summary() const {
  json years = json::array();
  for (const auto& [year, _] : geojson_) years.push_back(year);
  json out = {{"method", bundle_.method},
              {"format_version", bundle_.format_version},
              {"rule_count", bundle_.rules.size()},
              {"training_rows", bundle_.training_rows},
              {"prior_y", bundle_.prior_y},
              {"training_params", bundle_.training_params},
              {"dataset_fingerprint", bundle_.dataset_fingerprint},
              {"years", std::move(years)},
              {"tree", bundle_.single_tree ? json(tree::render_tree(*bundle_.single_tree)) : json(nullptr)}};
  if (bundle_.ensemble) {
    out["ensemble"] = tree::render_ensemble(*bundle_.ensemble);
    out["members"] = bundle_.ensemble->members.size();
  }
  return json_response(out);
}

std::pair<std::string, int> parse_bind_address(std::string_view text) {
  std::string host = "127.0.0.1";
  std::string_view port_text = text;
  if (const auto colon = text.rfind(':'); colon != std::string_view::npos) {
    if (colon > 0) host = std::string(text.substr(0, colon));
    port_text = text.substr(colon + 1);
  }
  int port = -1;
  const auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
  if (ec != std::errc{} || ptr != port_text.data() + port_text.size() || port < 0 || port > 65535) {
    throw Error(ErrorCode::InvalidParameter, "bad bind address '" + std::string(text) + "'");
  }
  return {host, port};
}

struct HttpServer::Impl {
  std::shared_ptr<const Service> service;
  httplib::Server server;
  std::thread thread;
};

HttpServer::HttpServer(std::shared_ptr<const Service> service) : impl_(std::make_unique<Impl>()) {
  impl_->service = std::move(service);
  auto handler = [svc = impl_->service](const httplib::Request& req, httplib::Response& res) {
    std::map<std::string, std::string> query;
    if (req.has_param("filter")) query.emplace("filter", req.get_param_value("filter"));
    const auto out = svc->handle(req.method, req.path, req.body, query);
    res.status = out.status;
    res.set_content(out.body, out.content_type);
  };
  impl_->server.Get(R"(/api/.*)", handler);
  impl_->server.Post(R"(/api/.*)", handler);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) throw Error(ErrorCode::Io, "cannot bind " + host + ":" + std::to_string(port));
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void HttpServer::run(const std::string& host, int port) {
  if (!impl_->server.listen(host, port)) throw Error(ErrorCode::Io, "cannot listen on " + host + ":" + std::to_string(port));
}

void HttpServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace sprawl::sdss
