#include "epidss/service/http_server.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

#include <charconv>

namespace epidss::service {

using nlohmann::json;

namespace {

void send(httplib::Response& res, const ApiResponse& response) {
  res.status = response.status;
  res.set_content(response.text(), "application/json");
}

void send_error(httplib::Response& res) { send(res, failure(to_api_error(std::current_exception()))); }

json parse_body(const httplib::Request& req) {
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& err) {
    throw RequestError("/", std::string("body is not valid JSON: ") + err.what());
  }
}

int query_int(const httplib::Request& req, const std::string& key) {
  const auto value = req.get_param_value(key);
  int out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (value.empty() || ec != std::errc() || ptr != value.data() + value.size()) {
    throw RequestError("/" + key, "must be an integer");
  }
  return out;
}

json query_request(const httplib::Request& req, std::initializer_list<const char*> strings,
                   std::initializer_list<const char*> integers) {
  json request = json::object();
  for (const char* key : strings) {
    if (req.has_param(key)) request[key] = req.get_param_value(key);
  }
  for (const char* key : integers) {
    if (req.has_param(key)) request[key] = query_int(req, key);
  }
  return request;
}

}  // namespace

struct HttpServer::Impl {
  DecisionService& service;
  httplib::Server server;
  bool bound = false;

  explicit Impl(DecisionService& s) : service(s) { routes(); }

  void routes() {
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
    server.set_payload_max_length(64 * 1024 * 1024);

    server.Get("/health", [](const httplib::Request&, httplib::Response& res) {
      send(res, success({{"status", "up"}}));
    });
    server.Get("/regions", [this](const httplib::Request&, httplib::Response& res) { send(res, service.regions()); });
    server.Get("/forecast", [this](const httplib::Request& req, httplib::Response& res) {
      try {
        send(res, service.forecast(query_request(req, {"region", "kind"}, {"horizon"})));
      } catch (...) {
        send_error(res);
      }
    });
    server.Get("/backtest", [this](const httplib::Request& req, httplib::Response& res) {
      try {
        send(res, service.backtest(query_request(req, {"region", "kind"}, {"holdout"})));
      } catch (...) {
        send_error(res);
      }
    });
    server.Post("/allocate", [this](const httplib::Request& req, httplib::Response& res) {
      try {
        send(res, service.allocate(parse_body(req)));
      } catch (...) {
        send_error(res);
      }
    });
    server.Post("/lockdown", [this](const httplib::Request& req, httplib::Response& res) {
      try {
        send(res, service.lockdown(parse_body(req)));
      } catch (...) {
        send_error(res);
      }
    });
    server.Post("/ingest", [this](const httplib::Request& req, httplib::Response& res) {
      if (req.is_multipart_form_data()) {
        if (!req.has_file("file")) {
          send(res, failure(to_api_error(std::make_exception_ptr(
                        RequestError("/file", "multipart upload needs a 'file' part")))));
          return;
        }
        const auto file = req.get_file_value("file");
        send(res, service.ingest(file.content, file.filename.empty() ? "upload" : file.filename));
        return;
      }
      send(res, service.ingest(req.body));
    });
    server.Get("/snapshots", [this](const httplib::Request&, httplib::Response& res) {
      send(res, service.snapshots());
    });
    server.Post(R"(/snapshots/(\d+)/replay)", [this](const httplib::Request& req, httplib::Response& res) {
      try {
        send(res, service.replay(std::stoull(req.matches[1].str())));
      } catch (...) {
        send_error(res);
      }
    });
    server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
      send(res, failure(to_api_error(ep)));
    });
    server.set_logger([](const httplib::Request& req, const httplib::Response& res) {
      spdlog::debug("{} {} -> {}", req.method, req.path, res.status);
    });

    if (!service.config().static_dir.empty() && !server.set_mount_point("/", service.config().static_dir)) {
      spdlog::warn("static directory {} not found; web UI not served", service.config().static_dir);
    }
  }
};

HttpServer::HttpServer(DecisionService& service) : impl_(std::make_unique<Impl>(service)) {}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  int bound_port = port;
  if (port == 0) {
    bound_port = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound_port = -1;
  }
  if (bound_port < 0) {
    throw ConfigError("cannot bind " + host + ":" + std::to_string(port));
  }
  impl_->bound = true;
  return bound_port;
}

void HttpServer::serve() {
  if (!impl_->bound) {
    throw ConfigError("serve() called before bind()");
  }
  impl_->server.listen_after_bind();
}

void HttpServer::stop() {
  if (impl_ && impl_->server.is_running()) {
    impl_->server.stop();
  }
}

bool HttpServer::running() const { return impl_->server.is_running(); }

}  // namespace epidss::service
