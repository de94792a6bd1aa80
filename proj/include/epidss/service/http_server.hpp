#pragma once

#include <memory>
#include <string>

#include "epidss/service/api.hpp"

namespace epidss::service {

// JSON-over-HTTP front end for a DecisionService:
//   GET  /health, /regions, /forecast?region&kind&horizon, /backtest?region&kind&holdout, /snapshots
//   POST /allocate, /lockdown, /ingest, /snapshots/{seq}/replay
class HttpServer {
 public:
  explicit HttpServer(DecisionService& service);
  ~HttpServer();

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Binds the socket; port 0 picks a free one. Returns the bound port.
  int bind(const std::string& host, int port);
  // Serves until stop(); requires a successful bind().
  void serve();
  void stop();
  bool running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace epidss::service
