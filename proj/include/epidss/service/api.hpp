#pragma once

// Transport-agnostic request handling shared by the HTTP server and the
// CLI. Every handler returns the exact JSON envelope both front ends emit.

#include <nlohmann/json.hpp>

#include <exception>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "epidss/error.hpp"
#include "epidss/service/config.hpp"
#include "epidss/service/data_source.hpp"
#include "epidss/service/snapshot_store.hpp"

namespace epidss::service {

struct ApiError {
  std::string code;  // machine token, e.g. "not_found"
  std::string message;
  nlohmann::json detail;  // null when absent
  int http_status = 500;
};

// Maps the in-flight exception onto its API error.
ApiError to_api_error(const std::exception_ptr& error);

nlohmann::json to_json(const ApiError& error);

// Process exit status the CLI uses for an API error code.
int exit_code_for(const std::string& code);

// Malformed request body or query; `path` is a JSON pointer to the field.
class RequestError : public Error {
 public:
  RequestError(std::string path, std::string message);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

class NotFoundError : public Error {
 public:
  NotFoundError(std::string what, std::string key);
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct ApiResponse {
  int status = 200;
  nlohmann::json body;  // {ok, data} or {ok, error}

  bool ok() const { return body.value("ok", false); }
  // Serialized body; identical bytes for the CLI and the HTTP server.
  std::string text() const { return body.dump() + "\n"; }
};

ApiResponse success(nlohmann::json data);
ApiResponse failure(const ApiError& error);

class DecisionService {
 public:
  // `store` may be null, in which case decisions are not recorded.
  explicit DecisionService(AppConfig config, std::shared_ptr<SnapshotStore> store = nullptr);

  const AppConfig& config() const { return config_; }
  SnapshotStore* store() const { return store_.get(); }

  // Replaces the served dataset atomically.
  void install(DatasetSnapshot snapshot);
  std::shared_ptr<const DatasetSnapshot> dataset() const;

  // Fetches config().data_source and installs the result.
  void refresh();

  ApiResponse regions() const;
  // {region, kind?, horizon?}
  ApiResponse forecast(const nlohmann::json& request);
  // {item, supply, claims: [{unit, demand, peak_active?}], blend?}
  ApiResponse allocate(const nlohmann::json& request);
  // {region?, availabilities: [{item, available}], mode?, horizon?}
  ApiResponse lockdown(const nlohmann::json& request);
  // {region, kind?, holdout?}
  ApiResponse backtest(const nlohmann::json& request) const;
  ApiResponse ingest(std::string_view csv, const std::string& source = "upload");
  ApiResponse snapshots() const;
  // Re-executes a recorded decision against the current dataset and config.
  ApiResponse replay(std::uint64_t seq) const;

  // Engine config in force plus dataset identity; recorded with decisions.
  nlohmann::json decision_context() const;

 private:
  nlohmann::json forecast_data(const nlohmann::json& request, const DatasetSnapshot* data) const;
  nlohmann::json allocate_data(const nlohmann::json& request, const DatasetSnapshot* data) const;
  nlohmann::json lockdown_data(const nlohmann::json& request, const DatasetSnapshot* data) const;

  nlohmann::json context_for(const DatasetSnapshot* data) const;
  ApiResponse execute(const std::string& kind, const nlohmann::json& request, const DatasetSnapshot* data) const;
  ApiResponse record(const std::string& kind, const nlohmann::json& request, ApiResponse response,
                     const nlohmann::json& context);

  AppConfig config_;
  std::shared_ptr<SnapshotStore> store_;
  mutable std::mutex dataset_mutex_;
  std::shared_ptr<const DatasetSnapshot> dataset_;
};

}  // namespace epidss::service
