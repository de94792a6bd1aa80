#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <vector>

#include "epidss/allocator.hpp"
#include "epidss/case_data.hpp"
#include "epidss/error.hpp"
#include "epidss/forecaster.hpp"
#include "epidss/lockdown.hpp"

namespace epidss::service {

// JSON document; every key optional, unknown keys rejected.
struct AppConfig {
  std::string data_source;  // file path or http(s) URL; empty = wait for ingest
  CsvSchema csv_schema = CsvSchema::covid19india();
  RepairPolicy repair;
  ForecastConfig forecast;
  std::vector<ResourceItem> items = default_items();
  double blend = 0.5;
  LockdownOptions lockdown;
  std::string listen = "127.0.0.1:8080";
  std::string snapshot_log = "snapshots.ndjson";
  std::string static_dir;  // optional web UI bundle served at /

  static std::vector<ResourceItem> default_items();

  const ResourceItem* find_item(std::string_view name) const;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

AppConfig config_from_json(const nlohmann::json& document);
AppConfig load_config(const std::filesystem::path& path);

// EPIDSS_LISTEN and EPIDSS_DATA override listen address and data source.
void apply_env_overrides(AppConfig& config);

nlohmann::json to_json(const AppConfig& config);

// The part of the configuration that determines engine outputs.
nlohmann::json engine_config_json(const AppConfig& config);

nlohmann::json to_json(const ForecastConfig& config);
nlohmann::json to_json(const ResourceItem& item);
nlohmann::json to_json(const CsvSchema& schema);

// host:port split; throws ConfigError on malformed input.
std::pair<std::string, int> split_listen_address(const std::string& listen);

}  // namespace epidss::service
