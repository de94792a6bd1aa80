#include "epidss/service/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace epidss::service {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& object, const std::set<std::string>& allowed, const std::string& where) {
  if (!object.is_object()) {
    throw ConfigError(where + " must be an object");
  }
  for (const auto& [key, value] : object.items()) {
    if (!allowed.count(key)) {
      throw ConfigError("unknown key '" + where + "/" + key + "'");
    }
  }
}

template <typename T>
T get_as(const json& object, const std::string& key, const std::string& where) {
  try {
    return object.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("'" + where + "/" + key + "' has the wrong type");
  }
}

CsvSchema schema_from_json(const json& j) {
  reject_unknown_keys(j, {"date", "region", "region_name", "confirmed", "recovered", "deceased", "date_format"},
                      "/csv_schema");
  CsvSchema schema;
  if (j.contains("date")) schema.date_column = get_as<std::string>(j, "date", "/csv_schema");
  if (j.contains("region")) schema.region_column = get_as<std::string>(j, "region", "/csv_schema");
  if (j.contains("confirmed")) schema.confirmed_column = get_as<std::string>(j, "confirmed", "/csv_schema");
  if (j.contains("recovered")) schema.recovered_column = get_as<std::string>(j, "recovered", "/csv_schema");
  if (j.contains("deceased")) schema.deceased_column = get_as<std::string>(j, "deceased", "/csv_schema");
  if (j.contains("region_name") && !j.at("region_name").is_null()) {
    schema.region_name_column = get_as<std::string>(j, "region_name", "/csv_schema");
  }
  if (j.contains("date_format")) {
    auto format = date_format_from_string(get_as<std::string>(j, "date_format", "/csv_schema"));
    if (!format) {
      throw ConfigError("'/csv_schema/date_format' must be one of auto, iso, dd-mon-yy");
    }
    schema.date_format = *format;
  }
  return schema;
}

ForecastConfig forecast_from_json(const json& j) {
  reject_unknown_keys(j, {"window", "horizon", "discount", "model_order", "transform"}, "/forecast");
  ForecastConfig config;
  if (j.contains("window")) config.window = get_as<int>(j, "window", "/forecast");
  if (j.contains("horizon")) config.horizon = get_as<int>(j, "horizon", "/forecast");
  if (j.contains("discount")) config.discount = get_as<double>(j, "discount", "/forecast");
  if (j.contains("model_order")) config.model_order = get_as<int>(j, "model_order", "/forecast");
  if (j.contains("transform") && !j.at("transform").is_null()) {
    auto t = transform_from_string(get_as<std::string>(j, "transform", "/forecast"));
    if (!t) {
      throw ConfigError("'/forecast/transform' must be identity or log1p");
    }
    config.transform = *t;
  }
  try {
    validate(config);
  } catch (const ForecastConfigError& err) {
    throw ConfigError(std::string("/forecast: ") + err.what());
  }
  return config;
}

}  // namespace

std::vector<ResourceItem> AppConfig::default_items() {
  // Placeholder coefficients; authorities are expected to set their own.
  return {
      {"oxygen", "MT", 0.0015},
      {"ventilator", "count", 0.005},
  };
}

const ResourceItem* AppConfig::find_item(std::string_view name) const {
  for (const auto& item : items) {
    if (item.name == name) {
      return &item;
    }
  }
  return nullptr;
}

AppConfig config_from_json(const json& document) {
  reject_unknown_keys(document,
                      {"data_source", "csv_schema", "repair", "forecast", "items", "blend", "lockdown", "listen",
                       "snapshot_log", "static_dir"},
                      "");
  AppConfig config;
  if (document.contains("data_source")) config.data_source = get_as<std::string>(document, "data_source", "");
  if (document.contains("csv_schema")) config.csv_schema = schema_from_json(document.at("csv_schema"));
  if (document.contains("repair")) {
    const auto& r = document.at("repair");
    reject_unknown_keys(r, {"dips"}, "/repair");
    if (r.contains("dips")) {
      auto policy = dip_policy_from_string(get_as<std::string>(r, "dips", "/repair"));
      if (!policy) {
        throw ConfigError("'/repair/dips' must be clamp or reject");
      }
      config.repair.dips = *policy;
    }
  }
  if (document.contains("forecast")) config.forecast = forecast_from_json(document.at("forecast"));
  if (document.contains("items")) {
    const auto& items = document.at("items");
    if (!items.is_array()) {
      throw ConfigError("'/items' must be an array");
    }
    config.items.clear();
    std::set<std::string> names;
    for (std::size_t i = 0; i < items.size(); ++i) {
      const std::string where = "/items/" + std::to_string(i);
      reject_unknown_keys(items[i], {"name", "unit", "kappa"}, where);
      ResourceItem item;
      item.name = get_as<std::string>(items[i], "name", where);
      item.unit = items[i].contains("unit") ? get_as<std::string>(items[i], "unit", where) : "";
      item.kappa = items[i].contains("kappa") ? get_as<double>(items[i], "kappa", where) : 0.0;
      if (item.name.empty() || !names.insert(item.name).second) {
        throw ConfigError("'" + where + "/name' must be non-empty and unique");
      }
      if (!(item.kappa >= 0.0) || !std::isfinite(item.kappa)) {
        throw ConfigError("'" + where + "/kappa' must be finite and non-negative");
      }
      config.items.push_back(item);
    }
  }
  if (document.contains("blend")) {
    config.blend = get_as<double>(document, "blend", "");
    if (!(config.blend >= 0.0 && config.blend <= 1.0)) {
      throw ConfigError("'/blend' must be within [0, 1]");
    }
  }
  if (document.contains("lockdown")) {
    const auto& l = document.at("lockdown");
    reject_unknown_keys(l, {"mode", "horizon"}, "/lockdown");
    if (l.contains("mode")) {
      auto mode = lockdown_mode_from_string(get_as<std::string>(l, "mode", "/lockdown"));
      if (!mode) {
        throw ConfigError("'/lockdown/mode' must be day_capacity or stock_depletion");
      }
      config.lockdown.mode = *mode;
    }
    if (l.contains("horizon")) {
      config.lockdown.horizon = get_as<int>(l, "horizon", "/lockdown");
      if (config.lockdown.horizon < 1 || config.lockdown.horizon > kLockdownHorizon) {
        throw ConfigError("'/lockdown/horizon' must be within [1, 14]");
      }
    }
  }
  if (config.lockdown.horizon > config.forecast.horizon) {
    throw ConfigError("'/lockdown/horizon' exceeds '/forecast/horizon'");
  }
  if (document.contains("listen")) config.listen = get_as<std::string>(document, "listen", "");
  if (document.contains("snapshot_log")) config.snapshot_log = get_as<std::string>(document, "snapshot_log", "");
  if (document.contains("static_dir")) config.static_dir = get_as<std::string>(document, "static_dir", "");
  split_listen_address(config.listen);
  return config;
}

AppConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot read config file " + path.string());
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  json document;
  try {
    document = json::parse(buffer.str());
  } catch (const json::parse_error& err) {
    throw ConfigError(path.string() + ": " + err.what());
  }
  return config_from_json(document);
}

void apply_env_overrides(AppConfig& config) {
  if (const char* listen = std::getenv("EPIDSS_LISTEN"); listen && *listen) {
    config.listen = listen;
    split_listen_address(config.listen);
  }
  if (const char* data = std::getenv("EPIDSS_DATA"); data && *data) {
    config.data_source = data;
  }
}

json to_json(const ForecastConfig& config) {
  return {{"window", config.window},
          {"horizon", config.horizon},
          {"discount", config.discount},
          {"model_order", config.model_order},
          {"transform", config.transform ? json(to_string(*config.transform)) : json(nullptr)}};
}

json to_json(const ResourceItem& item) {
  return {{"name", item.name}, {"unit", item.unit}, {"kappa", item.kappa}};
}

json to_json(const CsvSchema& schema) {
  return {{"date", schema.date_column},
          {"region", schema.region_column},
          {"region_name", schema.region_name_column ? json(*schema.region_name_column) : json(nullptr)},
          {"confirmed", schema.confirmed_column},
          {"recovered", schema.recovered_column},
          {"deceased", schema.deceased_column},
          {"date_format", to_string(schema.date_format)}};
}

json engine_config_json(const AppConfig& config) {
  json items = json::array();
  for (const auto& item : config.items) {
    items.push_back(to_json(item));
  }
  return {{"csv_schema", to_json(config.csv_schema)},
          {"repair", {{"dips", to_string(config.repair.dips)}}},
          {"forecast", to_json(config.forecast)},
          {"items", items},
          {"blend", config.blend},
          {"lockdown", {{"mode", to_string(config.lockdown.mode)}, {"horizon", config.lockdown.horizon}}}};
}

json to_json(const AppConfig& config) {
  json j = engine_config_json(config);
  j["data_source"] = config.data_source;
  j["listen"] = config.listen;
  j["snapshot_log"] = config.snapshot_log;
  j["static_dir"] = config.static_dir;
  return j;
}

std::pair<std::string, int> split_listen_address(const std::string& listen) {
  const auto colon = listen.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == listen.size()) {
    throw ConfigError("listen address must look like host:port, got '" + listen + "'");
  }
  int port = 0;
  try {
    std::size_t used = 0;
    port = std::stoi(listen.substr(colon + 1), &used);
    if (used != listen.size() - colon - 1) {
      throw std::invalid_argument("trailing characters");
    }
  } catch (const std::exception&) {
    throw ConfigError("listen port is not a number in '" + listen + "'");
  }
  if (port < 0 || port > 65535) {
    throw ConfigError("listen port out of range in '" + listen + "'");
  }
  return {listen.substr(0, colon), port};
}

}  // namespace epidss::service
