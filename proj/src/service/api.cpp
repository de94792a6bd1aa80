#include "epidss/service/api.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "epidss/allocator.hpp"
#include "epidss/forecaster.hpp"
#include "epidss/lockdown.hpp"

namespace epidss::service {

using nlohmann::json;

namespace {

constexpr int kPeakDays = 7;

ApiError make_error(std::string code, int status, std::string message, json detail = nullptr) {
  return ApiError{std::move(code), std::move(message), std::move(detail), status};
}

std::string join_pointer(const std::string& base, const std::string& key) { return base + "/" + key; }

const json& field(const json& object, const std::string& key, const std::string& base) {
  if (!object.is_object()) {
    throw RequestError(base.empty() ? "/" : base, "expected an object");
  }
  auto it = object.find(key);
  if (it == object.end() || it->is_null()) {
    throw RequestError(join_pointer(base, key), "is required");
  }
  return *it;
}

bool has(const json& object, const std::string& key) {
  return object.is_object() && object.contains(key) && !object.at(key).is_null();
}

double number(const json& value, const std::string& path) {
  if (!value.is_number()) {
    throw RequestError(path, "must be a number");
  }
  const double v = value.get<double>();
  if (!std::isfinite(v)) {
    throw RequestError(path, "must be finite");
  }
  return v;
}

double non_negative(const json& value, const std::string& path) {
  const double v = number(value, path);
  if (v < 0.0) {
    throw RequestError(path, "must be non-negative");
  }
  return v;
}

int integer(const json& value, const std::string& path) {
  if (!value.is_number_integer()) {
    throw RequestError(path, "must be an integer");
  }
  return value.get<int>();
}

std::string text(const json& value, const std::string& path) {
  if (!value.is_string()) {
    throw RequestError(path, "must be a string");
  }
  return value.get<std::string>();
}

void reject_unknown(const json& object, const std::set<std::string>& allowed, const std::string& base) {
  if (!object.is_object()) {
    throw RequestError(base.empty() ? "/" : base, "expected an object");
  }
  for (const auto& [key, value] : object.items()) {
    if (!allowed.count(key)) {
      throw RequestError(join_pointer(base, key), "unknown field");
    }
  }
}

std::string one_decimal(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.1f", value);
  return buffer;
}

json points_json(const std::vector<ForecastPoint>& points) {
  json out = json::array();
  for (const auto& p : points) {
    out.push_back({{"date", format_iso(p.date)}, {"value", p.value}});
  }
  return out;
}

json region_json(const RegionId& region) { return {{"code", region.code}, {"name", region.name}}; }

const DatasetSnapshot& require_dataset(const DatasetSnapshot* data) {
  if (data == nullptr) {
    throw NotFoundError("no dataset loaded; ingest a CSV first", "dataset");
  }
  return *data;
}

const CaseSeries& require_region(const DatasetSnapshot* data, const std::string& code) {
  const auto* series = require_dataset(data).dataset.find(code);
  if (series == nullptr) {
    throw NotFoundError("unknown region '" + code + "'", code);
  }
  return *series;
}

ResourceItem resolve_item(const json& value, const AppConfig& config, const std::string& path) {
  if (value.is_string()) {
    const auto name = value.get<std::string>();
    if (const auto* item = config.find_item(name)) {
      return *item;
    }
    throw NotFoundError("unknown item '" + name + "'", name);
  }
  reject_unknown(value, {"name", "unit", "kappa"}, path);
  ResourceItem item;
  item.name = text(field(value, "name", path), join_pointer(path, "name"));
  if (item.name.empty()) {
    throw RequestError(join_pointer(path, "name"), "must be non-empty");
  }
  const auto* known = config.find_item(item.name);
  item.unit = has(value, "unit") ? text(value.at("unit"), join_pointer(path, "unit")) : (known ? known->unit : "");
  item.kappa = has(value, "kappa") ? non_negative(value.at("kappa"), join_pointer(path, "kappa"))
                                   : (known ? known->kappa : 0.0);
  return item;
}

}  // namespace

RequestError::RequestError(std::string path, std::string message)
    : Error(path + ": " + message), path_(std::move(path)) {}

NotFoundError::NotFoundError(std::string what, std::string key) : Error(std::move(what)), key_(std::move(key)) {}

ApiError to_api_error(const std::exception_ptr& error) {
  try {
    std::rethrow_exception(error);
  } catch (const RequestError& e) {
    return make_error("invalid_request", 400, e.what(), {{"path", e.path()}});
  } catch (const NotFoundError& e) {
    return make_error("not_found", 404, e.what(), {{"key", e.key()}});
  } catch (const ConfigError& e) {
    return make_error("config_invalid", 500, e.what());
  } catch (const SourceError& e) {
    return make_error("source_unavailable", 503, e.what(), {{"retryable", true}});
  } catch (const DataError& e) {
    json detail = e.detail();
    detail["retryable"] = false;
    return make_error("data_invalid", 422, e.what(), detail);
  } catch (const StorageError& e) {
    return make_error("storage_error", 500, e.what());
  } catch (const CsvError& e) {
    static constexpr const char* kinds[] = {"empty_input", "schema", "row"};
    json detail = {{"kind", kinds[static_cast<int>(e.kind())]}};
    if (e.line() > 0) detail["line"] = e.line();
    if (!e.column().empty()) detail["column"] = e.column();
    return make_error("csv_invalid", 400, e.what(), detail);
  } catch (const ValidationError& e) {
    return make_error("series_invalid", 422, e.what(), {{"date", format_iso(e.date())}, {"field", e.field()}});
  } catch (const ForecastConfigError& e) {
    return make_error("forecast_config_invalid", 400, e.what());
  } catch (const InsufficientDataError& e) {
    return make_error("insufficient_data", 422, e.what(), {{"required", e.required()}, {"available", e.available()}});
  } catch (const FitError& e) {
    json condition = std::isfinite(e.condition()) ? json(e.condition()) : json(nullptr);
    return make_error("fit_failed", 422, e.what(), {{"condition", condition}});
  } catch (const ForecastRangeError& e) {
    return make_error("forecast_range", 400, e.what());
  } catch (const AllocationError& e) {
    json detail = e.item().empty() ? json(nullptr) : json{{"item", e.item()}};
    if (e.kind() == AllocationError::Kind::degenerate) {
      return make_error("allocation_degenerate", 422, e.what(), detail);
    }
    return make_error("allocation_invalid", 400, e.what(), detail);
  } catch (const LockdownError& e) {
    if (e.kind() == LockdownError::Kind::insufficient_horizon) {
      return make_error("insufficient_horizon", 422, e.what());
    }
    return make_error("lockdown_invalid", 400, e.what());
  } catch (const json::exception& e) {
    return make_error("invalid_request", 400, e.what(), {{"path", "/"}});
  } catch (const std::exception& e) {
    return make_error("internal", 500, e.what());
  } catch (...) {
    return make_error("internal", 500, "unknown error");
  }
}

json to_json(const ApiError& error) {
  json j = {{"code", error.code}, {"message", error.message}};
  if (!error.detail.is_null()) {
    j["detail"] = error.detail;
  }
  return j;
}

int exit_code_for(const std::string& code) {
  if (code == "invalid_request" || code == "csv_invalid" || code == "forecast_config_invalid" ||
      code == "allocation_invalid" || code == "lockdown_invalid" || code == "forecast_range" ||
      code == "config_invalid") {
    return 2;
  }
  if (code == "not_found") return 3;
  if (code == "source_unavailable") return 5;
  if (code == "storage_error") return 6;
  if (code == "internal") return 1;
  return 4;  // engine refused the input
}

ApiResponse success(json data) { return {200, {{"ok", true}, {"data", std::move(data)}}}; }

ApiResponse failure(const ApiError& error) { return {error.http_status, {{"ok", false}, {"error", to_json(error)}}}; }

DecisionService::DecisionService(AppConfig config, std::shared_ptr<SnapshotStore> store)
    : config_(std::move(config)), store_(std::move(store)) {}

void DecisionService::install(DatasetSnapshot snapshot) {
  auto fresh = std::make_shared<const DatasetSnapshot>(std::move(snapshot));
  std::lock_guard<std::mutex> lock(dataset_mutex_);
  dataset_ = std::move(fresh);
}

std::shared_ptr<const DatasetSnapshot> DecisionService::dataset() const {
  std::lock_guard<std::mutex> lock(dataset_mutex_);
  return dataset_;
}

void DecisionService::refresh() { install(fetch_dataset(config_.data_source, config_.csv_schema, config_.repair)); }

json DecisionService::decision_context() const { return context_for(dataset().get()); }

json DecisionService::context_for(const DatasetSnapshot* data) const {
  json context = engine_config_json(config_);
  context["dataset"] = data ? json{{"source", data->source}, {"digest", data->digest}} : json(nullptr);
  return context;
}

ApiResponse DecisionService::regions() const {
  try {
    const auto data = dataset();
    const auto& snapshot = require_dataset(data.get());
    json list = json::array();
    for (const auto& s : snapshot.dataset.series()) {
      json entry = region_json(s.region);
      entry["days"] = s.records.size();
      if (!s.records.empty()) {
        entry["first_date"] = format_iso(s.records.front().date);
        entry["last_date"] = format_iso(s.records.back().date);
      }
      list.push_back(entry);
    }
    return success(list);
  } catch (...) {
    return failure(to_api_error(std::current_exception()));
  }
}

json DecisionService::forecast_data(const json& request, const DatasetSnapshot* data) const {
  reject_unknown(request, {"region", "kind", "horizon"}, "");
  const auto code = text(field(request, "region", ""), "/region");
  SeriesKind kind = SeriesKind::active;
  if (has(request, "kind")) {
    auto parsed = series_kind_from_string(text(request.at("kind"), "/kind"));
    if (!parsed) {
      throw RequestError("/kind", "must be one of confirmed, recovered, deceased, active");
    }
    kind = *parsed;
  }
  ForecastConfig config = config_.forecast;
  if (has(request, "horizon")) {
    config.horizon = integer(request.at("horizon"), "/horizon");
  }
  const auto& series = require_region(data, code);
  const auto result = epidss::forecast(series, kind, config);

  const auto observed_values = extract(series, kind);
  json observed = json::array();
  const std::size_t first = observed_values.size() - static_cast<std::size_t>(config.window);
  for (std::size_t i = first; i < observed_values.size(); ++i) {
    observed.push_back({{"date", format_iso(series.records[i].date)}, {"value", observed_values[i]}});
  }
  return {{"region", region_json(series.region)},
          {"kind", to_string(kind)},
          {"horizon", config.horizon},
          {"points", points_json(result.points)},
          {"observed", observed},
          {"model",
           {{"coefficients", result.model.coefficients},
            {"fit_window_end", format_iso(*result.model.fit_window_end)},
            {"transform", to_string(result.model.transform)},
            {"residual_norm", result.model.residual_norm},
            {"condition", result.model.condition},
            {"ridge_applied", result.model.ridge_applied},
            {"window", config.window},
            {"discount", config.discount},
            {"model_order", config.model_order}}}};
}

json DecisionService::allocate_data(const json& request, const DatasetSnapshot* data) const {
  reject_unknown(request, {"item", "supply", "claims", "blend"}, "");
  AllocationProblem problem;
  problem.item = resolve_item(field(request, "item", ""), config_, "/item");
  problem.supply = non_negative(field(request, "supply", ""), "/supply");
  problem.blend = config_.blend;
  if (has(request, "blend")) {
    problem.blend = non_negative(request.at("blend"), "/blend");
    if (problem.blend > 1.0) {
      throw RequestError("/blend", "must be within [0, 1]");
    }
  }
  const auto& claims = field(request, "claims", "");
  if (!claims.is_array() || claims.empty()) {
    throw RequestError("/claims", "must be a non-empty array");
  }
  std::vector<bool> forecasted;
  for (std::size_t i = 0; i < claims.size(); ++i) {
    const std::string base = "/claims/" + std::to_string(i);
    reject_unknown(claims[i], {"unit", "demand", "peak_active"}, base);
    UnitClaim claim;
    const auto code = text(field(claims[i], "unit", base), base + "/unit");
    if (code.empty()) {
      throw RequestError(base + "/unit", "must be non-empty");
    }
    claim.demand = non_negative(field(claims[i], "demand", base), base + "/demand");
    const CaseSeries* series = data ? data->dataset.find(code) : nullptr;
    claim.unit = series ? series->region : RegionId{code, resolve_region(code).name};
    if (has(claims[i], "peak_active")) {
      claim.peak_active = non_negative(claims[i].at("peak_active"), base + "/peak_active");
      forecasted.push_back(false);
    } else {
      const auto& s = require_region(data, code);
      ForecastConfig cfg = config_.forecast;
      cfg.horizon = std::max(cfg.horizon, kPeakDays);
      claim.peak_active = peak_active(epidss::forecast(s, SeriesKind::active, cfg), kPeakDays);
      forecasted.push_back(true);
    }
    problem.claims.push_back(claim);
  }

  const auto result = epidss::allocate(problem);
  json awards = json::array();
  double total_demand = 0.0;
  double total_awarded = 0.0;
  for (std::size_t i = 0; i < problem.claims.size(); ++i) {
    const auto& c = problem.claims[i];
    total_demand += c.demand;
    total_awarded += result.awards[i];
    awards.push_back({{"unit", c.unit.code},
                      {"name", c.unit.name},
                      {"demand", c.demand},
                      {"peak_active", c.peak_active},
                      {"peak_active_source", forecasted[i] ? "forecast" : "request"},
                      {"effective_demand", result.effective_demands[i]},
                      {"award", result.awards[i]},
                      {"award_display", one_decimal(result.awards[i])}});
  }
  return {{"item", to_json(problem.item)},
          {"supply", problem.supply},
          {"blend", problem.blend},
          {"total_demand", total_demand},
          {"total_awarded", total_awarded},
          {"total_awarded_display", one_decimal(total_awarded)},
          {"exhausted", result.exhausted},
          {"scale", result.scale ? json(*result.scale) : json(nullptr)},
          {"awards", awards}};
}

json DecisionService::lockdown_data(const json& request, const DatasetSnapshot* data) const {
  reject_unknown(request, {"region", "availabilities", "mode", "horizon"}, "");
  std::string code;
  if (has(request, "region")) {
    code = text(request.at("region"), "/region");
  } else {
    const auto& snapshot = require_dataset(data);
    if (snapshot.dataset.size() != 1) {
      throw RequestError("/region", "is required when the dataset holds several regions");
    }
    code = snapshot.dataset.series().front().region.code;
  }
  LockdownOptions options = config_.lockdown;
  if (has(request, "mode")) {
    auto mode = lockdown_mode_from_string(text(request.at("mode"), "/mode"));
    if (!mode) {
      throw RequestError("/mode", "must be day_capacity or stock_depletion");
    }
    options.mode = *mode;
  }
  if (has(request, "horizon")) {
    options.horizon = integer(request.at("horizon"), "/horizon");
  }
  const auto& list = field(request, "availabilities", "");
  if (!list.is_array() || list.empty()) {
    throw RequestError("/availabilities", "must be a non-empty array");
  }
  std::vector<AvailabilityEntry> entries;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string base = "/availabilities/" + std::to_string(i);
    reject_unknown(list[i], {"item", "available"}, base);
    AvailabilityEntry entry;
    entry.item = resolve_item(field(list[i], "item", base), config_, base + "/item");
    entry.available_per_day = non_negative(field(list[i], "available", base), base + "/available");
    entries.push_back(entry);
  }

  const auto& series = require_region(data, code);
  const auto active = epidss::forecast(series, SeriesKind::active, config_.forecast);
  const auto assessment = assess(entries, active, options);

  json items = json::array();
  for (const auto& item : assessment.items) {
    json breaches = json::array();
    for (const auto& b : item.breaches) {
      breaches.push_back({{"date", format_iso(b.date)}, {"demand", b.forecast_demand}, {"available", b.availability}});
    }
    items.push_back({{"item", to_json(item.item)},
                     {"available", item.availability},
                     {"demand", item.demand},
                     {"breaches", breaches}});
  }
  std::vector<ForecastPoint> shown(active.points.begin(), active.points.begin() + assessment.horizon);
  return {{"region", region_json(series.region)},
          {"recommendation", to_string(assessment.recommendation)},
          {"horizon", assessment.horizon},
          {"mode", to_string(assessment.mode)},
          {"active_forecast", points_json(shown)},
          {"items", items}};
}

ApiResponse DecisionService::execute(const std::string& kind, const json& request,
                                     const DatasetSnapshot* data) const {
  try {
    if (kind == "forecast") return success(forecast_data(request, data));
    if (kind == "allocation") return success(allocate_data(request, data));
    if (kind == "lockdown") return success(lockdown_data(request, data));
    throw RequestError("/kind", "unknown decision kind '" + kind + "'");
  } catch (...) {
    return failure(to_api_error(std::current_exception()));
  }
}

ApiResponse DecisionService::record(const std::string& kind, const json& request, ApiResponse response,
                                    const json& context) {
  if (!store_) {
    return response;
  }
  try {
    store_->append(kind, request, response.body, context);
  } catch (...) {
    spdlog::error("decision not recorded; refusing to acknowledge");
    return failure(to_api_error(std::current_exception()));
  }
  return response;
}

ApiResponse DecisionService::forecast(const json& request) {
  const auto data = dataset();
  return record("forecast", request, execute("forecast", request, data.get()), context_for(data.get()));
}

ApiResponse DecisionService::allocate(const json& request) {
  const auto data = dataset();
  return record("allocation", request, execute("allocation", request, data.get()), context_for(data.get()));
}

ApiResponse DecisionService::lockdown(const json& request) {
  const auto data = dataset();
  return record("lockdown", request, execute("lockdown", request, data.get()), context_for(data.get()));
}

ApiResponse DecisionService::backtest(const json& request) const {
  const auto data = dataset();
  try {
    reject_unknown(request, {"region", "kind", "holdout"}, "");
    const auto code = text(field(request, "region", ""), "/region");
    SeriesKind kind = SeriesKind::active;
    if (has(request, "kind")) {
      auto parsed = series_kind_from_string(text(request.at("kind"), "/kind"));
      if (!parsed) {
        throw RequestError("/kind", "must be one of confirmed, recovered, deceased, active");
      }
      kind = *parsed;
    }
    const int holdout = has(request, "holdout") ? integer(request.at("holdout"), "/holdout") : 7;
    const auto& series = require_region(data.get(), code);
    const auto report = epidss::backtest(series, kind, config_.forecast, holdout);
    json days = json::array();
    for (const auto& d : report.days) {
      days.push_back({{"date", format_iso(d.date)},
                      {"actual", d.actual},
                      {"predicted", d.predicted},
                      {"absolute_error", d.absolute_error},
                      {"percentage_error", d.percentage_error ? json(*d.percentage_error) : json(nullptr)}});
    }
    return success({{"region", region_json(series.region)},
                    {"kind", to_string(kind)},
                    {"holdout", holdout},
                    {"days", days},
                    {"mean_absolute_error", report.mean_absolute_error},
                    {"mean_absolute_percentage_error", report.mean_absolute_percentage_error
                                                           ? json(*report.mean_absolute_percentage_error)
                                                           : json(nullptr)}});
  } catch (...) {
    return failure(to_api_error(std::current_exception()));
  }
}

ApiResponse DecisionService::ingest(std::string_view csv, const std::string& source) {
  try {
    auto snapshot = build_snapshot(csv, source, config_.csv_schema, config_.repair);
    json summary = {{"source", snapshot.source}, {"digest", snapshot.digest}, {"regions", snapshot.dataset.size()}};
    install(std::move(snapshot));
    return success(summary);
  } catch (...) {
    return failure(to_api_error(std::current_exception()));
  }
}

ApiResponse DecisionService::snapshots() const {
  try {
    if (!store_) {
      throw StorageError("no snapshot log configured");
    }
    json list = json::array();
    for (const auto& s : store_->list()) {
      list.push_back(to_json(s));
    }
    return success(list);
  } catch (...) {
    return failure(to_api_error(std::current_exception()));
  }
}

namespace {

void collect_paths(const json& patch, std::vector<std::string>& out) {
  for (const auto& op : patch) {
    out.push_back(op.at("path").get<std::string>());
  }
}

}  // namespace

ApiResponse DecisionService::replay(std::uint64_t seq) const {
  try {
    if (!store_) {
      throw StorageError("no snapshot log configured");
    }
    const auto recorded = store_->find(seq);
    if (!recorded) {
      throw NotFoundError("no snapshot with seq " + std::to_string(seq), std::to_string(seq));
    }
    const auto data = dataset();
    const auto current_context = context_for(data.get());
    const auto rerun = execute(recorded->kind, recorded->request, data.get());
    std::vector<std::string> changed_config;
    std::vector<std::string> response_diff;
    collect_paths(json::diff(recorded->config, current_context), changed_config);
    collect_paths(json::diff(recorded->response, rerun.body), response_diff);
    return success({{"seq", recorded->seq},
                    {"kind", recorded->kind},
                    {"match", response_diff.empty()},
                    {"changed_config", changed_config},
                    {"response_diff", response_diff},
                    {"recorded", recorded->response},
                    {"replayed", rerun.body}});
  } catch (...) {
    return failure(to_api_error(std::current_exception()));
  }
}

}  // namespace epidss::service
