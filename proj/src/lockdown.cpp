#include "epidss/lockdown.hpp"

#include <cmath>
#include <set>

namespace epidss {

std::optional<LockdownMode> lockdown_mode_from_string(std::string_view name) {
  if (name == "day_capacity") return LockdownMode::day_capacity;
  if (name == "stock_depletion") return LockdownMode::stock_depletion;
  return std::nullopt;
}

std::string to_string(LockdownMode mode) {
  return mode == LockdownMode::day_capacity ? "day_capacity" : "stock_depletion";
}

std::string to_string(Recommendation recommendation) {
  return recommendation == Recommendation::lockdown ? "lockdown" : "no-lockdown";
}

bool LockdownAssessment::has_breaches() const {
  for (const auto& item : items) {
    if (!item.breaches.empty()) {
      return true;
    }
  }
  return false;
}

LockdownError::LockdownError(Kind kind, std::string message) : Error(std::move(message)), kind_(kind) {}

std::vector<double> item_demand_curve(const Forecast& active_forecast, const ResourceItem& item, int horizon) {
  if (active_forecast.kind != SeriesKind::active) {
    throw LockdownError(LockdownError::Kind::invalid_input,
                        "demand curves need an active-case forecast, got " + to_string(active_forecast.kind));
  }
  if (horizon < 1 || horizon > kLockdownHorizon) {
    throw LockdownError(LockdownError::Kind::invalid_input,
                        "horizon must be within [1, " + std::to_string(kLockdownHorizon) + "]");
  }
  if (active_forecast.points.size() < static_cast<std::size_t>(horizon)) {
    throw LockdownError(LockdownError::Kind::insufficient_horizon,
                        "forecast covers " + std::to_string(active_forecast.points.size()) + " days, " +
                            std::to_string(horizon) + " required");
  }
  if (!std::isfinite(item.kappa) || item.kappa < 0.0) {
    throw LockdownError(LockdownError::Kind::invalid_input, item.name + ": kappa must be finite and non-negative");
  }
  std::vector<double> demand(static_cast<std::size_t>(horizon));
  for (std::size_t t = 0; t < demand.size(); ++t) {
    demand[t] = item.kappa * active_forecast.points[t].value;
  }
  return demand;
}

LockdownAssessment assess(const std::vector<AvailabilityEntry>& availabilities, const Forecast& active_forecast,
                          const LockdownOptions& options) {
  if (availabilities.empty()) {
    throw LockdownError(LockdownError::Kind::invalid_input, "at least one availability entry is required");
  }
  std::set<std::string> names;
  for (const auto& entry : availabilities) {
    if (!names.insert(entry.item.name).second) {
      throw LockdownError(LockdownError::Kind::invalid_input, "duplicate item '" + entry.item.name + "'");
    }
    if (!std::isfinite(entry.available_per_day) || entry.available_per_day < 0.0) {
      throw LockdownError(LockdownError::Kind::invalid_input,
                          entry.item.name + ": availability must be finite and non-negative");
    }
  }

  LockdownAssessment assessment;
  assessment.horizon = options.horizon;
  assessment.mode = options.mode;
  for (const auto& entry : availabilities) {
    ItemAssessment item;
    item.item = entry.item;
    item.availability = entry.available_per_day;
    item.demand = item_demand_curve(active_forecast, entry.item, options.horizon);
    double cumulative = 0.0;
    for (std::size_t t = 0; t < item.demand.size(); ++t) {
      const Date date = active_forecast.points[t].date;
      if (options.mode == LockdownMode::day_capacity) {
        if (item.demand[t] > entry.available_per_day) {
          item.breaches.push_back({date, item.demand[t], entry.available_per_day});
        }
      } else {
        cumulative += item.demand[t];
        if (cumulative > entry.available_per_day) {
          item.breaches.push_back({date, cumulative, entry.available_per_day});
        }
      }
    }
    assessment.items.push_back(std::move(item));
  }
  assessment.recommendation = assessment.has_breaches() ? Recommendation::lockdown : Recommendation::no_lockdown;
  return assessment;
}

}  // namespace epidss
