#pragma once

// Lockdown recommendation: breach analysis of forecast item demand
// against availability over the next days.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "epidss/allocator.hpp"
#include "epidss/date.hpp"
#include "epidss/error.hpp"
#include "epidss/forecaster.hpp"

namespace epidss {

constexpr int kLockdownHorizon = 14;

struct AvailabilityEntry {
  ResourceItem item;
  double available_per_day = 0.0;  // or total stock in stock_depletion mode
};

enum class LockdownMode {
  day_capacity,     // breach when a day's demand exceeds the daily capacity
  stock_depletion,  // breach when cumulative demand exceeds the stock
};

std::optional<LockdownMode> lockdown_mode_from_string(std::string_view name);
std::string to_string(LockdownMode mode);

enum class Recommendation { no_lockdown, lockdown };
std::string to_string(Recommendation recommendation);

struct Breach {
  Date date;
  double forecast_demand = 0.0;  // cumulative through `date` in stock_depletion mode
  double availability = 0.0;
};

struct ItemAssessment {
  ResourceItem item;
  double availability = 0.0;
  std::vector<double> demand;  // per day over the horizon
  std::vector<Breach> breaches;
};

struct LockdownAssessment {
  Recommendation recommendation = Recommendation::no_lockdown;
  std::vector<ItemAssessment> items;  // input order
  int horizon = kLockdownHorizon;
  LockdownMode mode = LockdownMode::day_capacity;

  bool has_breaches() const;
};

struct LockdownOptions {
  int horizon = kLockdownHorizon;  // 1..14
  LockdownMode mode = LockdownMode::day_capacity;
};

class LockdownError : public Error {
 public:
  enum class Kind { insufficient_horizon, invalid_input };

  LockdownError(Kind kind, std::string message);

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// demand_t = kappa * predicted_active_t for the first `horizon` days.
std::vector<double> item_demand_curve(const Forecast& active_forecast, const ResourceItem& item,
                                      int horizon = kLockdownHorizon);

LockdownAssessment assess(const std::vector<AvailabilityEntry>& availabilities, const Forecast& active_forecast,
                          const LockdownOptions& options = {});

}  // namespace epidss
