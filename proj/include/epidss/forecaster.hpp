#pragma once

// Adaptive short-term forecaster: exponentially discounted polynomial
// weighted least squares on a trailing window, refit whenever called.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "epidss/case_data.hpp"
#include "epidss/date.hpp"
#include "epidss/error.hpp"

namespace epidss {

enum class SeriesKind { confirmed, recovered, deceased, active };
enum class Transform { identity, log1p };

std::optional<SeriesKind> series_kind_from_string(std::string_view name);
std::string to_string(SeriesKind kind);
std::optional<Transform> transform_from_string(std::string_view name);
std::string to_string(Transform transform);

constexpr bool is_cumulative(SeriesKind kind) { return kind != SeriesKind::active; }

struct ForecastConfig {
  int window = 21;
  int horizon = 14;
  double discount = 0.9;  // weight of an observation aged k days is discount^k
  int model_order = 2;
  // Unset: log1p for cumulative kinds, identity for active. fit() treats unset as identity.
  std::optional<Transform> transform;

  Transform transform_for(SeriesKind kind) const;

  friend bool operator==(const ForecastConfig&, const ForecastConfig&) = default;
};

class ForecastConfigError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  InsufficientDataError(std::size_t required, std::size_t available);

  std::size_t required() const { return required_; }
  std::size_t available() const { return available_; }

 private:
  std::size_t required_;
  std::size_t available_;
};

class FitError : public Error {
 public:
  FitError(std::string message, double condition);

  double condition() const { return condition_; }

 private:
  double condition_;
};

// Thrown by peak_active for a bad day count or a non-active forecast.
class ForecastRangeError : public Error {
 public:
  using Error::Error;
};

// Polynomial trend in the transformed domain. The abscissa of the j-th
// window value is first_abscissa + j.
struct FittedModel {
  // Coefficients of 1, x, x^2, ... in the raw abscissa.
  std::vector<double> coefficients;
  std::optional<Date> fit_window_end;
  Transform transform = Transform::identity;
  double residual_norm = 0.0;  // sqrt(sum_k w_k r_k^2), transformed domain
  double condition = 1.0;      // of the scaled normal matrix
  bool ridge_applied = false;

  // Evaluates the trend (transformed domain) at abscissa x. Uses the
  // centred basis the fit was solved in, not `coefficients`.
  double evaluate(double x) const;

  // Centred/scaled basis, u = (x - centre) / scale.
  double centre = 0.0;
  double scale = 1.0;
  std::vector<double> centred_coefficients;
};

struct ForecastPoint {
  Date date;
  double value = 0.0;
};

struct Forecast {
  RegionId region;
  SeriesKind kind = SeriesKind::active;
  std::vector<ForecastPoint> points;
  FittedModel model;
  ForecastConfig config;
};

// Checks ForecastConfig invariants that do not depend on the series.
void validate(const ForecastConfig& config);

FittedModel fit(std::span<const double> values, const ForecastConfig& config, double first_abscissa = 0.0);

// Observed values of `kind` from a case series.
std::vector<double> extract(const CaseSeries& series, SeriesKind kind);

// Forecast of an observed sequence whose last value falls on `last_date`.
Forecast forecast_values(const RegionId& region, SeriesKind kind, std::span<const double> values, Date last_date,
                         const ForecastConfig& config = {});
Forecast forecast(const CaseSeries& series, SeriesKind kind, const ForecastConfig& config = {});
Forecast forecast(const ActiveSeries& series, const ForecastConfig& config = {});

double peak_active(const Forecast& forecast, int days);

struct BacktestDay {
  Date date;
  double actual = 0.0;
  double predicted = 0.0;
  double absolute_error = 0.0;
  std::optional<double> percentage_error;  // unset when actual == 0
};

struct BacktestReport {
  SeriesKind kind = SeriesKind::active;
  int holdout = 0;
  std::vector<BacktestDay> days;
  double mean_absolute_error = 0.0;
  std::optional<double> mean_absolute_percentage_error;
  Forecast forecast;  // produced from the truncated series
};

BacktestReport backtest(const CaseSeries& series, SeriesKind kind, const ForecastConfig& config, int holdout);

}  // namespace epidss
