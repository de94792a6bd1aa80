#include "epidss/forecaster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace epidss {

namespace {

constexpr double kRidgeTrigger = 1e12;
constexpr double kRidgeRelative = 1e-9;
constexpr double kMaxCondition = 1e14;

using Matrix = std::vector<std::vector<long double>>;

// Cyclic Jacobi sweep on a small symmetric matrix; returns the eigenvalues.
std::vector<double> symmetric_eigenvalues(Matrix a) {
  const std::size_t n = a.size();
  for (int sweep = 0; sweep < 100; ++sweep) {
    long double off = 0;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        off += a[p][q] * a[p][q];
      }
    }
    if (off < 1e-60L) {
      break;
    }
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a[p][q] == 0) {
          continue;
        }
        const long double theta = (a[q][q] - a[p][p]) / (2 * a[p][q]);
        const long double t =
            (theta >= 0 ? 1 : -1) / (std::fabs(theta) + std::sqrt(theta * theta + 1));
        const long double c = 1 / std::sqrt(t * t + 1);
        const long double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const long double akp = a[k][p];
          const long double akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const long double apk = a[p][k];
          const long double aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> eig(n);
  for (std::size_t i = 0; i < n; ++i) {
    eig[i] = static_cast<double>(a[i][i]);
  }
  return eig;
}

double condition_number(const Matrix& a) {
  const auto eig = symmetric_eigenvalues(a);
  const auto [lo, hi] = std::minmax_element(eig.begin(), eig.end());
  if (!(*hi > 0) || !(*lo > 0)) {
    return std::numeric_limits<double>::infinity();
  }
  return *hi / *lo;
}

// Solves a symmetric positive definite system by Cholesky; false if not SPD.
bool cholesky_solve(Matrix a, std::vector<long double>& b) {
  const std::size_t n = a.size();
  for (std::size_t j = 0; j < n; ++j) {
    long double d = a[j][j];
    for (std::size_t k = 0; k < j; ++k) {
      d -= a[j][k] * a[j][k];
    }
    if (!(d > 0)) {
      return false;
    }
    a[j][j] = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      long double v = a[i][j];
      for (std::size_t k = 0; k < j; ++k) {
        v -= a[i][k] * a[j][k];
      }
      a[i][j] = v / a[j][j];
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < i; ++k) {
      b[i] -= a[i][k] * b[k];
    }
    b[i] /= a[i][i];
  }
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t k = i + 1; k < n; ++k) {
      b[i] -= a[k][i] * b[k];
    }
    b[i] /= a[i][i];
  }
  return true;
}

double apply_transform(Transform t, double v) { return t == Transform::log1p ? std::log1p(v) : v; }
double invert_transform(Transform t, double v) { return t == Transform::log1p ? std::expm1(v) : v; }

}  // namespace

std::optional<SeriesKind> series_kind_from_string(std::string_view name) {
  if (name == "confirmed") return SeriesKind::confirmed;
  if (name == "recovered") return SeriesKind::recovered;
  if (name == "deceased") return SeriesKind::deceased;
  if (name == "active") return SeriesKind::active;
  return std::nullopt;
}

std::string to_string(SeriesKind kind) {
  switch (kind) {
    case SeriesKind::confirmed:
      return "confirmed";
    case SeriesKind::recovered:
      return "recovered";
    case SeriesKind::deceased:
      return "deceased";
    case SeriesKind::active:
      return "active";
  }
  return "active";
}

std::optional<Transform> transform_from_string(std::string_view name) {
  if (name == "identity") return Transform::identity;
  if (name == "log1p") return Transform::log1p;
  return std::nullopt;
}

std::string to_string(Transform transform) { return transform == Transform::log1p ? "log1p" : "identity"; }

Transform ForecastConfig::transform_for(SeriesKind kind) const {
  if (transform) {
    return *transform;
  }
  return is_cumulative(kind) ? Transform::log1p : Transform::identity;
}

InsufficientDataError::InsufficientDataError(std::size_t required, std::size_t available)
    : Error("insufficient data: at least " + std::to_string(required) + " observations required, " +
            std::to_string(available) + " available"),
      required_(required),
      available_(available) {}

FitError::FitError(std::string message, double condition) : Error(std::move(message)), condition_(condition) {}

double FittedModel::evaluate(double x) const {
  const double u = (x - centre) / scale;
  double acc = 0.0;
  for (std::size_t k = centred_coefficients.size(); k-- > 0;) {
    acc = acc * u + centred_coefficients[k];
  }
  return acc;
}

void validate(const ForecastConfig& config) {
  if (config.window < 2) {
    throw ForecastConfigError("window must be at least 2, got " + std::to_string(config.window));
  }
  if (config.horizon < 1 || config.horizon > 21) {
    throw ForecastConfigError("horizon must be within [1, 21], got " + std::to_string(config.horizon));
  }
  if (!(config.discount > 0.0 && config.discount <= 1.0)) {
    throw ForecastConfigError("discount must be within (0, 1], got " + std::to_string(config.discount));
  }
  if (config.model_order < 0 || config.model_order >= config.window) {
    throw ForecastConfigError("model_order must be within [0, window), got " +
                              std::to_string(config.model_order));
  }
}

FittedModel fit(std::span<const double> values, const ForecastConfig& config, double first_abscissa) {
  validate(config);
  const std::size_t n = values.size();
  const std::size_t terms = static_cast<std::size_t>(config.model_order) + 1;
  if (n < terms || n < 2) {
    throw InsufficientDataError(std::max<std::size_t>(terms, 2), n);
  }
  const Transform transform = config.transform.value_or(Transform::identity);

  std::vector<double> y(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(values[j]) || (transform == Transform::log1p && values[j] <= -1.0)) {
      throw FitError("value " + std::to_string(j) + " is not finite in the transformed domain",
                     std::numeric_limits<double>::quiet_NaN());
    }
    y[j] = apply_transform(transform, values[j]);
  }

  FittedModel model;
  model.transform = transform;
  model.centre = first_abscissa + static_cast<double>(n - 1) / 2.0;
  model.scale = std::max(static_cast<double>(n - 1) / 2.0, 1.0);

  std::vector<long double> weights(n);
  std::vector<long double> u(n);
  for (std::size_t j = 0; j < n; ++j) {
    weights[j] = std::pow(static_cast<long double>(config.discount), static_cast<long double>(n - 1 - j));
    u[j] = (static_cast<long double>(first_abscissa) + j - model.centre) / model.scale;
  }

  Matrix normal(terms, std::vector<long double>(terms, 0));
  std::vector<long double> rhs(terms, 0);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<long double> powers(2 * terms - 1, 1);
    for (std::size_t k = 1; k < powers.size(); ++k) {
      powers[k] = powers[k - 1] * u[j];
    }
    for (std::size_t p = 0; p < terms; ++p) {
      rhs[p] += weights[j] * powers[p] * y[j];
      for (std::size_t q = 0; q < terms; ++q) {
        normal[p][q] += weights[j] * powers[p + q];
      }
    }
  }

  model.condition = condition_number(normal);
  if (!(model.condition <= kRidgeTrigger)) {
    for (std::size_t p = 0; p < terms; ++p) {
      normal[p][p] += kRidgeRelative * normal[p][p];
    }
    model.ridge_applied = true;
    model.condition = condition_number(normal);
  }
  if (!(model.condition <= kMaxCondition) || !cholesky_solve(normal, rhs)) {
    throw FitError("normal equations are ill-conditioned (condition " + std::to_string(model.condition) + ")",
                   model.condition);
  }

  model.centred_coefficients.assign(rhs.begin(), rhs.end());

  // Expand sum_k c_k ((x - centre)/scale)^k into powers of x.
  model.coefficients.assign(terms, 0.0);
  std::vector<long double> raw(terms, 0);
  for (std::size_t k = 0; k < terms; ++k) {
    long double binom = 1;
    const long double factor = rhs[k] / std::pow(static_cast<long double>(model.scale), static_cast<long double>(k));
    for (std::size_t i = 0; i <= k; ++i) {
      raw[i] += factor * binom *
                std::pow(static_cast<long double>(-model.centre), static_cast<long double>(k - i));
      binom = binom * static_cast<long double>(k - i) / static_cast<long double>(i + 1);
    }
  }
  std::copy(raw.begin(), raw.end(), model.coefficients.begin());

  long double sq = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const long double r = y[j] - model.evaluate(first_abscissa + static_cast<double>(j));
    sq += weights[j] * r * r;
  }
  model.residual_norm = static_cast<double>(std::sqrt(sq));
  return model;
}

std::vector<double> extract(const CaseSeries& series, SeriesKind kind) {
  std::vector<double> values;
  values.reserve(series.records.size());
  for (const auto& r : series.records) {
    switch (kind) {
      case SeriesKind::confirmed:
        values.push_back(static_cast<double>(r.confirmed));
        break;
      case SeriesKind::recovered:
        values.push_back(static_cast<double>(r.recovered));
        break;
      case SeriesKind::deceased:
        values.push_back(static_cast<double>(r.deceased));
        break;
      case SeriesKind::active:
        values.push_back(static_cast<double>(r.confirmed - r.recovered - r.deceased));
        break;
    }
  }
  return values;
}

Forecast forecast_values(const RegionId& region, SeriesKind kind, std::span<const double> values, Date last_date,
                         const ForecastConfig& config) {
  validate(config);
  const auto window = static_cast<std::size_t>(config.window);
  if (values.size() < window) {
    throw InsufficientDataError(window, values.size());
  }
  ForecastConfig effective = config;
  effective.transform = config.transform_for(kind);

  const std::size_t start = values.size() - window;
  Forecast result;
  result.region = region;
  result.kind = kind;
  result.config = effective;
  result.model = fit(values.subspan(start), effective, static_cast<double>(start));
  result.model.fit_window_end = last_date;

  const double last_index = static_cast<double>(values.size() - 1);
  double floor = is_cumulative(kind) ? values.back() : 0.0;
  result.points.reserve(static_cast<std::size_t>(config.horizon));
  for (int h = 1; h <= config.horizon; ++h) {
    double v = invert_transform(effective.transform.value(), result.model.evaluate(last_index + h));
    if (!std::isfinite(v)) {
      throw FitError("forecast diverged on day " + std::to_string(h), result.model.condition);
    }
    if (is_cumulative(kind)) {
      v = std::max(v, floor);
      floor = v;
    } else {
      v = std::max(v, 0.0);
    }
    result.points.push_back({last_date + std::chrono::days{h}, v});
  }
  return result;
}

Forecast forecast(const CaseSeries& series, SeriesKind kind, const ForecastConfig& config) {
  validate(config);
  if (series.records.empty()) {
    throw InsufficientDataError(static_cast<std::size_t>(config.window), 0);
  }
  const auto values = extract(series, kind);
  return forecast_values(series.region, kind, values, series.records.back().date, config);
}

Forecast forecast(const ActiveSeries& series, const ForecastConfig& config) {
  validate(config);
  if (series.values.empty()) {
    throw InsufficientDataError(static_cast<std::size_t>(config.window), 0);
  }
  std::vector<double> values;
  values.reserve(series.values.size());
  for (const auto& p : series.values) {
    values.push_back(static_cast<double>(p.active));
  }
  return forecast_values(series.region, SeriesKind::active, values, series.values.back().date, config);
}

double peak_active(const Forecast& forecast, int days) {
  if (forecast.kind != SeriesKind::active) {
    throw ForecastRangeError("peak_active needs an active-case forecast, got " + to_string(forecast.kind));
  }
  if (days < 1 || static_cast<std::size_t>(days) > forecast.points.size()) {
    throw ForecastRangeError("days must be within [1, " + std::to_string(forecast.points.size()) + "], got " +
                             std::to_string(days));
  }
  double peak = forecast.points.front().value;
  for (int i = 1; i < days; ++i) {
    peak = std::max(peak, forecast.points[static_cast<std::size_t>(i)].value);
  }
  return peak;
}

BacktestReport backtest(const CaseSeries& series, SeriesKind kind, const ForecastConfig& config, int holdout) {
  validate(config);
  if (holdout < 1 || holdout > 21) {
    throw ForecastConfigError("holdout must be within [1, 21], got " + std::to_string(holdout));
  }
  const auto required = static_cast<std::size_t>(config.window + holdout);
  if (series.records.size() < required) {
    throw InsufficientDataError(required, series.records.size());
  }
  CaseSeries truncated{series.region,
                       {series.records.begin(), series.records.end() - holdout}};
  ForecastConfig cfg = config;
  cfg.horizon = holdout;

  BacktestReport report;
  report.kind = kind;
  report.holdout = holdout;
  report.forecast = forecast(truncated, kind, cfg);

  const auto actuals = extract(series, kind);
  const std::size_t offset = truncated.records.size();
  double abs_sum = 0.0;
  double pct_sum = 0.0;
  int pct_count = 0;
  for (int d = 0; d < holdout; ++d) {
    BacktestDay day;
    day.date = series.records[offset + static_cast<std::size_t>(d)].date;
    day.actual = actuals[offset + static_cast<std::size_t>(d)];
    day.predicted = report.forecast.points[static_cast<std::size_t>(d)].value;
    day.absolute_error = std::fabs(day.predicted - day.actual);
    if (day.actual != 0.0) {
      day.percentage_error = 100.0 * day.absolute_error / std::fabs(day.actual);
      pct_sum += *day.percentage_error;
      ++pct_count;
    }
    abs_sum += day.absolute_error;
    report.days.push_back(day);
  }
  report.mean_absolute_error = abs_sum / holdout;
  if (pct_count > 0) {
    report.mean_absolute_percentage_error = pct_sum / pct_count;
  }
  return report;
}

}  // namespace epidss
