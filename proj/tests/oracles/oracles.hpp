#pragma once

// Reference implementations used only by the tests. They share no code with
// the library: straightforward formulas, brute-force scans and high-precision
// arithmetic, chosen for obviousness over speed.

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <vector>

namespace oracle {

using Big = boost::multiprecision::cpp_bin_float_50;

// Weighted straight-line fit y = a + b x with textbook weighted means.
struct Line {
  double intercept;
  double slope;
};

inline Line weighted_line(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& w) {
  Big sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    sx += Big(w[i]) * x[i];
    sy += Big(w[i]) * y[i];
  }
  const Big mx = sx / sw, my = sy / sw;
  Big sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += Big(w[i]) * (x[i] - mx) * (y[i] - my);
    sxx += Big(w[i]) * (x[i] - mx) * (x[i] - mx);
  }
  const Big b = sxy / sxx;
  return {static_cast<double>(my - b * mx), static_cast<double>(b)};
}

// Weights discount^(n-1-j) for a window of n values, newest weight 1.
inline std::vector<double> discount_weights(std::size_t n, double discount) {
  std::vector<double> w(n);
  for (std::size_t j = 0; j < n; ++j) {
    w[j] = std::pow(discount, static_cast<double>(n - 1 - j));
  }
  return w;
}

// Weighted polynomial least squares in the raw abscissa, normal equations
// assembled and solved by Gauss-Jordan elimination in 50-digit arithmetic.
struct PolyFit {
  std::vector<Big> coefficients;  // of 1, x, x^2, ...
  Big residual_norm;

  Big at(const Big& x) const {
    Big v = 0, p = 1;
    for (const auto& c : coefficients) {
      v += c * p;
      p *= x;
    }
    return v;
  }
};

inline PolyFit weighted_poly(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& w,
                             int order) {
  const std::size_t m = static_cast<std::size_t>(order) + 1;
  std::vector<std::vector<Big>> a(m, std::vector<Big>(m + 1, Big(0)));
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::vector<Big> pw(2 * m, Big(1));
    for (std::size_t k = 1; k < 2 * m; ++k) pw[k] = pw[k - 1] * x[i];
    for (std::size_t r = 0; r < m; ++r) {
      for (std::size_t c = 0; c < m; ++c) a[r][c] += Big(w[i]) * pw[r + c];
      a[r][m] += Big(w[i]) * pw[r] * y[i];
    }
  }
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < m; ++r) {
      if (abs(a[r][col]) > abs(a[pivot][col])) pivot = r;
    }
    std::swap(a[col], a[pivot]);
    for (std::size_t r = 0; r < m; ++r) {
      if (r == col) continue;
      const Big f = a[r][col] / a[col][col];
      for (std::size_t c = col; c <= m; ++c) a[r][c] -= f * a[col][c];
    }
  }
  PolyFit out;
  for (std::size_t r = 0; r < m; ++r) out.coefficients.push_back(a[r][m] / a[r][r]);
  Big ss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const Big r = Big(y[i]) - out.at(Big(x[i]));
    ss += Big(w[i]) * r * r;
  }
  out.residual_norm = sqrt(ss);
  return out;
}

// Forecast of the next `horizon` days for observations y[0..n-1] at
// abscissa 0..n-1: fit the trailing window, invert the transform, clamp.
inline std::vector<double> forecast(const std::vector<double>& y, int window, int horizon, double discount, int order,
                                    bool log_domain, bool cumulative) {
  const std::size_t n = y.size();
  const std::size_t start = n - static_cast<std::size_t>(window);
  std::vector<double> xs, ys;
  for (std::size_t i = start; i < n; ++i) {
    xs.push_back(static_cast<double>(i));
    ys.push_back(log_domain ? std::log1p(y[i]) : y[i]);
  }
  const auto fit = weighted_poly(xs, ys, discount_weights(xs.size(), discount), order);
  std::vector<double> out;
  double floor = y.back();
  for (int h = 1; h <= horizon; ++h) {
    const Big t = fit.at(Big(static_cast<double>(n - 1 + static_cast<std::size_t>(h))));
    double v = log_domain ? static_cast<double>(expm1(t)) : static_cast<double>(t);
    if (cumulative) {
      floor = v = std::max(v, floor);
    } else {
      v = std::max(v, 0.0);
    }
    out.push_back(v);
  }
  return out;
}

// e_i straight from the blend formula.
inline std::vector<double> effective(const std::vector<double>& d, const std::vector<double>& a, double blend) {
  const double total_d = std::accumulate(d.begin(), d.end(), 0.0);
  const double total_a = std::accumulate(a.begin(), a.end(), 0.0);
  std::vector<double> e(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    e[i] = total_a == 0.0 ? d[i] : blend * d[i] + (1.0 - blend) * (a[i] / total_a) * total_d;
  }
  return e;
}

// Capped-proportional awards by bisection on the common scale. Units with
// zero effective demand only see supply left once every other unit is full.
struct Awards {
  std::vector<double> x;
  std::optional<double> scale;
};

inline Awards bisect_awards(const std::vector<double>& d, const std::vector<double>& e, double supply) {
  const std::size_t n = d.size();
  Awards out{std::vector<double>(n, 0.0), std::nullopt};
  const double total_d = std::accumulate(d.begin(), d.end(), 0.0);
  if (supply >= total_d) {
    out.x = d;
    return out;
  }
  double hi = 0.0, positive_d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (e[i] > 0.0) {
      hi = std::max(hi, d[i] / e[i]);
      positive_d += d[i];
    }
  }
  auto served = [&](double lambda) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (e[i] > 0.0) s += std::min(d[i], lambda * e[i]);
    }
    return s;
  };
  if (positive_d <= supply) {
    double rest_d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (e[i] > 0.0) {
        out.x[i] = d[i];
      } else {
        rest_d += d[i];
      }
    }
    const double rest = supply - positive_d;
    for (std::size_t i = 0; i < n; ++i) {
      if (e[i] <= 0.0 && rest_d > 0.0) out.x[i] = rest * d[i] / rest_d;
    }
    out.scale = hi;
    return out;
  }
  double lo = 0.0;
  for (int it = 0; it < 300; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (served(mid) < supply) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double lambda = 0.5 * (lo + hi);
  for (std::size_t i = 0; i < n; ++i) {
    if (e[i] > 0.0) out.x[i] = std::min(d[i], lambda * e[i]);
  }
  out.scale = lambda;
  return out;
}

// Day indices (0-based) on which demand breaches availability, by scan.
inline std::vector<std::size_t> breach_days(const std::vector<double>& active, double kappa, double available,
                                            bool stock) {
  std::vector<std::size_t> days;
  double used = 0.0;
  for (std::size_t t = 0; t < active.size(); ++t) {
    const double demand = kappa * active[t];
    used += demand;
    if (stock ? used > available : demand > available) days.push_back(t);
  }
  return days;
}

inline double relative_error(double got, double want) {
  const double scale = std::max(std::abs(want), 1.0);
  return std::abs(got - want) / scale;
}

}  // namespace oracle
