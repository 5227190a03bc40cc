#pragma once

// Moran's index three ways: the quadratic form z'Wz, the classical
// double sum over a raw proximity matrix, and the slope of the regression
// of n*Wz on z. Also the rank-one eigen relation of zz'W and normalized
// Moran scatterplot datasets.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "moransar/error.hpp"
#include "moransar/matrix.hpp"
#include "moransar/ols.hpp"
#include "moransar/significance.hpp"
#include "moransar/spatial_data.hpp"

namespace moransar {

/// x'Mx. Only the symmetric part of M contributes.
template <typename T>
T quadratic_form(std::span<const T> x, const Matrix<T>& m) {
  if (m.rows() != x.size() || m.cols() != x.size())
    throw Error(ErrorCode::DimensionMismatch, "quadratic form size mismatch");
  T s{};
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * dot(m.row(i), x);
  return s;
}

inline double moran_index(const StandardizedVector& z, const WeightMatrix& w) {
  return quadratic_form(z.values(), w.matrix());
}

/// Classical form (n/S0) sum_ij v_ij (x_i - xbar)(x_j - xbar) / sum_i (x_i - xbar)^2
/// on raw sizes and an unnormalized proximity matrix.
inline double moran_double_sum(std::span<const double> x, const ProximityMatrix& v) {
  const std::size_t n = x.size();
  if (v.size() != n)
    throw Error(ErrorCode::DimensionMismatch, "sizes and proximity matrix differ");
  const double xbar = mean(x);
  double denom = 0.0;
  for (double xi : x) denom += (xi - xbar) * (xi - xbar);
  if (!(denom > 0.0))
    throw Error(ErrorCode::ZeroVariance, "all values are equal");
  double s0 = 0.0, num = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      s0 += v(i, j);
      num += v(i, j) * (x[i] - xbar) * (x[j] - xbar);
    }
  if (!(s0 > 0.0))
    throw Error(ErrorCode::DegenerateMatrix, "proximity entries sum to zero");
  return static_cast<double>(n) / s0 * num / denom;
}

struct MoranResult {
  double i_value = 0.0;    // z'Wz
  double slope = 0.0;      // OLS slope of n*Wz on z
  double intercept = 0.0;  // OLS intercept, estimates (Wz)'o
  double r_squared = 0.0;
  std::vector<double> residuals_e;
  double se_slope = 0.0;
  double se_intercept = 0.0;
  double slope_p_value = 0.0;
  double intercept_p_value = 0.0;
  bool p_degenerate = false;
  // max_i |n(Wz)_i - I z_i|: how far the data are from the no-intercept
  // relation n*Wz = I*z. Diagnostic only.
  double proportional_lag_residual = 0.0;

  friend bool operator==(const MoranResult&, const MoranResult&) = default;
};

inline MoranResult inner_regression(const StandardizedVector& z, const WeightMatrix& w) {
  const std::size_t n = z.size();
  const SpatialLag lag = spatial_lag(w, z);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = static_cast<double>(n) * lag.wz[i];

  const LineFit<double> fit = fit_line(z.values(), std::span<const double>(y));

  MoranResult r;
  r.i_value = dot(z.values(), std::span<const double>(lag.wz));
  r.slope = fit.slope;
  r.intercept = fit.intercept;
  r.r_squared = fit.r_squared;
  r.residuals_e = fit.residuals;
  r.se_slope = fit.se_slope;
  r.se_intercept = fit.se_intercept;
  r.p_degenerate = fit.exact;
  r.slope_p_value = slope_t_test(fit.slope, fit.se_slope, n).p_value;
  r.intercept_p_value = slope_t_test(fit.intercept, fit.se_intercept, n).p_value;
  for (std::size_t i = 0; i < n; ++i)
    r.proportional_lag_residual = std::max(r.proportional_lag_residual, std::abs(y[i] - r.i_value * z[i]));
  return r;
}

struct EigenCheck {
  double residual = 0.0;           // max_i |(zz'Wz)_i - I z_i|
  double eigenvalue = 0.0;         // trace(zz'W), the only nonzero eigenvalue
  double quadratic_eigen_discrepancy = 0.0;   // (Wz)'zz'Wz - I^2

  friend bool operator==(const EigenCheck&, const EigenCheck&) = default;
};

/// Evaluates zz'W explicitly and checks that z is its eigenvector with
/// eigenvalue I.
inline EigenCheck eigen_check(const StandardizedVector& z, const WeightMatrix& w) {
  const auto zs = z.values();
  const Matrix<double> m = multiply(outer(zs, zs), w.matrix());
  const std::vector<double> mz = multiply(m, zs);
  const double i_value = moran_index(z, w);
  const std::vector<double> wz = multiply(w.matrix(), zs);

  EigenCheck c;
  for (std::size_t i = 0; i < zs.size(); ++i)
    c.residual = std::max(c.residual, std::abs(mz[i] - i_value * zs[i]));
  c.eigenvalue = m.trace();
  c.quadratic_eigen_discrepancy =
      dot(std::span<const double>(wz), std::span<const double>(mz)) - i_value * i_value;
  return c;
}

enum class ScatterMode { autocorrelation, autoregression };

constexpr std::string_view to_string(ScatterMode m) {
  return m == ScatterMode::autocorrelation ? "autocorrelation" : "autoregression";
}

struct TrendLine {
  double slope = 0.0;
  double intercept = 0.0;
  std::string label;

  double operator()(double x) const { return intercept + slope * x; }

  friend bool operator==(const TrendLine&, const TrendLine&) = default;
};

struct ScatterPoint {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const ScatterPoint&, const ScatterPoint&) = default;
};

struct ScatterDataset {
  ScatterMode mode = ScatterMode::autocorrelation;
  std::vector<ScatterPoint> points;
  std::optional<TrendLine> theoretical;  // absent when I = 0 in autoregression mode
  TrendLine empirical;

  friend bool operator==(const ScatterDataset&, const ScatterDataset&) = default;
};

/// Autocorrelation mode: points (z_i, n(Wz)_i), theoretical line y = I z,
/// empirical line y = (Wz)'o + I z.
/// Autoregression mode: points ((Wz)_i, z_i), theoretical line
/// z = (n/I)(Wz) - (Wz)'o/I, empirical line from the least squares SAR fit.
inline ScatterDataset scatter_dataset(const StandardizedVector& z, const WeightMatrix& w,
                                      ScatterMode mode) {
  const std::size_t n = z.size();
  const double nd = static_cast<double>(n);
  const SpatialLag lag = spatial_lag(w, z);
  const double i_value = moran_index(z, w);

  ScatterDataset d;
  d.mode = mode;
  d.points.reserve(n);
  if (mode == ScatterMode::autocorrelation) {
    for (std::size_t i = 0; i < n; ++i) d.points.push_back({z[i], nd * lag.wz[i]});
    d.theoretical = TrendLine{i_value, 0.0, "theoretical"};
    d.empirical = TrendLine{i_value, lag.wz_sum, "empirical"};
  } else {
    for (std::size_t i = 0; i < n; ++i) d.points.push_back({lag.wz[i], z[i]});
    if (std::abs(i_value) >= tol::kZeroMoran)
      d.theoretical = TrendLine{nd / i_value, -lag.wz_sum / i_value, "theoretical"};
    const auto fit = fit_line(std::span<const double>(lag.wz), z.values());
    d.empirical = TrendLine{fit.slope, fit.intercept, "empirical"};
  }
  return d;
}

inline std::string format_full(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// `#line slope intercept label` comment block followed by `x,y` rows.
inline std::string to_csv(const ScatterDataset& d) {
  std::string out = "# mode " + std::string(to_string(d.mode)) + "\n";
  auto line = [&](const TrendLine& t) {
    out += "#line " + format_full(t.slope) + " " + format_full(t.intercept) + " " +
           t.label + "\n";
  };
  if (d.theoretical) line(*d.theoretical);
  line(d.empirical);
  out += "x,y\n";
  for (const auto& p : d.points) out += format_full(p.x) + "," + format_full(p.y) + "\n";
  return out;
}

}  // namespace moransar
