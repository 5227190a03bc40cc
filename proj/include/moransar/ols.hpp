#pragma once

// Simple linear regression y = a + b x with intercept.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "moransar/error.hpp"
#include "moransar/matrix.hpp"

namespace moransar {

template <typename T>
struct LineFit {
  T intercept{};
  T slope{};
  T r_squared{};  // squared Pearson correlation of x and y
  T sse{};
  T se_slope{};      // 0 when degenerate
  T se_intercept{};  // 0 when degenerate
  std::vector<T> residuals;
  std::size_t n = 0;
  // No residual degrees of freedom (n = 2) or residuals vanish: standard
  // errors are undefined.
  bool exact = false;
};

/// Least squares line through (x_i, y_i). Throws DegenerateRegression when
/// x is constant.
template <typename T>
LineFit<T> fit_line(std::span<const T> x, std::span<const T> y) {
  const std::size_t n = x.size();
  if (y.size() != n)
    throw Error(ErrorCode::DimensionMismatch, "regression inputs differ in length");
  if (n < 2)
    throw Error(ErrorCode::DegenerateRegression, "need at least two points");

  const T mx = mean(x), my = mean(y);
  T sxx{}, syy{}, sxy{};
  for (std::size_t i = 0; i < n; ++i) {
    const T dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (!(sxx > T{}))
    throw Error(ErrorCode::DegenerateRegression, "independent variable is constant");

  LineFit<T> fit;
  fit.n = n;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > T{} ? (sxy / sxx) * (sxy / syy) : T{};
  fit.residuals.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    fit.residuals[i] = y[i] - fit.intercept - fit.slope * x[i];
    fit.sse += fit.residuals[i] * fit.residuals[i];
  }

  // Collinear data: report an exact fit instead of round-off residuals.
  if (fit.sse <= T(1e-20) * syy || n == 2) {
    fit.exact = true;
    fit.r_squared = syy > T{} ? T{1} : T{};
    fit.sse = T{};
    for (auto& e : fit.residuals) e = T{};
    return fit;
  }
  const T s2 = fit.sse / static_cast<T>(n - 2);
  fit.se_slope = std::sqrt(s2 / sxx);
  fit.se_intercept =
      std::sqrt(s2 * (T{1} / static_cast<T>(n) + mx * mx / sxx));
  return fit;
}

template <typename T>
LineFit<T> fit_line(const std::vector<T>& x, const std::vector<T>& y) {
  return fit_line(std::span<const T>(x), std::span<const T>(y));
}

}  // namespace moransar
