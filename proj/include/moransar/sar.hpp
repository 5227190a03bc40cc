#pragma once

// Simplest spatial autoregressive model z = a*o + rho*Wz + eps, fitted by
// least squares, and the closed-form relations tying (a, rho, delta, R^2)
// to Moran's index.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "moransar/error.hpp"
#include "moransar/matrix.hpp"
#include "moransar/ols.hpp"
#include "moransar/significance.hpp"
#include "moransar/spatial_data.hpp"
#include "moransar/tolerance.hpp"

namespace moransar {

struct SarFit {
  double a_hat = 0.0;
  double rho_hat = 0.0;
  std::vector<double> residuals;
  double delta = 0.0;  // z'eps
  double r_squared = 0.0;
  double se_slope = 0.0;
  double se_intercept = 0.0;
  double p_slope = 0.0;
  double p_intercept = 0.0;
  std::size_t n = 0;
  double i_value = 0.0;     // (Wz)'z
  bool zero_moran = false;  // |I| < kZeroMoran: the nR^2/I cross-check is skipped
  bool exact_fit = false;   // zero residuals; p-values degenerate

  friend bool operator==(const SarFit&, const SarFit&) = default;
};

struct SarCoefficients {
  double a = 0.0;
  double rho = 0.0;
};

/// Sufficient statistics of the SAR normal equations for a standardized z
/// (o'z = 0, o'o = z'z = n).
struct SarMoments {
  std::size_t n = 0;
  double i_value = 0.0;  // (Wz)'z
  double wz_sum = 0.0;   // (Wz)'o
  double wz_sq = 0.0;    // (Wz)'Wz
};

inline SarMoments sar_moments(const StandardizedVector& z, const SpatialLag& lag) {
  if (lag.size() != z.size())
    throw Error(ErrorCode::DimensionMismatch, "lag and vector sizes differ");
  const std::span<const double> wz(lag.wz);
  return {z.size(), dot(wz, z.values()), lag.wz_sum, dot(wz, wz)};
}

/// Solves [n, s; s, q] [a; rho] = [0; I] by Cramer's rule.
inline SarCoefficients solve_normal_equations(const SarMoments& m) {
  const double nd = static_cast<double>(m.n);
  const double det = nd * m.wz_sq - m.wz_sum * m.wz_sum;
  if (!(std::abs(det) > 0.0))
    throw Error(ErrorCode::DegenerateLag, "normal equations are singular");
  return {-m.wz_sum * m.i_value / det, nd * m.i_value / det};
}

/// Coefficients from delta = z'eps via the residual-aware normal equations
///   I*rho = n - delta,  s*a + q*rho = I.
inline SarCoefficients coefficients_from_delta(std::size_t n, double delta,
                                               double i_value, double wz_sum,
                                               double wz_sq) {
  if (std::abs(i_value) < tol::kZeroMoran)
    throw Error(ErrorCode::ZeroMoran, "Moran's index is zero");
  if (wz_sum == 0.0)
    throw Error(ErrorCode::DegenerateLag, "(Wz)'o is zero; intercept not identified this way");
  const double nd = static_cast<double>(n);
  const double a = ((nd - delta) * wz_sq - i_value * i_value) / (-i_value * wz_sum);
  return {a, (nd - delta) / i_value};
}

/// (Wz)'Wz implied by n(Wz)'Wz = ((Wz)'o)^2 + I^2/R^2.
inline double wz_sq_from_identity(std::size_t n, double i_value, double r_squared,
                                  double wz_sum) {
  if (r_squared < tol::kZeroRSquared)
    throw Error(ErrorCode::ZeroRSquared, "R^2 is zero");
  return (wz_sum * wz_sum + i_value * i_value / r_squared) / static_cast<double>(n);
}

/// rho = n R^2 / I, a = -(R^2 / I) (Wz)'o.
inline SarCoefficients closed_form_from_moran(double i_value, double r_squared,
                                              double wz_sum, std::size_t n) {
  if (std::abs(i_value) < tol::kZeroMoran)
    throw Error(ErrorCode::ZeroMoran, "Moran's index is zero");
  return {-(r_squared / i_value) * wz_sum,
          static_cast<double>(n) * r_squared / i_value};
}

struct TheoreticalCoefficients {
  double a = 0.0;
  double rho = 0.0;
};

/// Error-free model: rho = n / I, a = -(Wz)'o / I.
inline TheoreticalCoefficients theoretical_coefficients(double i_value, double wz_sum,
                                                        std::size_t n) {
  if (std::abs(i_value) < tol::kZeroMoran)
    throw Error(ErrorCode::ZeroMoran, "Moran's index is zero");
  return {-wz_sum / i_value, static_cast<double>(n) / i_value};
}

namespace detail {

inline SarFit sar_from_line(const StandardizedVector& z, const SpatialLag& lag,
                            std::span<const double> predictor) {
  const std::size_t n = z.size();
  if (lag.size() != n)
    throw Error(ErrorCode::DimensionMismatch, "lag and vector sizes differ");

  double lo = predictor[0], hi = predictor[0], scale = 0.0;
  for (double v : predictor) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    scale = std::max(scale, std::abs(v));
  }
  if (hi - lo <= 1e-14 * scale || hi == lo)
    throw Error(ErrorCode::DegenerateLag, "spatial lag is constant");

  const LineFit<double> fit = fit_line(predictor, z.values());
  SarFit s;
  s.n = n;
  s.a_hat = fit.intercept;
  s.rho_hat = fit.slope;
  s.residuals = fit.residuals;
  s.r_squared = fit.r_squared;
  s.se_slope = fit.se_slope;
  s.se_intercept = fit.se_intercept;
  s.exact_fit = fit.exact;
  s.delta = dot(z.values(), std::span<const double>(s.residuals));
  s.i_value = dot(std::span<const double>(lag.wz), z.values());
  s.zero_moran = std::abs(s.i_value) < tol::kZeroMoran;
  s.p_slope = slope_t_test(fit.slope, fit.se_slope, n).p_value;
  s.p_intercept = slope_t_test(fit.intercept, fit.se_intercept, n).p_value;
  return s;
}

}  // namespace detail

/// Least squares fit of z on Wz with intercept.
inline SarFit fit_sar_ols(const StandardizedVector& z, const SpatialLag& lag) {
  return detail::sar_from_line(z, lag, lag.wz);
}

/// Regression of z on the centered lag Wz - (Wz)'o/n. Same slope as
/// fit_sar_ols; the intercept becomes mean(z) = 0.
inline SarFit centered_fit(const StandardizedVector& z, const SpatialLag& lag) {
  std::vector<double> centered(lag.wz);
  const double m = lag.mean();
  for (double& v : centered) v -= m;
  return detail::sar_from_line(z, lag, centered);
}

/// z'eps; equals n(1 - R^2) for a least squares fit.
inline double delta_inner(const StandardizedVector& z, const SarFit& fit) {
  return dot(z.values(), std::span<const double>(fit.residuals));
}

/// n(Wz)'Wz - ((Wz)'o)^2 - I^2/R^2, zero for every least squares instance.
inline double lag_norm_identity_check(const StandardizedVector& z, const SpatialLag& lag,
                                  double i_value, double r_squared) {
  if (lag.size() != z.size())
    throw Error(ErrorCode::DimensionMismatch, "lag and vector sizes differ");
  if (r_squared < tol::kZeroRSquared)
    throw Error(ErrorCode::ZeroRSquared, "z is uncorrelated with its lag");
  const std::span<const double> wz(lag.wz);
  const double nd = static_cast<double>(z.size());
  return nd * dot(wz, wz) - lag.wz_sum * lag.wz_sum - i_value * i_value / r_squared;
}

struct InverseSlopes {
  double b = 0.0;        // slope of y on x
  double b_prime = 0.0;  // slope of x on y
  double product = 0.0;  // b * b' = R^2
};

inline InverseSlopes inverse_slope_relation(std::span<const double> x,
                                            std::span<const double> y) {
  if (x.size() != y.size())
    throw Error(ErrorCode::DimensionMismatch, "vectors differ in length");
  if (x.size() < 2)
    throw Error(ErrorCode::ZeroVariance, "need at least two points");
  const double mx = mean(x), my = mean(y);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0) || !(syy > 0.0))
    throw Error(ErrorCode::ZeroVariance, "constant vector");
  InverseSlopes r;
  r.b = sxy / sxx;
  r.b_prime = sxy / syy;
  r.product = r.b * r.b_prime;
  return r;
}

}  // namespace moransar
