#pragma once

// Rayleigh-quotient value ranges for Moran's index and the SAR coefficient:
//   range 1: lambda_min(W)     <= I/n                      <= lambda_max(W)
//   range 2: lambda_min(W'W)   <= ((Wz)'o/n)^2 + I^2/n^2    <= lambda_max(W'W)
//   range 3: 0                 <= I^2/n                    <= (Wz)'Wz
// Empirical twins replace 1/rho by R^2/rho_hat and I^2 by I^2/R^2.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "moransar/eigen.hpp"
#include "moransar/error.hpp"
#include "moransar/matrix.hpp"
#include "moransar/spatial_data.hpp"
#include "moransar/tolerance.hpp"

namespace moransar {

/// Closed or half-open interval; a missing end is unbounded.
struct Interval {
  std::optional<double> lower;
  std::optional<double> upper;

  bool contains(double x) const {
    return (!lower || x >= *lower) && (!upper || x <= *upper);
  }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Union of intervals. When the eigenvalue interval straddles zero the set
/// of admissible rho is two rays.
struct RhoRange {
  std::vector<Interval> pieces;

  bool contains(double x) const {
    return std::any_of(pieces.begin(), pieces.end(),
                       [x](const Interval& p) { return p.contains(x); });
  }
  friend bool operator==(const RhoRange&, const RhoRange&) = default;
};

/// { rho : c / rho in [lo, hi] } for c > 0.
inline RhoRange reciprocal_range(double lo, double hi, double c = 1.0) {
  if (lo > hi) throw Error(ErrorCode::InvalidArgument, "empty interval");
  if (!(c > 0.0)) throw Error(ErrorCode::InvalidArgument, "scale must be positive");
  RhoRange r;
  if (lo > 0.0 || hi < 0.0) {
    r.pieces.push_back({c / hi, c / lo});
  } else {
    if (lo < 0.0) r.pieces.push_back({std::nullopt, c / lo});
    if (hi > 0.0) r.pieces.push_back({c / hi, std::nullopt});
  }
  return r;
}

namespace detail {

inline bool within(double lo, double x, double hi) {
  const double slack = tol::kEigen * std::max({std::abs(lo), std::abs(hi), 1e-300});
  return x >= lo - slack && x <= hi + slack;
}

}  // namespace detail

struct MoranRange {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double i_over_n = 0.0;
  bool contained = false;
  RhoRange rho_theoretical;  // 1/rho in [lambda_min, lambda_max]
  // Empirical twin: I/n = R^2/rho_hat.
  double r_squared = 1.0;
  RhoRange rho_empirical;  // R^2/rho_hat in [lambda_min, lambda_max]
  std::optional<double> r2_over_rho;
  std::optional<bool> empirical_contained;

  friend bool operator==(const MoranRange&, const MoranRange&) = default;
};

inline MoranRange range_moran(const EigenSpectrum<double>& w_spectrum, double i_value,
                              std::size_t n, double r_squared = 1.0,
                              std::optional<double> rho_hat = std::nullopt) {
  if (w_spectrum.values.empty())
    throw Error(ErrorCode::InvalidArgument, "empty spectrum");
  MoranRange r;
  r.lambda_min = w_spectrum.values.front();
  r.lambda_max = w_spectrum.values.back();
  r.i_over_n = i_value / static_cast<double>(n);
  r.contained = detail::within(r.lambda_min, r.i_over_n, r.lambda_max);
  r.rho_theoretical = reciprocal_range(r.lambda_min, r.lambda_max);
  r.r_squared = r_squared;
  if (r_squared > 0.0)
    r.rho_empirical = reciprocal_range(r.lambda_min, r.lambda_max, r_squared);
  if (rho_hat && *rho_hat != 0.0) {
    r.r2_over_rho = r_squared / *rho_hat;
    r.empirical_contained = detail::within(r.lambda_min, *r.r2_over_rho, r.lambda_max);
  }
  return r;
}

inline MoranRange range_moran(const WeightMatrix& w, double i_value, std::size_t n) {
  return range_moran(symmetric_eigen(w.matrix()), i_value, n);
}

struct QuadraticRange {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double lhs_theoretical = 0.0;  // ((Wz)'o/n)^2 + I^2/n^2
  bool contained = false;
  std::optional<double> lhs_empirical;  // ((Wz)'o/n)^2 + I^2/(R^2 n^2)
  std::optional<bool> empirical_contained;

  friend bool operator==(const QuadraticRange&, const QuadraticRange&) = default;
};

/// `wtw_spectrum` is the spectrum of W'W. The empirical form is omitted
/// when R^2 is zero.
inline QuadraticRange range_quadratic(const EigenSpectrum<double>& wtw_spectrum,
                                      const SpatialLag& lag, double i_value,
                                      double r_squared, std::size_t n) {
  if (wtw_spectrum.values.empty())
    throw Error(ErrorCode::InvalidArgument, "empty spectrum");
  const double nd = static_cast<double>(n);
  const double mean_term = (lag.wz_sum / nd) * (lag.wz_sum / nd);
  QuadraticRange r;
  r.lambda_min = wtw_spectrum.values.front();
  r.lambda_max = wtw_spectrum.values.back();
  r.lhs_theoretical = mean_term + i_value * i_value / (nd * nd);
  r.contained = detail::within(r.lambda_min, r.lhs_theoretical, r.lambda_max);
  if (r_squared >= tol::kZeroRSquared) {
    r.lhs_empirical = mean_term + i_value * i_value / (r_squared * nd * nd);
    r.empirical_contained = detail::within(r.lambda_min, *r.lhs_empirical, r.lambda_max);
  }
  return r;
}

struct OuterRange {
  double lambda_min = 0.0;  // rank one: always 0
  double lambda_max = 0.0;  // (Wz)'Wz
  double i_sq_over_n = 0.0;
  bool contained = false;
  double rho_sq_min = 0.0;  // rho^2 >= n / (Wz)'Wz
  double slack = 0.0;       // n (Wz)'Wz - I^2
  // ((Wz)'o)^2 + I^2 (1/R^2 - 1); equals `slack` for least squares data.
  std::optional<double> slack_identity;

  friend bool operator==(const OuterRange&, const OuterRange&) = default;
};

inline OuterRange range_outer(const SpatialLag& lag, double i_value, std::size_t n,
                              std::optional<double> r_squared = std::nullopt) {
  const std::span<const double> wz(lag.wz);
  const double nd = static_cast<double>(n);
  OuterRange r;
  r.lambda_max = dot(wz, wz);
  r.i_sq_over_n = i_value * i_value / nd;
  r.contained = detail::within(0.0, r.i_sq_over_n, r.lambda_max);
  r.rho_sq_min = r.lambda_max > 0.0 ? nd / r.lambda_max : 0.0;
  r.slack = nd * r.lambda_max - i_value * i_value;
  if (r_squared && *r_squared >= tol::kZeroRSquared)
    r.slack_identity =
        lag.wz_sum * lag.wz_sum + i_value * i_value * (1.0 / *r_squared - 1.0);
  return r;
}

struct BoundsReport {
  MoranRange range1;
  QuadraticRange range2;
  OuterRange range3;
  // Numerical spectrum of the rank-one matrix W'zz'W.
  double outer_lambda_max_numeric = 0.0;
  double outer_other_max_abs = 0.0;
  // Informational only: |I| <= 1 by analogy with Pearson's r.
  bool pearson_bound = true;

  friend bool operator==(const BoundsReport&, const BoundsReport&) = default;
};

/// All three ranges with both spectra computed by Jacobi.
inline BoundsReport compute_bounds(const WeightMatrix& w, const SpatialLag& lag,
                                   double i_value, double r_squared,
                                   std::optional<double> rho_hat = std::nullopt) {
  const std::size_t n = w.size();
  if (lag.size() != n)
    throw Error(ErrorCode::DimensionMismatch, "lag and weight matrix sizes differ");
  BoundsReport b;
  b.range1 = range_moran(symmetric_eigen(w.matrix()), i_value, n, r_squared, rho_hat);
  const Matrix<double> wtw = multiply(w.matrix().transpose(), w.matrix());
  b.range2 = range_quadratic(symmetric_eigen(wtw), lag, i_value, r_squared, n);
  b.range3 = range_outer(lag, i_value, n, r_squared);

  const std::span<const double> wz(lag.wz);
  const auto outer_spectrum = symmetric_eigen(outer(wz, wz));
  b.outer_lambda_max_numeric = outer_spectrum.values.back();
  for (std::size_t k = 0; k + 1 < outer_spectrum.values.size(); ++k)
    b.outer_other_max_abs = std::max(b.outer_other_max_abs, std::abs(outer_spectrum.values[k]));
  b.pearson_bound = std::abs(i_value) <= 1.0 + tol::kExact;
  return b;
}

}  // namespace moransar
