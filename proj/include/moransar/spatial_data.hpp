#pragma once

// Size vectors and spatial weight structures.
//
// Conventions: z-scores use the population standard deviation so that
// z'z = n, and weight matrices are globally normalized (entries sum to 1)
// rather than row standardized.

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "moransar/error.hpp"
#include "moransar/matrix.hpp"
#include "moransar/tolerance.hpp"

namespace moransar {

struct RawSizeVector {
  std::vector<std::string> ids;  // may be empty for programmatic input
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
};

inline RawSizeVector log_transform(const RawSizeVector& raw) {
  RawSizeVector out = raw;
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    const double v = out.values[i];
    if (!(v > 0.0) || !std::isfinite(v))
      throw Error(ErrorCode::NonPositiveValue,
                  "log transform needs positive values (index " +
                      std::to_string(i) + ")",
                  i);
    out.values[i] = std::log(v);
  }
  return out;
}

class ProximityMatrix;
class WeightMatrix;
inline ProximityMatrix symmetrize(const Matrix<double>& v);
inline WeightMatrix global_normalize(const ProximityMatrix& v);

/// Population-standardized vector: mean 0, z'z = n.
class StandardizedVector {
 public:
  static StandardizedVector from_values(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n < 2)
      throw Error(ErrorCode::InvalidArgument,
                  "at least two elements are required to standardize");
    for (std::size_t i = 0; i < n; ++i)
      if (!std::isfinite(x[i]))
        throw Error(ErrorCode::InvalidArgument, "non-finite value", i);

    const double m = mean(x);
    double ss = 0.0, scale = 0.0;
    for (double v : x) {
      ss += (v - m) * (v - m);
      scale = std::max(scale, std::abs(v));
    }
    const double sd = std::sqrt(ss / static_cast<double>(n));
    if (sd == 0.0 || sd <= 1e-13 * scale)
      throw Error(ErrorCode::ZeroVariance, "all values are equal");

    StandardizedVector out;
    out.mean_ = m;
    out.sd_ = sd;
    out.z_.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.z_[i] = (x[i] - m) / sd;
    return out;
  }

  std::span<const double> values() const noexcept { return z_; }
  double operator[](std::size_t i) const { return z_[i]; }
  std::size_t size() const noexcept { return z_.size(); }
  double source_mean() const noexcept { return mean_; }
  double source_sd() const noexcept { return sd_; }

 private:
  StandardizedVector() = default;
  std::vector<double> z_;
  double mean_ = 0.0;
  double sd_ = 1.0;
};

inline StandardizedVector standardize(const RawSizeVector& raw) {
  return StandardizedVector::from_values(raw.values);
}

inline StandardizedVector standardize(std::span<const double> x) {
  return StandardizedVector::from_values(x);
}

/// Symmetric, zero-diagonal, nonnegative proximity matrix V.
class ProximityMatrix {
 public:
  /// Validates an already symmetric matrix.
  static ProximityMatrix from_symmetric(Matrix<double> v) {
    check_square(v);
    for (std::size_t i = 0; i < v.rows(); ++i) {
      if (v(i, i) != 0.0)
        throw Error(ErrorCode::InvalidArgument, "nonzero diagonal", i, i);
      for (std::size_t j = 0; j < v.cols(); ++j) {
        const double a = v(i, j);
        if (!std::isfinite(a) || a < 0.0)
          throw Error(ErrorCode::InvalidArgument,
                      "proximities must be finite and nonnegative", i, j);
        const double b = v(j, i);
        const double scale = std::max(std::abs(a), std::abs(b));
        if (scale > 0.0 && std::abs(a - b) > tol::kData * scale)
          throw Error(ErrorCode::AsymmetricInput, "proximity not symmetric",
                      i, j);
      }
    }
    return ProximityMatrix(std::move(v), 0.0);
  }

  const Matrix<double>& matrix() const noexcept { return v_; }
  std::size_t size() const noexcept { return v_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return v_(i, j); }
  /// Max relative asymmetry of the input this matrix was built from.
  double input_asymmetry() const noexcept { return input_asymmetry_; }

 private:
  friend ProximityMatrix symmetrize(const Matrix<double>& v);
  ProximityMatrix(Matrix<double> v, double asym)
      : v_(std::move(v)), input_asymmetry_(asym) {}

  static void check_square(const Matrix<double>& v) {
    if (!v.square())
      throw Error(ErrorCode::NonSquare, "proximity matrix must be square");
    if (v.rows() < 2)
      throw Error(ErrorCode::InvalidArgument, "need at least two elements");
  }

  Matrix<double> v_;
  double input_asymmetry_ = 0.0;
};

/// (V + V')/2 with the diagonal forced to zero. The result is exactly
/// symmetric.
inline ProximityMatrix symmetrize(const Matrix<double>& v) {
  if (!v.square())
    throw Error(ErrorCode::NonSquare, "proximity matrix must be square");
  if (v.rows() < 2)
    throw Error(ErrorCode::InvalidArgument, "need at least two elements");
  const std::size_t n = v.rows();
  Matrix<double> s(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!(v(i, j) >= 0.0) || !(v(j, i) >= 0.0) || !std::isfinite(v(i, j)) ||
          !std::isfinite(v(j, i)))
        throw Error(ErrorCode::InvalidArgument,
                    "proximities must be finite and nonnegative", i, j);
      const double avg = 0.5 * (v(i, j) + v(j, i));
      s(i, j) = avg;
      s(j, i) = avg;
    }
  return ProximityMatrix(std::move(s), max_relative_asymmetry(v));
}

enum class SymmetryPolicy {
  automatic,  // symmetrize, caller warns if input_asymmetry() > kAsymmetry
  strict,     // AsymmetricInput beyond kAsymmetry
};

/// v_ij = 1/d_ij off the diagonal; the diagonal of `distances` is ignored.
inline ProximityMatrix inverse_distance_proximity(
    const Matrix<double>& distances,
    SymmetryPolicy policy = SymmetryPolicy::automatic) {
  if (!distances.square())
    throw Error(ErrorCode::NonSquare, "distance matrix must be square");
  const std::size_t n = distances.rows();
  if (n < 2)
    throw Error(ErrorCode::InvalidArgument, "need at least two elements");

  Matrix<double> v(n, n);
  double worst = 0.0;
  std::pair<std::size_t, std::size_t> worst_at{0, 0};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double d = distances(i, j);
      if (d == 0.0)
        throw Error(ErrorCode::ZeroDistance,
                    "zero distance between distinct elements " +
                        std::to_string(i) + " and " + std::to_string(j),
                    i, j);
      if (!(d > 0.0) || !std::isfinite(d))
        throw Error(ErrorCode::InvalidArgument,
                    "distances must be finite and positive", i, j);
      v(i, j) = 1.0 / d;
      if (j > i) {
        const double e = distances(j, i);
        const double rel = std::abs(d - e) / std::max(d, e);
        if (rel > worst) {
          worst = rel;
          worst_at = {i, j};
        }
      }
    }
  if (policy == SymmetryPolicy::strict && worst > tol::kAsymmetry)
    throw Error(ErrorCode::AsymmetricInput,
                "distance matrix asymmetric (relative " + std::to_string(worst) +
                    ")",
                worst_at.first, worst_at.second);
  return symmetrize(v);
}

/// Globally normalized weight matrix W = V / V0.
class WeightMatrix {
 public:
  const Matrix<double>& matrix() const noexcept { return w_; }
  std::size_t size() const noexcept { return w_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return w_(i, j); }
  double v0() const noexcept { return v0_; }

 private:
  friend WeightMatrix global_normalize(const ProximityMatrix& v);
  WeightMatrix(Matrix<double> w, double v0) : w_(std::move(w)), v0_(v0) {}
  Matrix<double> w_;
  double v0_ = 1.0;
};

inline WeightMatrix global_normalize(const ProximityMatrix& v) {
  const double v0 = v.matrix().sum();
  if (!(v0 > 0.0))
    throw Error(ErrorCode::DegenerateMatrix, "proximity entries sum to zero");
  const std::size_t n = v.size();
  Matrix<double> w(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) w(i, j) = v(i, j) / v0;
  return WeightMatrix(std::move(w), v0);
}

struct SpatialLag {
  std::vector<double> wz;
  double wz_sum = 0.0;  // (Wz)'o

  std::size_t size() const noexcept { return wz.size(); }
  double mean() const { return wz_sum / static_cast<double>(wz.size()); }
};

inline SpatialLag spatial_lag(const WeightMatrix& w, std::span<const double> z) {
  if (w.size() != z.size())
    throw Error(ErrorCode::DimensionMismatch,
                "weight matrix and vector sizes differ");
  SpatialLag lag;
  lag.wz = multiply(w.matrix(), z);
  lag.wz_sum = sum<double>(lag.wz);
  return lag;
}

inline SpatialLag spatial_lag(const WeightMatrix& w, const StandardizedVector& z) {
  return spatial_lag(w, z.values());
}

}  // namespace moransar
