#pragma once

// Synthetic data: random planar layouts and SAR fields for property tests
// and demos.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "moransar/eigen.hpp"
#include "moransar/error.hpp"
#include "moransar/matrix.hpp"
#include "moransar/spatial_data.hpp"

namespace moransar {

struct Instance {
  RawSizeVector sizes;
  Matrix<double> distances;
};

/// Euclidean distances between n uniform points in the unit square.
inline Matrix<double> random_distances(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> px(n), py(n);
  for (std::size_t i = 0; i < n; ++i) {
    px[i] = u(rng);
    py[i] = u(rng);
  }
  Matrix<double> d(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      d(i, j) = d(j, i) = std::hypot(px[i] - px[j], py[i] - py[j]);
  return d;
}

/// Random layout plus log-normal positive sizes.
inline Instance random_instance(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Instance inst;
  inst.distances = random_distances(n, rng);
  std::lognormal_distribution<double> size(0.0, 1.0);
  inst.sizes.values.resize(n);
  inst.sizes.ids.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    inst.sizes.values[i] = size(rng);
    inst.sizes.ids[i] = "c" + std::to_string(i + 1);
  }
  return inst;
}

/// x solving (Id - rho W) x = a o + eta, eta ~ N(0, noise_sd^2) i.i.d.
///
/// W is symmetric, so the solve goes through its eigendecomposition:
/// x = V diag(1 / (1 - rho lambda)) V' b.
inline RawSizeVector simulate_sar(const WeightMatrix& w, double a, double rho,
                                  double noise_sd, std::uint64_t seed) {
  if (a == 0.0 && noise_sd == 0.0)
    throw Error(ErrorCode::DegenerateZeroField, "a = 0 and noise_sd = 0 give the zero field");
  if (noise_sd < 0.0)
    throw Error(ErrorCode::InvalidArgument, "noise_sd must be nonnegative");
  const std::size_t n = w.size();
  const auto spectrum = symmetric_eigen(w.matrix());
  for (double lambda : spectrum.values) {
    const double pivot = 1.0 - rho * lambda;
    if (std::abs(pivot) <= 1e-10 * std::max(1.0, std::abs(rho * lambda)))
      throw Error(ErrorCode::SingularResolvent,
                  "rho is the reciprocal of an eigenvalue of W");
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<double> b(n);
  for (auto& v : b) v = a + noise_sd * noise(rng);

  const Matrix<double>& vec = spectrum.vectors;
  std::vector<double> coeff(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double c = 0.0;
    for (std::size_t i = 0; i < n; ++i) c += vec(i, k) * b[i];
    coeff[k] = c / (1.0 - rho * spectrum.values[k]);
  }
  RawSizeVector out;
  out.values.assign(n, 0.0);
  out.ids.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) out.values[i] += vec(i, k) * coeff[k];
    out.ids[i] = "c" + std::to_string(i + 1);
  }
  return out;
}

}  // namespace moransar
