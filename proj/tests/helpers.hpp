#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "moransar.hpp"

namespace testing_support {

namespace ms = moransar;

struct Case {
  std::vector<double> x;
  ms::Matrix<double> d;
  ms::StandardizedVector z;
  ms::ProximityMatrix v;
  ms::WeightMatrix w;
  ms::SpatialLag lag;

  std::vector<double> zv() const { return {z.values().begin(), z.values().end()}; }
};

inline Case make_case(std::vector<double> x, ms::Matrix<double> d) {
  auto z = ms::standardize(std::span<const double>(x));
  auto v = ms::inverse_distance_proximity(d);
  auto w = ms::global_normalize(v);
  auto lag = ms::spatial_lag(w, z);
  return {std::move(x), std::move(d), std::move(z), std::move(v), std::move(w), std::move(lag)};
}

inline Case two_city() { return make_case({1.0, 2.0}, {{0.0, 1.0}, {1.0, 0.0}}); }

inline Case chain(std::vector<double> x = {1.0, 2.0, 3.0}) {
  return make_case(std::move(x), {{0.0, 1.0, 2.0}, {1.0, 0.0, 1.0}, {2.0, 1.0, 0.0}});
}

inline Case random_case(std::size_t n, std::uint64_t seed) {
  ms::Instance inst = ms::random_instance(n, seed);
  return make_case(inst.sizes.values, inst.distances);
}

/// n cycles through 3..40 as the seed advances.
inline std::size_t size_for(std::uint64_t k) { return 3 + k % 38; }

}  // namespace testing_support
