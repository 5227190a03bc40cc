#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string_view>

#include <boost/math/distributions/students_t.hpp>

#include "moransar/error.hpp"

namespace moransar {

enum class TestMethod { t_test, permutation };

constexpr std::string_view to_string(TestMethod m) {
  return m == TestMethod::t_test ? "t_test" : "permutation";
}

struct SignificanceResult {
  double statistic = 0.0;
  double p_value = 1.0;
  TestMethod method = TestMethod::t_test;
  std::size_t permutations_used = 0;
  std::uint64_t seed = 0;
  // t-test: zero standard error (exact fit), p reported as 0.
  bool degenerate = false;
  // permutation: every distinct relabelling was evaluated.
  bool exhaustive = false;

  friend bool operator==(const SignificanceResult&, const SignificanceResult&) = default;
};

/// Two-tailed Student-t tail probability P(|T| >= |t|) with `df` degrees of
/// freedom.
inline double student_t_two_sided(double t, double df) {
  if (!(df > 0.0))
    throw Error(ErrorCode::InvalidArgument, "t test needs positive degrees of freedom");
  if (std::isinf(t)) return 0.0;
  const boost::math::students_t dist(df);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

/// Two-tailed OLS slope test with n - 2 degrees of freedom.
inline SignificanceResult slope_t_test(double slope, double se, std::size_t n) {
  SignificanceResult r;
  r.method = TestMethod::t_test;
  if (se == 0.0) {
    r.degenerate = true;
    r.p_value = 0.0;
    r.statistic = 0.0;
    return r;
  }
  if (n < 3)
    throw Error(ErrorCode::InvalidArgument, "slope t test needs n >= 3");
  if (!(se > 0.0))
    throw Error(ErrorCode::InvalidArgument, "standard error must be positive");
  r.statistic = slope / se;
  r.p_value = student_t_two_sided(r.statistic, static_cast<double>(n - 2));
  return r;
}

}  // namespace moransar
