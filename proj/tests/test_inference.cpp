#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "helpers.hpp"
#include "oracles.hpp"

namespace ms = moransar;
namespace ts = testing_support;

TEST(SlopeTTest, MatchesQuadratureOfTheDensity) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> slope(-3.0, 3.0), se(0.2, 2.0);
  for (int rep = 0; rep < 25; ++rep) {
    const std::size_t n = 3 + rep * 3;
    const double b = slope(rng), s = se(rng);
    const auto r = ms::slope_t_test(b, s, n);
    EXPECT_EQ(r.method, ms::TestMethod::t_test);
    EXPECT_DOUBLE_EQ(r.statistic, b / s);
    EXPECT_NEAR(r.p_value, oracle::t_two_sided(b / s, static_cast<double>(n - 2)), 1e-6);
  }
}

TEST(SlopeTTest, SeededInstanceAgainstQuadrature) {
  const auto c = ts::random_case(35, 2010);
  const auto m = ms::inner_regression(c.z, c.w);
  EXPECT_NEAR(m.slope_p_value, oracle::t_two_sided(m.slope / m.se_slope, 33.0), 1e-6);
}

TEST(SlopeTTest, DegenerateAndInvalid) {
  const auto r = ms::slope_t_test(-2.0, 0.0, 2);
  EXPECT_TRUE(r.degenerate);
  EXPECT_EQ(r.p_value, 0.0);
  EXPECT_THROW(ms::slope_t_test(1.0, 0.5, 2), ms::Error);
  EXPECT_THROW(ms::slope_t_test(1.0, -0.5, 10), ms::Error);
}

TEST(SlopeTTest, PairedPValuesAgree) {
  for (std::uint64_t k = 0; k < 500; ++k) {
    const auto c = ts::random_case(ts::size_for(k), 31000 + k);
    const auto m = ms::inner_regression(c.z, c.w);
    const auto f = ms::fit_sar_ols(c.z, c.lag);
    ASSERT_NEAR(m.slope_p_value, f.p_slope, 1e-9) << k;
  }
}

TEST(Permutation, TwoCityIsExactlyOne) {
  const auto c = ts::two_city();
  for (std::size_t m : {1, 5, 999}) {
    const auto r = ms::permutation_test(c.z, c.w, {m, 9, ms::Sidedness::two_sided, 1});
    EXPECT_EQ(r.p_value, 1.0);
    EXPECT_EQ(r.method, ms::TestMethod::permutation);
  }
}

TEST(Permutation, ExhaustiveMatchesEnumerationOracle) {
  for (std::uint64_t k = 0; k < 20; ++k) {
    const auto c = ts::random_case(5, 50 + k);
    const double exact = oracle::exhaustive_p(c.zv(), c.w.matrix());
    const auto full = ms::permutation_test(c.z, c.w, {119, 1, ms::Sidedness::two_sided, 1});
    EXPECT_TRUE(full.exhaustive);
    EXPECT_DOUBLE_EQ(full.p_value, exact);
    const auto big = ms::permutation_test(c.z, c.w, {999, 1, ms::Sidedness::two_sided, 1});
    EXPECT_LE(std::abs(big.p_value - exact), 2.0 / 1000.0);
  }
}

TEST(Permutation, SampledApproachesExhaustive) {
  // m < n! - 1 draws distinct relabellings; error shrinks as m -> 119.
  const auto c = ts::random_case(5, 8);
  const double exact = oracle::exhaustive_p(c.zv(), c.w.matrix());
  double prev_err = 1.0;
  for (std::size_t m : {30, 80, 118}) {
    const auto r = ms::permutation_test(c.z, c.w, {m, 4, ms::Sidedness::two_sided, 1});
    EXPECT_FALSE(r.exhaustive);
    const double err = std::abs(r.p_value - exact);
    EXPECT_LE(err, 3.0 * std::sqrt(exact * (1 - exact) / m) + 1.0 / (m + 1));
    prev_err = err;
  }
  EXPECT_LE(prev_err, 2.0 / 119.0);
}

TEST(Permutation, ClusteredFieldIsSignificant) {
  const ms::Instance layout = ms::random_instance(30, 17);
  const auto w = ms::global_normalize(ms::inverse_distance_proximity(layout.distances));
  const double lmax = ms::symmetric_eigen(w.matrix()).values.back();
  const auto x = ms::simulate_sar(w, 1.0, 0.95 / lmax, 0.05, 99);
  const auto z = ms::standardize(x);
  const auto r = ms::permutation_test(z, w, {999, 12345, ms::Sidedness::two_sided, 1});
  EXPECT_LE(r.p_value, 0.05);
}

TEST(Permutation, DeterministicAcrossWorkers) {
  for (std::size_t n : {7, 12, 25}) {
    const auto c = ts::random_case(n, 300 + n);
    const auto one = ms::permutation_test(c.z, c.w, {999, 2024, ms::Sidedness::two_sided, 1});
    const auto four = ms::permutation_test(c.z, c.w, {999, 2024, ms::Sidedness::two_sided, 4});
    const auto again = ms::permutation_test(c.z, c.w, {999, 2024, ms::Sidedness::two_sided, 3});
    EXPECT_EQ(one, four);
    EXPECT_EQ(one, again);
  }
}

TEST(Permutation, SidednessAndArguments) {
  const auto c = ts::random_case(10, 5);
  const auto two = ms::permutation_test(c.z, c.w, {499, 1, ms::Sidedness::two_sided, 1});
  const auto gt = ms::permutation_test(c.z, c.w, {499, 1, ms::Sidedness::greater, 1});
  const auto lt = ms::permutation_test(c.z, c.w, {499, 1, ms::Sidedness::less, 1});
  // Same relabellings: the tail on the side of the observed I is a subset
  // of the two-sided event.
  EXPECT_LE(two.statistic > 0 ? gt.p_value : lt.p_value, two.p_value);
  EXPECT_GE(gt.p_value + lt.p_value, 1.0);
  EXPECT_THROW(ms::permutation_test(c.z, c.w, {0, 1, ms::Sidedness::two_sided, 1}), ms::Error);
}

TEST(ResidualMoran, Examples) {
  const auto c = ts::two_city();
  EXPECT_DOUBLE_EQ(ms::residual_moran(c.zv(), c.w), -1.0);
  const std::vector<double> flat{1, 1};
  EXPECT_THROW(ms::residual_moran(flat, c.w), ms::Error);
  for (std::uint64_t k = 0; k < 200; ++k) {
    const auto r = ts::random_case(ts::size_for(k), 800 + k);
    const auto f = ms::fit_sar_ols(r.z, r.lag);
    const double i_e = ms::residual_moran(f.residuals, r.w);
    EXPECT_NEAR(i_e, ms::moran_index(ms::standardize(f.residuals), r.w), 1e-12);
    EXPECT_NEAR(i_e, oracle::quad(oracle::zscore(f.residuals), r.w.matrix()), 1e-12);
  }
}

TEST(DurbinWatson, TwoCity) {
  const auto c = ts::two_city();
  const std::vector<double> e{-1.0, 1.0};
  const auto r = ms::spatial_durbin_watson(e, c.w);
  EXPECT_DOUBLE_EQ(r.weighted_square_sum, 1.0);
  EXPECT_DOUBLE_EQ(r.i_e, -1.0);
  EXPECT_DOUBLE_EQ(r.dw, 2.0);
  EXPECT_DOUBLE_EQ(r.geary_c, 1.0);
  EXPECT_FALSE(r.classification);
}

TEST(DurbinWatson, EqualsTwiceGearyPairwise) {
  for (std::uint64_t k = 0; k < 1000; ++k) {
    const auto c = ts::random_case(ts::size_for(k), 12000 + k);
    const auto f = ms::fit_sar_ols(c.z, c.lag);
    const auto r = ms::spatial_durbin_watson(f.residuals, c.w);
    ASSERT_NEAR(r.dw, 2.0 * oracle::geary_pairwise(f.residuals, c.w.matrix()), 1e-10) << k;
    ASSERT_NEAR(r.dw, 2.0 * ms::geary_c(f.residuals, c.w.matrix()), 1e-10) << k;
    EXPECT_DOUBLE_EQ(r.dw, 2 * r.geary_c);
  }
}

TEST(DurbinWatson, ConstantResidualsRejected) {
  const auto c = ts::chain();
  const std::vector<double> flat{0.5, 0.5, 0.5};
  EXPECT_THROW(ms::spatial_durbin_watson(flat, c.w), ms::Error);
}

TEST(DwInterpret, ReferenceBands) {
  const auto cv = ms::CriticalValueTable::bundled().lookup(35, 0.05);
  EXPECT_EQ(cv.d_l, 1.402);
  EXPECT_EQ(cv.d_u, 1.519);
  EXPECT_EQ(ms::dw_interpret(1.7687, cv), ms::DwClass::none);
  EXPECT_EQ(ms::dw_interpret(1.9881, cv), ms::DwClass::none);
  EXPECT_EQ(ms::dw_interpret(2.0, cv), ms::DwClass::none);
  EXPECT_EQ(ms::dw_interpret(1.30, cv), ms::DwClass::positive);
  EXPECT_EQ(ms::dw_interpret(1.401, cv), ms::DwClass::positive);
  EXPECT_EQ(ms::dw_interpret(1.45, cv), ms::DwClass::inconclusive);
  EXPECT_EQ(ms::dw_interpret(1.519, cv), ms::DwClass::none);
  EXPECT_EQ(ms::dw_interpret(2.4809, cv), ms::DwClass::none);
  EXPECT_EQ(ms::dw_interpret(2.55, cv), ms::DwClass::inconclusive);
  EXPECT_EQ(ms::dw_interpret(2.599, cv), ms::DwClass::negative);
  // Any table: 2.0 sits in the no-autocorrelation band.
  EXPECT_EQ(ms::dw_interpret(2.0, {20, 0.01, 0.95, 1.15}), ms::DwClass::none);
}

TEST(DwInterpret, TableLookupAndValidation) {
  auto table = ms::CriticalValueTable::bundled();
  EXPECT_EQ(table.size(), 1u);
  try {
    table.lookup(20, 0.05);
    FAIL();
  } catch (const ms::Error& e) {
    EXPECT_EQ(e.code(), ms::ErrorCode::MissingCriticalValues);
  }
  table.add({20, 0.05, 1.201, 1.411});
  EXPECT_EQ(table.lookup(20, 0.05).d_u, 1.411);
  EXPECT_THROW(table.add({20, 0.05, 1.5, 1.4}), ms::Error);
  EXPECT_THROW(table.add({20, 0.05, 0.0, 1.4}), ms::Error);
  EXPECT_THROW(table.add({20, 0.05, 1.5, 2.1}), ms::Error);
}
