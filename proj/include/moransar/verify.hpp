#pragma once

// Self-check suite behind `moransar verify`: closed-form fixtures plus the
// algebraic identities over seeded random instances.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "moransar/bounds.hpp"
#include "moransar/eigen.hpp"
#include "moransar/inference.hpp"
#include "moransar/report.hpp"
#include "moransar/sar.hpp"
#include "moransar/synthetic.hpp"

namespace moransar {

struct CheckLine {
  std::string name;
  bool pass = true;
  std::string detail;
};

struct VerifyReport {
  std::vector<CheckLine> checks;
  std::vector<std::string> notes;  // informational, never fail the run
  double seconds = 0.0;

  bool ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckLine& c) { return c.pass; });
  }
};

struct VerifyOptions {
  std::size_t instances = 1000;
  std::uint64_t base_seed = 20240917;
  std::size_t min_n = 3;
  std::size_t max_n = 40;
};

namespace verify_detail {

inline std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

inline bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

inline AnalysisConfig quiet_config() {
  AnalysisConfig cfg;
  cfg.permutations = 0;
  cfg.record_timestamp = false;
  return cfg;
}

inline AnalysisInput input_of(std::vector<double> values, Matrix<double> d) {
  AnalysisInput in;
  in.sizes.values = std::move(values);
  for (std::size_t i = 0; i < in.sizes.values.size(); ++i)
    in.sizes.ids.push_back("c" + std::to_string(i + 1));
  in.distances = std::move(d);
  return in;
}

}  // namespace verify_detail

/// Two cities at distance 1 with sizes 1 and 2.
inline AnalysisInput two_city_fixture() {
  return verify_detail::input_of({1.0, 2.0}, Matrix<double>{{0.0, 1.0}, {1.0, 0.0}});
}

/// Three cities on a line, x = [1, 2, 3], unit spacing.
inline AnalysisInput chain_fixture() {
  return verify_detail::input_of({1.0, 2.0, 3.0},
                                 Matrix<double>{{0.0, 1.0, 2.0}, {1.0, 0.0, 1.0}, {2.0, 1.0, 0.0}});
}

inline VerifyReport run_verify(const VerifyOptions& opt = {}) {
  using namespace verify_detail;
  const auto start = std::chrono::steady_clock::now();
  VerifyReport out;
  auto check = [&](std::string name, bool pass, std::string detail) {
    out.checks.push_back({std::move(name), pass, std::move(detail)});
  };

  // Two cities: everything is closed form.
  {
    const AnalysisReport r = analyze_data(two_city_fixture(), quiet_config());
    const std::vector<double> z(r.z);
    const DwResult dw = spatial_durbin_watson(z, global_normalize(inverse_distance_proximity(
                                                    two_city_fixture().distances)));
    const bool pass = near(r.moran.i_value, -1.0, 1e-10) && near(r.sar.rho_hat, -2.0, 1e-10) &&
                      near(r.sar.a_hat, 0.0, 1e-10) && near(r.sar.r_squared, 1.0, 1e-10) &&
                      near(r.sar.delta, 0.0, 1e-10) && near(dw.dw, 2.0, 1e-10) &&
                      r.all_identities_pass();
    check("two_city_fixture", pass,
          fmt("I=%.12g rho=%.12g DW=%.12g", r.moran.i_value, r.sar.rho_hat, dw.dw));
    check("two_city_lower_bound_attained", near(r.bounds.range1.i_over_n, r.bounds.range1.lambda_min, 1e-10),
          fmt("I/n=%.12g lambda_min=%.12g", r.bounds.range1.i_over_n, r.bounds.range1.lambda_min));
  }

  // Chain: Wz = -0.1 z.
  {
    const AnalysisReport r = analyze_data(chain_fixture(), quiet_config());
    const bool pass = near(r.moran.i_value, -0.3, 1e-10) && near(r.sar.rho_hat, -10.0, 1e-10) &&
                      near(r.sar.r_squared, 1.0, 1e-10) && r.all_identities_pass();
    check("chain_fixture", pass,
          fmt("I=%.12g rho=%.12g R2=%.12g", r.moran.i_value, r.sar.rho_hat, r.sar.r_squared));
  }

  // Reference scalars for one 35-city series.
  {
    const std::size_t n = 35;
    const double i = 0.1248, r2 = 0.2301, s = -0.1427;
    const SarCoefficients c = closed_form_from_moran(i, r2, s, n);
    const bool pass = std::abs(c.a - 0.2631) <= 0.002 &&
                      std::abs(c.rho - 64.5515) <= 5e-3 * 64.5515 &&
                      std::abs(c.rho * i - 35 * r2) <= 0.01;
    check("reference_scalars_coefficients", pass,
          fmt("a=%.6g rho=%.6g rho*I=%.6g", c.a, c.rho, c.rho * i));
    const double q = wz_sq_from_identity(n, i, r2, s);
    const double lhs = static_cast<double>(n) * q - i * i / r2;
    check("reference_scalars_quadratic_identity",
          std::abs(lhs - 0.0204) <= 5e-4 && std::abs(s * s - 0.0204) <= 5e-4,
          fmt("n(Wz)'Wz - I^2/R^2=%.6g ((Wz)'o)^2=%.6g", lhs, s * s));
  }

  // DW bands for n = 35, alpha = 0.05.
  {
    const DwCriticalValues cv = CriticalValueTable::bundled().lookup(35, 0.05);
    const bool pass = dw_interpret(1.30, cv) == DwClass::positive &&
                      dw_interpret(1.45, cv) == DwClass::inconclusive &&
                      dw_interpret(1.7687, cv) == DwClass::none &&
                      dw_interpret(2.0, cv) == DwClass::none &&
                      dw_interpret(2.55, cv) == DwClass::inconclusive &&
                      dw_interpret(2.7, cv) == DwClass::negative;
    check("dw_bands", pass, "thresholds 1.402 / 1.519 / 2.481 / 2.598");
  }

  // Permutation p for two cities is exactly 1.
  {
    const AnalysisInput in = two_city_fixture();
    const StandardizedVector z = standardize(in.sizes);
    const WeightMatrix w = global_normalize(inverse_distance_proximity(in.distances));
    const SignificanceResult p = permutation_test(z, w, {999, 1, Sidedness::two_sided, 1});
    check("two_city_permutation", p.p_value == 1.0, fmt("p=%.17g", p.p_value));
  }

  // Random instances.
  std::size_t failures[9] = {};
  double worst[9] = {};
  std::size_t quad_outside = 0, emp1_outside = 0, emp2_outside = 0;
  const char* names[9] = {"rho_i_equals_n_r2",        "delta_equals_n_one_minus_r2",
                          "lag_norm_identity",  "paired_slope_p_values",
                          "residual_orthogonality",   "quadratic_form_equals_double_sum",
                          "dw_equals_twice_geary",    "spectral_relations",
                          "moran_and_outer_ranges"};
  const std::size_t span_n = opt.max_n - opt.min_n + 1;
  for (std::size_t k = 0; k < opt.instances; ++k) {
    const std::uint64_t seed = opt.base_seed + k;
    const std::size_t n = opt.min_n + k % span_n;
    const Instance inst = random_instance(n, seed);
    AnalysisInput in;
    in.sizes = inst.sizes;
    in.distances = inst.distances;
    const AnalysisReport r = analyze_data(in, quiet_config());

    auto flag = [&](std::size_t slot, const IdentityCheck& c) {
      if (c.skipped) return;
      worst[slot] = std::max(worst[slot], c.tolerance > 0 ? c.slack / c.tolerance : c.slack);
      if (!c.pass) ++failures[slot];
    };
    for (const IdentityCheck& c : r.identities) {
      if (c.name == "rho_i_equals_n_r2") flag(0, c);
      else if (c.name == "delta_equals_n_one_minus_r2") flag(1, c);
      else if (c.name == "lag_norm_identity") flag(2, c);
      else if (c.name == "paired_slope_p_values") flag(3, c);
      else if (c.name == "lag_orthogonal_to_residuals" || c.name == "ones_orthogonal_to_residuals")
        flag(4, c);
      else if (c.name == "quadratic_form_equals_double_sum") flag(5, c);
      else if (c.name == "dw_equals_twice_geary") flag(6, c);
    }

    const WeightMatrix w = global_normalize(inverse_distance_proximity(in.distances));
    const auto sw = symmetric_eigen(w.matrix());
    const auto swtw = symmetric_eigen(multiply(w.matrix().transpose(), w.matrix()));
    std::vector<double> squared;
    for (double v : sw.values) squared.push_back(v * v);
    std::sort(squared.begin(), squared.end());
    double spec_gap = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      spec_gap = std::max(spec_gap, std::abs(squared[j] - swtw.values[j]));
    const std::span<const double> wz(r.wz);
    const bool spectral = spec_gap <= 1e-9 &&
                          std::abs(r.bounds.outer_lambda_max_numeric - dot(wz, wz)) <= 1e-10 &&
                          r.eigen.residual <= tol::kEigen;
    worst[7] = std::max(worst[7], spec_gap);
    if (!spectral) ++failures[7];
    if (!(r.bounds.range1.contained && r.bounds.range3.contained)) ++failures[8];
    if (!r.bounds.range2.contained) ++quad_outside;
    if (r.bounds.range1.empirical_contained && !*r.bounds.range1.empirical_contained) ++emp1_outside;
    if (r.bounds.range2.empirical_contained && !*r.bounds.range2.empirical_contained) ++emp2_outside;
  }
  for (std::size_t s = 0; s < 9; ++s)
    check(std::string("random_") + names[s], failures[s] == 0,
          std::to_string(opt.instances - failures[s]) + "/" + std::to_string(opt.instances) +
              fmt(" pass, worst %.3g", worst[s]));

  const std::string of = "/" + std::to_string(opt.instances);
  out.notes.push_back("quadratic range (W'W spectrum) violated on " + std::to_string(quad_outside) +
                      of + " instances; the bound is not a theorem, see README");
  out.notes.push_back("empirical Moran range violated on " + std::to_string(emp1_outside) + of);
  out.notes.push_back("empirical quadratic range violated on " + std::to_string(emp2_outside) + of);

  out.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace moransar
