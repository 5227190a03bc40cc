#pragma once

// End-to-end analysis: load -> (log) -> standardize -> normalize -> Moran ->
// SAR -> bounds -> inference -> diagnostics, plus report emission.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "moransar/autocorr.hpp"
#include "moransar/bounds.hpp"
#include "moransar/error.hpp"
#include "moransar/inference.hpp"
#include "moransar/io.hpp"
#include "moransar/sar.hpp"
#include "moransar/significance.hpp"
#include "moransar/spatial_data.hpp"
#include "moransar/svg.hpp"
#include "moransar/tolerance.hpp"
#include "moransar/version.hpp"

NLOHMANN_JSON_NAMESPACE_BEGIN
template <typename T>
struct adl_serializer<std::optional<T>> {
  template <typename Json>
  static void to_json(Json& j, const std::optional<T>& v) {
    if (v)
      j = *v;
    else
      j = nullptr;
  }
  template <typename Json>
  static void from_json(const Json& j, std::optional<T>& v) {
    if (j.is_null())
      v.reset();
    else
      v = j.template get<T>();
  }
};
NLOHMANN_JSON_NAMESPACE_END

namespace moransar {

using Json = nlohmann::json;

struct AnalysisConfig {
  std::filesystem::path sizes_path;
  std::filesystem::path dist_path;
  io::DistFormat dist_format = io::DistFormat::matrix;
  SymmetryPolicy symmetrize = SymmetryPolicy::automatic;
  bool log_transform = false;
  std::size_t permutations = 999;
  std::uint64_t seed = 0;
  double alpha = 0.05;
  std::optional<std::filesystem::path> critical_values_path;
  unsigned workers = 1;
  bool record_timestamp = true;
  bool json = true;
  bool csv = true;
  bool svg = false;

  void validate() const {
    if (!(alpha > 0.0 && alpha < 1.0))
      throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
    if (workers == 0) throw Error(ErrorCode::InvalidArgument, "workers must be positive");
  }
};

struct IdentityCheck {
  std::string name;
  bool pass = true;
  double slack = 0.0;      // |lhs - rhs|
  double tolerance = 0.0;  // pass iff slack <= tolerance
  bool skipped = false;
  std::string note;

  friend bool operator==(const IdentityCheck&, const IdentityCheck&) = default;
};

inline IdentityCheck make_check(std::string name, double lhs, double rhs, double tolerance,
                                bool relative = true) {
  IdentityCheck c;
  c.name = std::move(name);
  c.slack = std::abs(lhs - rhs);
  c.tolerance = relative ? tolerance * std::max({1.0, std::abs(lhs), std::abs(rhs)}) : tolerance;
  c.pass = c.slack <= c.tolerance;
  return c;
}

inline IdentityCheck skipped_check(std::string name, std::string note) {
  IdentityCheck c;
  c.name = std::move(name);
  c.skipped = true;
  c.note = std::move(note);
  return c;
}

struct InferenceResults {
  SignificanceResult moran_t;  // slope of nWz on z
  SignificanceResult rho_t;    // slope of z on Wz
  std::optional<SignificanceResult> moran_permutation;
  std::optional<SignificanceResult> residual_permutation;  // I of the SAR residuals

  friend bool operator==(const InferenceResults&, const InferenceResults&) = default;
};

struct Provenance {
  std::string sizes_sha;  // FNV-1a 64 of the input bytes
  std::string dist_sha;
  std::optional<std::string> critical_values_sha;
  std::uint64_t seed = 0;
  std::size_t permutations = 0;
  bool log_transform = false;
  std::string symmetrize;
  double input_asymmetry = 0.0;
  std::string version;
  std::optional<std::string> timestamp;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct AnalysisReport {
  std::size_t n = 0;
  std::vector<std::string> ids;
  std::vector<double> z;
  std::vector<double> wz;
  double alpha = 0.05;
  MoranResult moran;
  SarFit sar;
  EigenCheck eigen;
  BoundsReport bounds;
  InferenceResults inference;
  std::optional<DwResult> diagnostics;
  std::optional<std::string> diagnostics_note;
  std::vector<IdentityCheck> identities;
  ScatterDataset scatter_autocorrelation;
  ScatterDataset scatter_autoregression;
  Provenance provenance;

  bool all_identities_pass() const {
    return std::all_of(identities.begin(), identities.end(),
                       [](const IdentityCheck& c) { return c.skipped || c.pass; });
  }
  friend bool operator==(const AnalysisReport&, const AnalysisReport&) = default;
};

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

NLOHMANN_JSON_SERIALIZE_ENUM(TestMethod, {{TestMethod::t_test, "t_test"},
                                          {TestMethod::permutation, "permutation"}})
NLOHMANN_JSON_SERIALIZE_ENUM(DwClass, {{DwClass::positive, "positive"},
                                       {DwClass::negative, "negative"},
                                       {DwClass::none, "none"},
                                       {DwClass::inconclusive, "inconclusive"}})
NLOHMANN_JSON_SERIALIZE_ENUM(ScatterMode, {{ScatterMode::autocorrelation, "autocorrelation"},
                                           {ScatterMode::autoregression, "autoregression"}})

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(MoranResult, i_value, slope, intercept, r_squared,
                                   residuals_e, se_slope, se_intercept, slope_p_value,
                                   intercept_p_value, p_degenerate, proportional_lag_residual)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SarFit, a_hat, rho_hat, r_squared, delta, se_slope,
                                   se_intercept, p_slope, p_intercept, residuals, n, i_value,
                                   zero_moran, exact_fit)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(EigenCheck, residual, eigenvalue, quadratic_eigen_discrepancy)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(Interval, lower, upper)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(RhoRange, pieces)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(MoranRange, lambda_min, lambda_max, i_over_n, contained,
                                   rho_theoretical, r_squared, rho_empirical, r2_over_rho,
                                   empirical_contained)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(QuadraticRange, lambda_min, lambda_max, lhs_theoretical,
                                   contained, lhs_empirical, empirical_contained)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(OuterRange, lambda_min, lambda_max, i_sq_over_n, contained,
                                   rho_sq_min, slack, slack_identity)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(BoundsReport, range1, range2, range3,
                                   outer_lambda_max_numeric, outer_other_max_abs, pearson_bound)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SignificanceResult, statistic, p_value, method,
                                   permutations_used, seed, degenerate, exhaustive)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(InferenceResults, moran_t, rho_t, moran_permutation,
                                   residual_permutation)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(DwResult, dw, geary_c, i_e, weighted_square_sum,
                                   classification)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(IdentityCheck, name, pass, slack, tolerance, skipped, note)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(TrendLine, slope, intercept, label)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ScatterPoint, x, y)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ScatterDataset, mode, points, theoretical, empirical)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(Provenance, sizes_sha, dist_sha, critical_values_sha, seed,
                                   permutations, log_transform, symmetrize, input_asymmetry,
                                   version, timestamp)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(AnalysisReport, n, ids, z, wz, alpha, moran, sar, eigen,
                                   bounds, inference, diagnostics, diagnostics_note, identities,
                                   scatter_autocorrelation, scatter_autoregression, provenance)

inline std::string to_json_string(const AnalysisReport& r) {
  return Json(r).dump(2) + "\n";
}

inline AnalysisReport report_from_json(const std::string& text) {
  try {
    return Json::parse(text).get<AnalysisReport>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("report json: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Summary CSV
// ---------------------------------------------------------------------------

/// Six significant digits; shared by the summary CSV and its consumers.
inline std::string format_sig6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

/// Rows mirror the coefficient table of the two models:
/// autocorrelation ((Wz)'o, I) and autoregression (a, rho).
inline std::string summary_csv(const AnalysisReport& r) {
  std::string s = "measure,parameter,coefficient,p_value,r_squared\n";
  auto row = [&](const char* measure, const char* parameter, double coef, double p) {
    s += std::string(measure) + "," + parameter + "," + format_sig6(coef) + "," +
         format_sig6(p) + "," + format_sig6(r.sar.r_squared) + "\n";
  };
  row("spatial_autocorrelation", "(Wz)'o", r.moran.intercept, r.moran.intercept_p_value);
  row("spatial_autocorrelation", "I", r.moran.slope, r.moran.slope_p_value);
  row("spatial_autoregression", "a", r.sar.a_hat, r.sar.p_intercept);
  row("spatial_autoregression", "rho", r.sar.rho_hat, r.sar.p_slope);
  return s;
}

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

inline std::string fnv1a64_hex(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string file_digest(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + p.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return fnv1a64_hex(bytes);
}

inline std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct AnalysisInput {
  RawSizeVector sizes;  // aligned with the distance ids
  Matrix<double> distances;
  double input_asymmetry = 0.0;
};

/// Runs every stage on in-memory data. `cv` supplies DW critical values.
inline AnalysisReport analyze_data(const AnalysisInput& in, const AnalysisConfig& cfg,
                                   const CriticalValueTable& cv = CriticalValueTable::bundled()) {
  cfg.validate();
  auto stage = [](const char* name, auto&& f) {
    try {
      return f();
    } catch (const Error& e) {
      throw e.with_context(name);
    }
  };

  AnalysisReport r;
  const RawSizeVector raw =
      cfg.log_transform ? stage("log transform", [&] { return log_transform(in.sizes); })
                        : in.sizes;
  const StandardizedVector z = stage("standardize", [&] { return standardize(raw); });
  const ProximityMatrix v =
      stage("proximity", [&] { return inverse_distance_proximity(in.distances, cfg.symmetrize); });
  const WeightMatrix w = stage("normalize", [&] { return global_normalize(v); });
  const std::size_t n = z.size();
  if (w.size() != n)
    throw Error(ErrorCode::DimensionMismatch, "sizes and distances disagree in length");
  const SpatialLag lag = spatial_lag(w, z);

  r.n = n;
  r.ids = raw.ids;
  r.z.assign(z.values().begin(), z.values().end());
  r.wz = lag.wz;
  r.alpha = cfg.alpha;
  r.moran = stage("moran", [&] { return inner_regression(z, w); });
  r.sar = stage("sar", [&] { return fit_sar_ols(z, lag); });
  r.eigen = eigen_check(z, w);
  const double i = r.moran.i_value;
  const double r2 = r.sar.r_squared;
  r.bounds = stage("bounds", [&] {
    return compute_bounds(w, lag, i, r2,
                          r.sar.zero_moran ? std::nullopt : std::optional<double>(r.sar.rho_hat));
  });

  r.inference.moran_t = slope_t_test(r.moran.slope, r.moran.se_slope, n);
  r.inference.rho_t = slope_t_test(r.sar.rho_hat, r.sar.se_slope, n);
  PermutationOptions popt;
  popt.permutations = cfg.permutations;
  popt.seed = cfg.seed;
  popt.workers = cfg.workers;
  if (cfg.permutations > 0)
    r.inference.moran_permutation = permutation_test(z, w, popt);

  const std::span<const double> eps(r.sar.residuals);
  if (r.sar.exact_fit) {
    r.diagnostics_note = "exact fit: residuals are zero and cannot be standardized";
  } else {
    const std::optional<DwCriticalValues> found = cv.find(n, cfg.alpha);
    r.diagnostics = stage("diagnostics", [&] { return spatial_durbin_watson(eps, w, found); });
    if (!found)
      r.diagnostics_note = "no DW critical values for this (n, alpha); classification omitted";
    if (cfg.permutations > 0) {
      const StandardizedVector e = standardize(eps);
      r.inference.residual_permutation = permutation_test(e, w, popt);
    }
  }

  // Identity flags.
  const double nd = static_cast<double>(n);
  auto& ids = r.identities;
  if (r.sar.zero_moran)
    ids.push_back(skipped_check("rho_i_equals_n_r2", "Moran's index is zero"));
  else
    ids.push_back(make_check("rho_i_equals_n_r2", r.sar.rho_hat * i, nd * r2, tol::kData));
  ids.push_back(make_check("delta_equals_n_one_minus_r2", r.sar.delta, nd * (1.0 - r2), tol::kData));
  if (r2 < tol::kZeroRSquared)
    ids.push_back(skipped_check("lag_norm_identity", "R^2 is zero"));
  else {
    const std::span<const double> wz(lag.wz);
    const double lhs = nd * dot(wz, wz);
    const double rhs = lag.wz_sum * lag.wz_sum + i * i / r2;
    ids.push_back(make_check("lag_norm_identity", lhs, rhs, tol::kData));
  }
  ids.push_back(make_check("moran_slope_equals_i", r.moran.slope, i, tol::kData));
  ids.push_back(make_check("moran_intercept_equals_lag_sum", r.moran.intercept, lag.wz_sum,
                           tol::kData));
  ids.push_back(make_check("quadratic_form_equals_double_sum", i, moran_double_sum(raw.values, v),
                           tol::kExact, false));
  ids.push_back(make_check("paired_slope_p_values", r.inference.moran_t.p_value,
                           r.inference.rho_t.p_value, tol::kData, false));
  ids.push_back(make_check("lag_orthogonal_to_residuals",
                           dot(std::span<const double>(lag.wz), eps), 0.0, tol::kData));
  ids.push_back(make_check("ones_orthogonal_to_residuals", sum(eps), 0.0, tol::kData));
  ids.push_back(make_check("z_eigenvector_of_zz_w", r.eigen.residual, 0.0, tol::kEigen, false));
  if (r.diagnostics)
    ids.push_back(make_check("dw_equals_twice_geary", r.diagnostics->dw,
                             2.0 * geary_c(eps, w.matrix()), tol::kEigen, false));
  else
    ids.push_back(skipped_check("dw_equals_twice_geary", *r.diagnostics_note));

  r.scatter_autocorrelation = scatter_dataset(z, w, ScatterMode::autocorrelation);
  r.scatter_autoregression = scatter_dataset(z, w, ScatterMode::autoregression);

  r.provenance.seed = cfg.seed;
  r.provenance.permutations = cfg.permutations;
  r.provenance.log_transform = cfg.log_transform;
  r.provenance.symmetrize = cfg.symmetrize == SymmetryPolicy::strict ? "strict" : "auto";
  r.provenance.input_asymmetry = in.input_asymmetry;
  r.provenance.version = std::string(kVersion);
  if (cfg.record_timestamp) r.provenance.timestamp = utc_timestamp();
  return r;
}

/// Loads the configured files and runs `analyze_data`.
inline AnalysisReport analyze(const AnalysisConfig& cfg) {
  cfg.validate();
  const io::DistanceTable dist = io::load_distances(cfg.dist_path, cfg.dist_format, cfg.symmetrize);
  const RawSizeVector sizes = io::load_sizes(cfg.sizes_path);
  AnalysisInput in;
  in.sizes = io::align_sizes(sizes, dist.ids);
  in.distances = dist.distances;
  in.input_asymmetry = dist.max_relative_asymmetry;
  const CriticalValueTable cv = cfg.critical_values_path
                                    ? io::load_critical_values(*cfg.critical_values_path)
                                    : CriticalValueTable::bundled();
  AnalysisReport r = analyze_data(in, cfg, cv);
  r.provenance.sizes_sha = file_digest(cfg.sizes_path);
  r.provenance.dist_sha = file_digest(cfg.dist_path);
  if (cfg.critical_values_path) r.provenance.critical_values_sha = file_digest(*cfg.critical_values_path);
  return r;
}

/// Writes report.json, summary.csv and the scatter SVGs selected in `cfg`.
/// Returns the paths written.
inline std::vector<std::filesystem::path> emit_report(const AnalysisReport& r,
                                                      const AnalysisConfig& cfg,
                                                      const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir))
    throw Error(ErrorCode::IoError, "cannot create output directory " + out_dir.string());
  std::vector<std::filesystem::path> written;
  if (cfg.json) {
    written.push_back(out_dir / "report.json");
    io::write_text(written.back(), to_json_string(r));
  }
  if (cfg.csv) {
    written.push_back(out_dir / "summary.csv");
    io::write_text(written.back(), summary_csv(r));
  }
  if (cfg.svg) {
    written.push_back(out_dir / "scatter_autocorrelation.svg");
    render_svg(r.scatter_autocorrelation, written.back());
    written.push_back(out_dir / "scatter_autoregression.svg");
    render_svg(r.scatter_autoregression, written.back());
  }
  return written;
}

}  // namespace moransar
