// moransar: Moran's index and spatial autoregression from the command line.
//
//   moransar analyze  --sizes S.csv --dist D.csv [--log] [--out DIR] [--svg]
//   moransar scatter  --sizes S.csv --dist D.csv --mode autocorr|sar [--out DIR]
//   moransar bounds   --sizes S.csv --dist D.csv
//   moransar simulate --n 20 --a 1 --rho 5 --noise 0.1 --out DIR
//   moransar verify
//
// Exit codes: 0 ok, 1 input error, 2 numerical failure, 3 i/o error.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "moransar.hpp"

namespace ms = moransar;

namespace {

struct InputFlags {
  std::string sizes;
  std::string dist;
  ms::io::DistFormat format = ms::io::DistFormat::matrix;
  bool log = false;
  bool strict = false;
};

void add_input_flags(CLI::App* cmd, InputFlags& f) {
  cmd->add_option("--sizes", f.sizes, "CSV with columns id,value")->required()->check(CLI::ExistingFile);
  cmd->add_option("--dist", f.dist, "distance CSV")->required()->check(CLI::ExistingFile);
  const std::map<std::string, ms::io::DistFormat> formats{{"matrix", ms::io::DistFormat::matrix},
                                                          {"long", ms::io::DistFormat::long_form}};
  cmd->add_option("--dist-format", f.format, "matrix (id header row and column) or long (from,to,distance)")
      ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
  cmd->add_flag("--log", f.log, "natural log of sizes before standardizing");
  cmd->add_flag("--strict-symmetry", f.strict, "reject asymmetric distances instead of averaging");
}

ms::SymmetryPolicy policy(const InputFlags& f) {
  return f.strict ? ms::SymmetryPolicy::strict : ms::SymmetryPolicy::automatic;
}

void warn_asymmetry(double asym, const InputFlags& f) {
  if (!f.strict && asym > ms::tol::kAsymmetry)
    std::fprintf(stderr,
                 "warning: distance matrix asymmetric (max relative difference %.3g); "
                 "using (D + D')/2\n",
                 asym);
}

struct Prepared {
  ms::RawSizeVector raw;
  ms::StandardizedVector z;
  ms::WeightMatrix w;
};

Prepared prepare(const InputFlags& f) {
  const auto dist = ms::io::load_distances(f.dist, f.format, policy(f));
  warn_asymmetry(dist.max_relative_asymmetry, f);
  ms::RawSizeVector raw = ms::io::align_sizes(ms::io::load_sizes(f.sizes), dist.ids);
  if (f.log) raw = ms::log_transform(raw);
  ms::StandardizedVector z = ms::standardize(raw);
  ms::WeightMatrix w = ms::global_normalize(ms::inverse_distance_proximity(dist.distances, policy(f)));
  return {std::move(raw), std::move(z), std::move(w)};
}

std::uint64_t env_seed(std::uint64_t fallback) {
  const char* s = std::getenv("MORANSAR_SEED");
  if (!s || !*s) return fallback;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s, &end, 10);
  if (*end != '\0')
    throw ms::Error(ms::ErrorCode::InvalidArgument, std::string("MORANSAR_SEED is not an integer: ") + s);
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Moran's index, spatial autoregression and their parameter ranges"};
  app.set_version_flag("--version", std::string(ms::kVersion));
  app.require_subcommand(1);

  InputFlags in;

  // analyze
  auto* analyze = app.add_subcommand("analyze", "full pipeline; writes report.json and summary.csv");
  add_input_flags(analyze, in);
  std::size_t permutations = 999;
  std::uint64_t seed = 0;
  double alpha = 0.05;
  std::string dw_critical;
  std::string out_dir = ".";
  bool svg = false;
  unsigned workers = 1;
  analyze->add_option("--permutations", permutations, "permutations for the randomization test (0 disables)");
  auto* seed_opt = analyze->add_option("--seed", seed, "random seed (falls back to MORANSAR_SEED)");
  analyze->add_option("--alpha", alpha, "significance level")->check(CLI::Range(0.0, 1.0));
  analyze->add_option("--dw-critical", dw_critical, "CSV n,alpha,d_l,d_u")->check(CLI::ExistingFile);
  analyze->add_option("--out", out_dir, "output directory");
  analyze->add_flag("--svg", svg, "also write both scatterplots");
  analyze->add_option("--workers", workers, "threads for the permutation test")->check(CLI::PositiveNumber);

  // scatter
  auto* scatter = app.add_subcommand("scatter", "normalized scatterplot data and SVG");
  add_input_flags(scatter, in);
  std::string mode = "autocorr";
  scatter->add_option("--mode", mode, "autocorr (z vs nWz) or sar (Wz vs z)")
      ->check(CLI::IsMember({"autocorr", "sar"}, CLI::ignore_case));
  std::string scatter_out;
  scatter->add_option("--out", scatter_out, "directory for scatter.csv and scatter.svg (stdout CSV if omitted)");
  scatter->add_flag("--svg", svg, "write scatter.svg as well");

  // bounds
  auto* bounds = app.add_subcommand("bounds", "eigenvalue ranges for I and rho as JSON");
  add_input_flags(bounds, in);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "draw a SAR field on a random or given layout");
  std::size_t sim_n = 20;
  double sim_a = 1.0, sim_rho = 0.0, sim_noise = 1.0;
  std::string sim_dist;
  std::string sim_out = ".";
  auto* n_opt = simulate->add_option("--n", sim_n, "number of cities for a random layout")->check(CLI::Range(2, 100000));
  simulate->add_option("--dist", sim_dist, "use this distance matrix instead of a random layout")
      ->check(CLI::ExistingFile)
      ->excludes(n_opt);
  simulate->add_option("--dist-format", in.format, "matrix or long")
      ->transform(CLI::CheckedTransformer(std::map<std::string, ms::io::DistFormat>{
                                              {"matrix", ms::io::DistFormat::matrix},
                                              {"long", ms::io::DistFormat::long_form}},
                                          CLI::ignore_case));
  simulate->add_option("--a", sim_a, "intercept");
  simulate->add_option("--rho", sim_rho, "autoregressive coefficient");
  simulate->add_option("--noise", sim_noise, "noise standard deviation")->check(CLI::NonNegativeNumber);
  auto* sim_seed_opt = simulate->add_option("--seed", seed, "random seed (falls back to MORANSAR_SEED)");
  simulate->add_option("--out", sim_out, "directory for sizes.csv and distances.csv");

  // verify
  auto* verify = app.add_subcommand("verify", "identity suite; exits 2 on any failure");
  std::size_t instances = 1000;
  verify->add_option("--instances", instances, "random instances")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*analyze) {
      ms::AnalysisConfig cfg;
      cfg.sizes_path = in.sizes;
      cfg.dist_path = in.dist;
      cfg.dist_format = in.format;
      cfg.symmetrize = policy(in);
      cfg.log_transform = in.log;
      cfg.permutations = permutations;
      cfg.seed = seed_opt->count() ? seed : env_seed(seed);
      cfg.alpha = alpha;
      if (!dw_critical.empty()) cfg.critical_values_path = dw_critical;
      cfg.workers = workers;
      cfg.svg = svg;
      const ms::AnalysisReport r = ms::analyze(cfg);
      warn_asymmetry(r.provenance.input_asymmetry, in);
      for (const auto& p : ms::emit_report(r, cfg, out_dir)) std::cout << "wrote " << p.string() << '\n';
      std::cout << "I = " << ms::format_sig6(r.moran.i_value) << ", rho = " << ms::format_sig6(r.sar.rho_hat)
                << ", R^2 = " << ms::format_sig6(r.sar.r_squared) << '\n';
      if (!r.all_identities_pass()) {
        for (const auto& c : r.identities)
          if (!c.skipped && !c.pass)
            std::fprintf(stderr, "identity violated: %s (slack %.3g > %.3g)\n", c.name.c_str(), c.slack,
                         c.tolerance);
        return 2;
      }
      return 0;
    }

    if (*scatter) {
      const Prepared p = prepare(in);
      const ms::ScatterDataset d = ms::scatter_dataset(
          p.z, p.w, mode == "sar" ? ms::ScatterMode::autoregression : ms::ScatterMode::autocorrelation);
      if (scatter_out.empty()) {
        std::cout << ms::to_csv(d);
        return 0;
      }
      std::filesystem::create_directories(scatter_out);
      ms::io::write_text(std::filesystem::path(scatter_out) / "scatter.csv", ms::to_csv(d));
      if (svg) ms::render_svg(d, std::filesystem::path(scatter_out) / "scatter.svg");
      return 0;
    }

    if (*bounds) {
      const Prepared p = prepare(in);
      const ms::SpatialLag lag = ms::spatial_lag(p.w, p.z);
      const ms::SarFit fit = ms::fit_sar_ols(p.z, lag);
      const ms::BoundsReport b =
          ms::compute_bounds(p.w, lag, fit.i_value, fit.r_squared,
                             fit.zero_moran ? std::nullopt : std::optional<double>(fit.rho_hat));
      std::cout << ms::Json(b).dump(2) << '\n';
      return 0;
    }

    if (*simulate) {
      const std::uint64_t s = sim_seed_opt->count() ? seed : env_seed(seed);
      std::vector<std::string> ids;
      ms::Matrix<double> d;
      if (!sim_dist.empty()) {
        auto t = ms::io::load_distances(sim_dist, in.format);
        ids = t.ids;
        d = t.distances;
      } else {
        ms::Instance inst = ms::random_instance(sim_n, s);
        ids = inst.sizes.ids;
        d = inst.distances;
      }
      const ms::WeightMatrix w = ms::global_normalize(ms::inverse_distance_proximity(d));
      ms::RawSizeVector x = ms::simulate_sar(w, sim_a, sim_rho, sim_noise, s);
      x.ids = ids;
      const std::filesystem::path dir(sim_out);
      std::error_code ec;
      std::filesystem::create_directories(dir, ec);
      ms::io::write_text(dir / "sizes.csv", ms::io::sizes_csv(x));
      ms::io::write_text(dir / "distances.csv", ms::io::distance_matrix_csv(ids, d));
      std::cout << "wrote " << (dir / "sizes.csv").string() << " and " << (dir / "distances.csv").string()
                << '\n';
      return 0;
    }

    if (*verify) {
      ms::VerifyOptions opt;
      opt.instances = instances;
      const ms::VerifyReport r = ms::run_verify(opt);
      for (const auto& c : r.checks)
        std::printf("%s  %-40s %s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
      for (const auto& n : r.notes) std::printf("note  %s\n", n.c_str());
      std::printf("%s in %.2f s\n", r.ok() ? "all checks passed" : "FAILED", r.seconds);
      return r.ok() ? 0 : 2;
    }
  } catch (const ms::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return ms::exit_code(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
