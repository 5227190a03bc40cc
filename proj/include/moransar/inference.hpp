#pragma once

// Significance tests for Moran's index and residual diagnostics.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <thread>
#include <unordered_set>
#include <vector>

#include "moransar/autocorr.hpp"
#include "moransar/error.hpp"
#include "moransar/matrix.hpp"
#include "moransar/significance.hpp"
#include "moransar/spatial_data.hpp"

namespace moransar {

// ---------------------------------------------------------------------------
// Permutation test
// ---------------------------------------------------------------------------

enum class Sidedness { two_sided, greater, less };

constexpr std::string_view to_string(Sidedness s) {
  switch (s) {
    case Sidedness::two_sided: return "two_sided";
    case Sidedness::greater: return "greater";
    case Sidedness::less: return "less";
  }
  return "two_sided";
}

struct PermutationOptions {
  std::size_t permutations = 999;
  std::uint64_t seed = 0;
  Sidedness sides = Sidedness::two_sided;
  unsigned workers = 1;
};

namespace detail {

// Relabellings are enumerated exhaustively, or sampled without replacement,
// up to this many permutations (8!).
inline constexpr std::uint64_t kEnumerationLimit = 40320;

inline std::uint64_t factorial_capped(std::size_t n) {
  std::uint64_t f = 1;
  for (std::size_t k = 2; k <= n; ++k) {
    if (f > std::numeric_limits<std::uint64_t>::max() / k)
      return std::numeric_limits<std::uint64_t>::max();
    f *= k;
  }
  return f;
}

/// Permutation with the given lexicographic rank (rank 0 is the identity).
inline std::vector<std::size_t> permutation_from_rank(std::uint64_t rank, std::size_t n) {
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  std::vector<std::size_t> out;
  out.reserve(n);
  std::uint64_t f = factorial_capped(n - 1);
  for (std::size_t k = n; k > 0; --k) {
    const std::uint64_t idx = rank / f;
    rank %= f;
    out.push_back(pool[idx]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(idx));
    if (k > 1) f /= (k - 1);
  }
  return out;
}

inline bool exceeds(double stat, double observed, Sidedness sides) {
  const double tie = 1e-12 * std::max(1.0, std::abs(observed));
  switch (sides) {
    case Sidedness::two_sided: return std::abs(stat) >= std::abs(observed) - tie;
    case Sidedness::greater: return stat >= observed - tie;
    case Sidedness::less: return stat <= observed + tie;
  }
  return false;
}

inline double permuted_moran(std::span<const double> z, const Matrix<double>& w,
                             std::span<const std::size_t> perm,
                             std::vector<double>& scratch) {
  for (std::size_t i = 0; i < z.size(); ++i) scratch[i] = z[perm[i]];
  return quadratic_form(std::span<const double>(scratch), w);
}

/// Runs `count_range(begin, end)` over [0, total) split into contiguous
/// chunks and sums the integer results. The sum does not depend on the
/// number of workers.
template <typename F>
std::size_t parallel_count(std::size_t total, unsigned workers, F count_range) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(total, 1))));
  if (workers == 1) return count_range(std::size_t{0}, total);
  std::vector<std::size_t> partial(workers, 0);
  std::vector<std::thread> threads;
  threads.reserve(workers);
  const std::size_t chunk = (total + workers - 1) / workers;
  for (unsigned t = 0; t < workers; ++t) {
    const std::size_t begin = std::min(total, t * chunk);
    const std::size_t end = std::min(total, begin + chunk);
    threads.emplace_back([&, t, begin, end] { partial[t] = count_range(begin, end); });
  }
  for (auto& th : threads) th.join();
  return std::accumulate(partial.begin(), partial.end(), std::size_t{0});
}

}  // namespace detail

/// Randomization test of z'Wz under relabelling of z.
///
/// pseudo-p = (1 + #{I* at least as extreme as I_obs}) / (m + 1). When m
/// covers every non-identity relabelling (m >= n! - 1) all n! are enumerated
/// and p is exact; for n! <= 40320 the m relabellings are drawn without
/// replacement; otherwise each draw is a shuffle seeded from a sequence
/// generated up front from the master seed, so the result is independent of
/// `workers`.
inline SignificanceResult permutation_test(std::span<const double> z, const WeightMatrix& w,
                                           const PermutationOptions& opt) {
  const std::size_t n = z.size();
  if (w.size() != n)
    throw Error(ErrorCode::DimensionMismatch, "vector and weight matrix sizes differ");
  if (opt.permutations < 1)
    throw Error(ErrorCode::InvalidArgument, "permutation count must be at least 1");
  if (n < 2)
    throw Error(ErrorCode::InvalidArgument, "need at least two elements");

  const Matrix<double>& wm = w.matrix();
  const double observed = quadratic_form(z, wm);
  const std::uint64_t total = detail::factorial_capped(n);

  SignificanceResult r;
  r.method = TestMethod::permutation;
  r.statistic = observed;
  r.seed = opt.seed;

  if (total <= detail::kEnumerationLimit && opt.permutations + 1 >= total) {
    // Exhaustive: every relabelling including the identity.
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::vector<double> scratch(n);
    std::size_t count = 0;
    do {
      if (detail::exceeds(detail::permuted_moran(z, wm, perm, scratch), observed, opt.sides))
        ++count;
    } while (std::next_permutation(perm.begin(), perm.end()));
    r.p_value = static_cast<double>(count) / static_cast<double>(total);
    r.permutations_used = static_cast<std::size_t>(total - 1);
    r.exhaustive = true;
    return r;
  }

  const std::size_t m = opt.permutations;
  std::mt19937_64 master(opt.seed);
  std::size_t exceed = 0;

  if (total <= detail::kEnumerationLimit) {
    // m distinct non-identity ranks (Floyd's algorithm).
    std::vector<std::uint64_t> ranks;
    ranks.reserve(m);
    std::unordered_set<std::uint64_t> chosen;
    const std::uint64_t pool = total - 1;
    for (std::uint64_t j = pool - m; j < pool; ++j) {
      std::uniform_int_distribution<std::uint64_t> pick(0, j);
      std::uint64_t t = pick(master);
      if (chosen.contains(t)) t = j;
      chosen.insert(t);
      ranks.push_back(t + 1);
    }
    exceed = detail::parallel_count(m, opt.workers, [&](std::size_t b, std::size_t e) {
      std::vector<double> scratch(n);
      std::size_t c = 0;
      for (std::size_t k = b; k < e; ++k) {
        const auto perm = detail::permutation_from_rank(ranks[k], n);
        if (detail::exceeds(detail::permuted_moran(z, wm, perm, scratch), observed, opt.sides))
          ++c;
      }
      return c;
    });
  } else {
    std::vector<std::uint64_t> seeds(m);
    for (auto& s : seeds) s = master();
    exceed = detail::parallel_count(m, opt.workers, [&](std::size_t b, std::size_t e) {
      std::vector<double> scratch(n);
      std::vector<std::size_t> perm(n);
      std::size_t c = 0;
      for (std::size_t k = b; k < e; ++k) {
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::mt19937_64 g(seeds[k]);
        std::shuffle(perm.begin(), perm.end(), g);
        if (detail::exceeds(detail::permuted_moran(z, wm, perm, scratch), observed, opt.sides))
          ++c;
      }
      return c;
    });
  }
  r.p_value = static_cast<double>(1 + exceed) / static_cast<double>(m + 1);
  r.permutations_used = m;
  return r;
}

inline SignificanceResult permutation_test(const StandardizedVector& z, const WeightMatrix& w,
                                           const PermutationOptions& opt) {
  return permutation_test(z.values(), w, opt);
}

// ---------------------------------------------------------------------------
// Residual diagnostics
// ---------------------------------------------------------------------------

/// Moran's index of residuals standardized with the population sd.
inline double residual_moran(std::span<const double> residuals, const WeightMatrix& w) {
  const StandardizedVector e = standardize(residuals);
  return moran_index(e, w);
}

/// Classical contiguity ratio
///   C = (n-1) sum_ij w_ij (e_i - e_j)^2 / (2 S0 sum_i (e_i - ebar)^2).
inline double geary_c(std::span<const double> residuals, const Matrix<double>& w) {
  const std::size_t n = residuals.size();
  if (w.rows() != n || w.cols() != n)
    throw Error(ErrorCode::DimensionMismatch, "vector and weight matrix sizes differ");
  const double ebar = mean(residuals);
  double denom = 0.0;
  for (double e : residuals) denom += (e - ebar) * (e - ebar);
  if (!(denom > 0.0)) throw Error(ErrorCode::ZeroVariance, "residuals are constant");
  double s0 = 0.0, num = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double d = residuals[i] - residuals[j];
      s0 += w(i, j);
      num += w(i, j) * d * d;
    }
  return static_cast<double>(n - 1) * num / (2.0 * s0 * denom);
}

enum class DwClass { positive, negative, none, inconclusive };

constexpr std::string_view to_string(DwClass c) {
  switch (c) {
    case DwClass::positive: return "positive";
    case DwClass::negative: return "negative";
    case DwClass::none: return "none";
    case DwClass::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

struct DwCriticalValues {
  std::size_t n = 0;
  double alpha = 0.05;
  double d_l = 0.0;
  double d_u = 0.0;

  void validate() const {
    if (!(d_l > 0.0 && d_l < d_u && d_u < 2.0))
      throw Error(ErrorCode::InvalidArgument, "critical values need 0 < d_l < d_u < 2");
    if (!(alpha > 0.0 && alpha < 1.0))
      throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
  }
};

/// Lookup of Durbin-Watson bounds by (n, alpha). Only n = 35, alpha = 0.05
/// ships built in; everything else is user supplied.
class CriticalValueTable {
 public:
  static CriticalValueTable bundled() {
    CriticalValueTable t;
    t.add({35, 0.05, 1.402, 1.519});
    return t;
  }

  void add(const DwCriticalValues& cv) {
    cv.validate();
    for (auto& e : entries_)
      if (e.n == cv.n && same_alpha(e.alpha, cv.alpha)) {
        e = cv;
        return;
      }
    entries_.push_back(cv);
  }

  std::optional<DwCriticalValues> find(std::size_t n, double alpha) const {
    for (const auto& e : entries_)
      if (e.n == n && same_alpha(e.alpha, alpha)) return e;
    return std::nullopt;
  }

  DwCriticalValues lookup(std::size_t n, double alpha) const {
    if (auto e = find(n, alpha)) return *e;
    throw Error(ErrorCode::MissingCriticalValues,
                "no Durbin-Watson bounds for n=" + std::to_string(n) +
                    ", alpha=" + std::to_string(alpha));
  }

  std::size_t size() const noexcept { return entries_.size(); }

 private:
  static bool same_alpha(double a, double b) { return std::abs(a - b) < 1e-12; }
  std::vector<DwCriticalValues> entries_;
};

/// DW < d_l: positive; DW > 4 - d_l: negative; d_u <= DW <= 4 - d_u: none;
/// otherwise inconclusive.
inline DwClass dw_interpret(double dw, const DwCriticalValues& cv) {
  cv.validate();
  if (dw < cv.d_l) return DwClass::positive;
  if (dw > 4.0 - cv.d_l) return DwClass::negative;
  if (dw >= cv.d_u && dw <= 4.0 - cv.d_u) return DwClass::none;
  return DwClass::inconclusive;
}

struct DwResult {
  double dw = 0.0;
  double geary_c = 0.0;  // dw / 2
  double i_e = 0.0;      // residual Moran's index
  double weighted_square_sum = 0.0;  // o'W(e*e), e standardized
  std::optional<DwClass> classification;

  friend bool operator==(const DwResult&, const DwResult&) = default;
};

/// DW = 2(n-1)/n * (o'W(e*e) - I_e) with e the standardized residuals and
/// e*e the elementwise square.
inline DwResult spatial_durbin_watson(std::span<const double> residuals, const WeightMatrix& w,
                                      std::optional<DwCriticalValues> critical = std::nullopt) {
  const std::size_t n = residuals.size();
  if (w.size() != n)
    throw Error(ErrorCode::DimensionMismatch, "vector and weight matrix sizes differ");
  const StandardizedVector e = standardize(residuals);
  std::vector<double> sq(n);
  for (std::size_t i = 0; i < n; ++i) sq[i] = e[i] * e[i];

  DwResult r;
  r.i_e = moran_index(e, w);
  r.weighted_square_sum = sum<double>(multiply(w.matrix(), std::span<const double>(sq)));
  const double nd = static_cast<double>(n);
  r.dw = 2.0 * (nd - 1.0) / nd * (r.weighted_square_sum - r.i_e);
  r.geary_c = r.dw / 2.0;
  if (critical) r.classification = dw_interpret(r.dw, *critical);
  return r;
}

}  // namespace moransar
