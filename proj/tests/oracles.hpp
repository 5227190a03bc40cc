#pragma once

// Independent reference computations. None of these call into the library
// beyond plain data types, so agreement is meaningful.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "moransar/matrix.hpp"

namespace oracle {

using Vec = std::vector<double>;
using moransar::Matrix;

/// Straight-line fit by the textbook raw-sum normal equations in long double.
struct Ols {
  double slope, intercept, r_squared;
  Vec residuals;
};

inline Ols ols(const Vec& x, const Vec& y) {
  const long double n = static_cast<long double>(x.size());
  long double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += static_cast<long double>(x[i]) * x[i];
    sxy += static_cast<long double>(x[i]) * y[i];
  }
  const long double b = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const long double a = (sy - b * sx) / n;
  Ols o{static_cast<double>(b), static_cast<double>(a), 0.0, {}};
  long double sse = 0, sst = 0;
  const long double ybar = sy / n;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const long double e = y[i] - a - b * x[i];
    o.residuals.push_back(static_cast<double>(e));
    sse += e * e;
    sst += (y[i] - ybar) * (y[i] - ybar);
  }
  o.r_squared = static_cast<double>(1 - sse / sst);
  return o;
}

inline double pearson_sq(const Vec& x, const Vec& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  long double cxy = 0, cxx = 0, cyy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    cxy += (x[i] - mx) * (y[i] - my);
    cxx += (x[i] - mx) * (x[i] - mx);
    cyy += (y[i] - my) * (y[i] - my);
  }
  return static_cast<double>(cxy * cxy / (cxx * cyy));
}

/// Classical Moran statistic straight from a distance matrix with inverse
/// distance weights: (n/S0) sum v_ij dx_i dx_j / sum dx_i^2.
inline double moran_from_distances(const Vec& x, const Matrix<double>& d) {
  const std::size_t n = x.size();
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  long double s0 = 0, num = 0, den = 0;
  for (std::size_t i = 0; i < n; ++i) {
    den += (x[i] - mean) * (x[i] - mean);
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const long double v = 0.5L / d(i, j) + 0.5L / d(j, i);
      s0 += v;
      num += v * (x[i] - mean) * (x[j] - mean);
    }
  }
  return static_cast<double>(static_cast<long double>(n) / s0 * num / den);
}

/// Quadratic form by explicit double loop.
inline double quad(const Vec& z, const Matrix<double>& w) {
  long double s = 0;
  for (std::size_t i = 0; i < z.size(); ++i)
    for (std::size_t j = 0; j < z.size(); ++j) s += static_cast<long double>(z[i]) * w(i, j) * z[j];
  return static_cast<double>(s);
}

inline Vec matvec(const Matrix<double>& w, const Vec& z) {
  Vec out(z.size(), 0.0);
  for (std::size_t i = 0; i < z.size(); ++i) {
    long double s = 0;
    for (std::size_t j = 0; j < z.size(); ++j) s += static_cast<long double>(w(i, j)) * z[j];
    out[i] = static_cast<double>(s);
  }
  return out;
}

/// Population z-scores.
inline Vec zscore(const Vec& x) {
  const double n = static_cast<double>(x.size());
  const double m = std::accumulate(x.begin(), x.end(), 0.0) / n;
  long double ss = 0;
  for (double v : x) ss += (v - m) * (v - m);
  const double sd = static_cast<double>(std::sqrt(ss / n));
  Vec z;
  for (double v : x) z.push_back((v - m) / sd);
  return z;
}

/// Geary's contiguity ratio by the pairwise double sum.
inline double geary_pairwise(const Vec& e, const Matrix<double>& w) {
  const std::size_t n = e.size();
  const double mean = std::accumulate(e.begin(), e.end(), 0.0) / static_cast<double>(n);
  long double s0 = 0, num = 0, den = 0;
  for (std::size_t i = 0; i < n; ++i) {
    den += (e[i] - mean) * (e[i] - mean);
    for (std::size_t j = 0; j < n; ++j) {
      s0 += w(i, j);
      num += w(i, j) * (e[i] - e[j]) * (e[i] - e[j]);
    }
  }
  return static_cast<double>((static_cast<long double>(n) - 1) * num / (2 * s0 * den));
}

/// Two-sided Student-t tail by composite Simpson integration of the density.
inline double t_two_sided(double t, double df) {
  const long double lc = std::lgamma((df + 1) / 2) - std::lgamma(df / 2) -
                         0.5 * std::log(df * 3.14159265358979323846);
  auto pdf = [&](long double x) {
    return std::exp(lc - (df + 1) / 2 * std::log1p(static_cast<double>(x * x / df)));
  };
  const long double b = std::abs(t);
  const int m = 200000;  // even
  const long double h = b / m;
  long double s = pdf(0) + pdf(b);
  for (int k = 1; k < m; ++k) s += (k % 2 ? 4 : 2) * pdf(k * h);
  const long double central = s * h / 3;
  return static_cast<double>(1 - 2 * central);
}

/// Roots of p(l) = l^3 - 0.09 l - 0.008 by bisection on sign-change brackets.
inline Vec chain_cubic_roots() {
  auto p = [](double l) { return l * l * l - 0.09 * l - 0.008; };
  Vec roots;
  const double lo = -1.0, hi = 1.0;
  const int steps = 20000;
  for (int k = 0; k < steps; ++k) {
    double a = lo + (hi - lo) * k / steps, b = lo + (hi - lo) * (k + 1) / steps;
    if (p(a) == 0.0) {
      roots.push_back(a);
      continue;
    }
    if ((p(a) < 0) == (p(b) < 0)) continue;
    for (int it = 0; it < 200; ++it) {
      const double m = 0.5 * (a + b);
      if ((p(a) < 0) == (p(m) < 0)) a = m; else b = m;
    }
    roots.push_back(0.5 * (a + b));
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

/// Exact randomization p: share of all n! relabellings whose |I| reaches
/// the observed |I|.
inline double exhaustive_p(const Vec& z, const Matrix<double>& w) {
  const double obs = std::abs(quad(z, w));
  std::vector<std::size_t> perm(z.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::size_t hits = 0, total = 0;
  do {
    Vec zp(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) zp[i] = z[perm[i]];
    if (std::abs(quad(zp, w)) >= obs - 1e-12 * std::max(1.0, obs)) ++hits;
    ++total;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(hits) / static_cast<double>(total);
}

}  // namespace oracle
