#pragma once

// Cyclic Jacobi eigensolver for small dense symmetric matrices.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "moransar/error.hpp"
#include "moransar/matrix.hpp"

namespace moransar {

template <typename T>
struct EigenSpectrum {
  std::vector<T> values;  // ascending
  Matrix<T> vectors;      // column k pairs with values[k]
  T max_offdiag_residual{};  // off-diagonal Frobenius norm at exit
  int sweeps = 0;
};

struct JacobiOptions {
  double relative_tolerance = 1e-12;  // off(A) <= tol * ||M||_F
  int max_sweeps = 100;
  double symmetry_tolerance = 1e-9;   // relative to max |m_ij|
};

namespace detail {

template <typename T>
T off_diagonal_norm(const Matrix<T>& a) {
  T s{};
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

}  // namespace detail

template <typename T>
EigenSpectrum<T> symmetric_eigen(const Matrix<T>& m, const JacobiOptions& opt = {}) {
  if (!m.square())
    throw Error(ErrorCode::NonSquare, "eigensolver needs a square matrix");
  const std::size_t n = m.rows();

  T max_abs{};
  for (T v : m.data()) max_abs = std::max(max_abs, std::abs(v));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(m(i, j) - m(j, i)) > T(opt.symmetry_tolerance) * max_abs)
        throw Error(ErrorCode::NotSymmetric, "matrix is not symmetric", i, j);

  Matrix<T> a = m;
  // Work on the exactly symmetric part.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) a(i, j) = a(j, i) = (m(i, j) + m(j, i)) / 2;
  Matrix<T> v = Matrix<T>::identity(n);

  const T target = T(opt.relative_tolerance) * m.frobenius_norm();
  T off = detail::off_diagonal_norm(a);
  int sweep = 0;
  while (off > target) {
    if (sweep == opt.max_sweeps)
      throw Error(ErrorCode::NoConvergence,
                  "Jacobi did not converge; off-diagonal norm " + std::to_string(off));
    ++sweep;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const T apq = a(p, q);
        if (apq == T{}) continue;
        const T app = a(p, p), aqq = a(q, q);
        const T theta = (aqq - app) / (2 * apq);
        T t;
        if (std::abs(theta) > T(1e150))
          t = T{1} / (2 * theta);
        else
          t = (theta >= T{} ? T{1} : T{-1}) /
              (std::abs(theta) + std::sqrt(theta * theta + T{1}));
        const T c = T{1} / std::sqrt(t * t + T{1});
        const T s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const T akp = a(k, p), akq = a(k, q);
          a(k, p) = a(p, k) = c * akp - s * akq;
          a(k, q) = a(q, k) = s * akp + c * akq;
        }
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = a(q, p) = T{};
        for (std::size_t k = 0; k < n; ++k) {
          const T vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    off = detail::off_diagonal_norm(a);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });

  EigenSpectrum<T> out;
  out.values.resize(n);
  out.vectors = Matrix<T>(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  out.max_offdiag_residual = off;
  out.sweeps = sweep;
  return out;
}

/// ||M v_k - lambda_k v_k||_inf
template <typename T>
T eigenpair_residual(const Matrix<T>& m, const EigenSpectrum<T>& s, std::size_t k) {
  const std::size_t n = m.rows();
  T worst{};
  for (std::size_t i = 0; i < n; ++i) {
    T mv{};
    for (std::size_t j = 0; j < n; ++j) mv += m(i, j) * s.vectors(j, k);
    worst = std::max(worst, std::abs(mv - s.values[k] * s.vectors(i, k)));
  }
  return worst;
}

}  // namespace moransar
