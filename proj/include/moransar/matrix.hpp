#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <vector>

#include "moransar/error.hpp"

namespace moransar {

/// Dense row-major matrix with value semantics.
template <typename T>
class Matrix {
 public:
  using value_type = T;

  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  Matrix(std::initializer_list<std::initializer_list<T>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& row : rows) {
      if (row.size() != cols_)
        throw Error(ErrorCode::NonSquare, "ragged matrix initializer");
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  std::span<T> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const T> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }

  std::span<const T> data() const noexcept { return data_; }

  T sum() const { return std::accumulate(data_.begin(), data_.end(), T{}); }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  T trace() const {
    T t{};
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
  }

  T frobenius_norm() const {
    T s{};
    for (T v : data_) s += v * v;
    return std::sqrt(s);
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

template <typename T>
T dot(std::span<const T> a, std::span<const T> b) {
  if (a.size() != b.size())
    throw Error(ErrorCode::DimensionMismatch, "dot product of unequal lengths");
  T s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

template <typename T>
T sum(std::span<const T> a) {
  return std::accumulate(a.begin(), a.end(), T{});
}

template <typename T>
T mean(std::span<const T> a) {
  return sum(a) / static_cast<T>(a.size());
}

template <typename T>
std::vector<T> multiply(const Matrix<T>& m, std::span<const T> v) {
  if (m.cols() != v.size())
    throw Error(ErrorCode::DimensionMismatch, "matrix-vector size mismatch");
  std::vector<T> out(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) out[i] = dot(m.row(i), v);
  return out;
}

template <typename T>
Matrix<T> multiply(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.cols() != b.rows())
    throw Error(ErrorCode::DimensionMismatch, "matrix-matrix size mismatch");
  Matrix<T> c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const T aik = a(i, k);
      if (aik == T{}) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

/// u v^T
template <typename T>
Matrix<T> outer(std::span<const T> u, std::span<const T> v) {
  Matrix<T> m(u.size(), v.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = u[i] * v[j];
  return m;
}

/// Largest |m_ij - m_ji| / max(|m_ij|, |m_ji|) over off-diagonal pairs.
template <typename T>
T max_relative_asymmetry(const Matrix<T>& m) {
  T worst{};
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j) {
      const T a = m(i, j), b = m(j, i);
      const T scale = std::max(std::abs(a), std::abs(b));
      if (scale > T{}) worst = std::max(worst, std::abs(a - b) / scale);
    }
  return worst;
}

}  // namespace moransar
