#pragma once

// Dense row-major matrix and the handful of products and norms the
// learners are built from.

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "scn2d/error.hpp"

namespace scn2d {

using Vector = std::vector<double>;

class Matrix {
 public:
  Matrix() = default;

  /// Zero-filled rows x cols matrix.
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  Matrix(std::size_t rows, std::size_t cols, double fill)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {
    check_finite();
  }

  /// Takes ownership of row-major data. Throws NumericError on NaN/Inf.
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
      throw ShapeError("matrix data has " + std::to_string(data_.size()) + " entries, expected " +
                       std::to_string(rows_) + "x" + std::to_string(cols_));
    }
    check_finite();
  }

  Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw ShapeError("ragged matrix literal");
      data_.insert(data_.end(), r.begin(), r.end());
    }
    check_finite();
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  /// n x 1 column from a vector.
  static Matrix column(std::span<const double> v) {
    return Matrix(v.size(), 1, std::vector<double>(v.begin(), v.end()));
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * cols_, cols_}; }

  Vector col(std::size_t j) const {
    Vector out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
    return out;
  }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  std::string shape_string() const { return std::to_string(rows_) + "x" + std::to_string(cols_); }

  bool all_finite() const noexcept {
    for (double x : data_)
      if (!std::isfinite(x)) return false;
    return true;
  }

  void check_finite() const {
    if (!all_finite()) throw NumericError("matrix " + shape_string() + " has non-finite entries");
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

inline Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows())
    throw ShapeError("matmul: " + a.shape_string() + " times " + b.shape_string());
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto out = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      auto brow = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) out[j] += aik * brow[j];
    }
  }
  c.check_finite();
  return c;
}

inline Matrix hadamard(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeError("hadamard: " + a.shape_string() + " vs " + b.shape_string());
  Matrix c(a.rows(), a.cols());
  auto cd = c.data();
  auto ad = a.data();
  auto bd = b.data();
  for (std::size_t k = 0; k < cd.size(); ++k) cd[k] = ad[k] * bd[k];
  c.check_finite();
  return c;
}

inline Matrix operator-(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeError("subtract: " + a.shape_string() + " vs " + b.shape_string());
  Matrix c(a.rows(), a.cols());
  for (std::size_t k = 0; k < c.size(); ++k) c.data()[k] = a.data()[k] - b.data()[k];
  return c;
}

inline Matrix operator+(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeError("add: " + a.shape_string() + " vs " + b.shape_string());
  Matrix c(a.rows(), a.cols());
  for (std::size_t k = 0; k < c.size(); ++k) c.data()[k] = a.data()[k] + b.data()[k];
  return c;
}

inline Matrix operator*(double s, const Matrix& a) {
  Matrix c(a.rows(), a.cols());
  for (std::size_t k = 0; k < c.size(); ++k) c.data()[k] = s * a.data()[k];
  return c;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw ShapeError("dot: lengths " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

inline double frobenius_norm(const Matrix& a) { return norm2(a.data()); }

/// Column-major vec(): entry j*rows + i holds x(i, j).
inline Matrix vectorize(const Matrix& x) {
  Matrix v(x.size(), 1);
  for (std::size_t j = 0; j < x.cols(); ++j)
    for (std::size_t i = 0; i < x.rows(); ++i) v(j * x.rows() + i, 0) = x(i, j);
  return v;
}

/// Inverse of vectorize for a d1 x d2 shape.
inline Matrix unvectorize(std::span<const double> v, std::size_t d1, std::size_t d2) {
  if (v.size() != d1 * d2)
    throw ShapeError("unvectorize: length " + std::to_string(v.size()) + " into " + std::to_string(d1) +
                     "x" + std::to_string(d2));
  Matrix x(d1, d2);
  for (std::size_t j = 0; j < d2; ++j)
    for (std::size_t i = 0; i < d1; ++i) x(i, j) = v[j * d1 + i];
  return x;
}

inline Matrix outer(std::span<const double> u, std::span<const double> v) {
  Matrix m(u.size(), v.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = u[i] * v[j];
  return m;
}

/// u^T x v where x is given as its column-major vec of a d1 x d2 matrix,
/// d1 = |u| and d2 = |v|. Never forms vec(u v^T).
inline double bilinear_form_vec(std::span<const double> u, std::span<const double> x_vec,
                                std::span<const double> v) {
  const std::size_t d1 = u.size();
  if (x_vec.size() != d1 * v.size())
    throw ShapeError("bilinear_form: x has " + std::to_string(x_vec.size()) + " entries, u/v are " +
                     std::to_string(d1) + "/" + std::to_string(v.size()));
  double s = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    const double* colj = x_vec.data() + j * d1;
    double ux = 0.0;
    for (std::size_t i = 0; i < d1; ++i) ux += u[i] * colj[i];
    s += ux * v[j];
  }
  return s;
}

inline double bilinear_form(std::span<const double> u, const Matrix& x, std::span<const double> v) {
  if (x.rows() != u.size() || x.cols() != v.size())
    throw ShapeError("bilinear_form: u(" + std::to_string(u.size()) + ") x(" + x.shape_string() + ") v(" +
                     std::to_string(v.size()) + ")");
  double s = 0.0;
  for (std::size_t j = 0; j < x.cols(); ++j) {
    double ux = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) ux += u[i] * x(i, j);
    s += ux * v[j];
  }
  return s;
}

}  // namespace scn2d
