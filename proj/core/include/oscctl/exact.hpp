#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <Eigen/Dense>

namespace oscctl {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Small dense row-major matrix over an exact or floating scalar.
template <class T>
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, const T& fill = T(0))
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  DenseMatrix operator*(const DenseMatrix& o) const {
    if (cols_ != o.rows_) throw std::invalid_argument("DenseMatrix: shape mismatch");
    DenseMatrix r(rows_, o.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t k = 0; k < cols_; ++k) {
        const T& a = (*this)(i, k);
        if (a == T(0)) continue;
        for (std::size_t j = 0; j < o.cols_; ++j) r(i, j) += a * o(k, j);
      }
    return r;
  }
  DenseMatrix operator+(const DenseMatrix& o) const {
    DenseMatrix r = *this;
    for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] += o.data_[i];
    return r;
  }
  DenseMatrix operator-(const DenseMatrix& o) const {
    DenseMatrix r = *this;
    for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] -= o.data_[i];
    return r;
  }
  DenseMatrix transpose() const {
    DenseMatrix r(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
    return r;
  }
  bool operator==(const DenseMatrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }
  bool is_zero() const {
    for (const T& v : data_)
      if (v != T(0)) return false;
    return true;
  }

  /// Gauss-Jordan inverse; exact over Rational. Throws on a singular matrix.
  DenseMatrix inverse() const {
    if (rows_ != cols_) throw std::invalid_argument("DenseMatrix: inverse of non-square matrix");
    const std::size_t n = rows_;
    DenseMatrix a = *this, inv = identity(n);
    for (std::size_t c = 0; c < n; ++c) {
      std::size_t piv = c;
      while (piv < n && a(piv, c) == T(0)) ++piv;
      if (piv == n) throw std::domain_error("DenseMatrix: singular matrix");
      if (piv != c)
        for (std::size_t j = 0; j < n; ++j) {
          std::swap(a(c, j), a(piv, j));
          std::swap(inv(c, j), inv(piv, j));
        }
      const T p = a(c, c);
      for (std::size_t j = 0; j < n; ++j) {
        a(c, j) /= p;
        inv(c, j) /= p;
      }
      for (std::size_t r = 0; r < n; ++r) {
        if (r == c || a(r, c) == T(0)) continue;
        const T f = a(r, c);
        for (std::size_t j = 0; j < n; ++j) {
          a(r, j) -= f * a(c, j);
          inv(r, j) -= f * inv(c, j);
        }
      }
    }
    return inv;
  }

  /// Leading principal minors by fraction-free elimination (exact for Rational).
  std::vector<T> leading_minors() const {
    std::vector<T> out;
    DenseMatrix a = *this;
    T det(1);
    for (std::size_t c = 0; c < rows_; ++c) {
      if (a(c, c) == T(0)) {
        // Zero pivot: the remaining leading minors are computed directly.
        for (std::size_t k = c; k < rows_; ++k) out.push_back(leading_det(k + 1));
        return out;
      }
      det *= a(c, c);
      out.push_back(det);
      for (std::size_t r = c + 1; r < rows_; ++r) {
        const T f = a(r, c) / a(c, c);
        for (std::size_t j = c; j < cols_; ++j) a(r, j) -= f * a(c, j);
      }
    }
    return out;
  }

  template <class Fn>
  auto map(Fn fn) const {
    using U = decltype(fn(std::declval<T>()));
    DenseMatrix<U> r(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) r(i, j) = fn((*this)(i, j));
    return r;
  }

 private:
  T leading_det(std::size_t k) const {
    DenseMatrix sub(k, k);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) sub(i, j) = (*this)(i, j);
    T det(1);
    for (std::size_t c = 0; c < k; ++c) {
      std::size_t piv = c;
      while (piv < k && sub(piv, c) == T(0)) ++piv;
      if (piv == k) return T(0);
      if (piv != c) {
        for (std::size_t j = 0; j < k; ++j) std::swap(sub(c, j), sub(piv, j));
        det = -det;
      }
      det *= sub(c, c);
      for (std::size_t r = c + 1; r < k; ++r) {
        const T f = sub(r, c) / sub(c, c);
        for (std::size_t j = c; j < k; ++j) sub(r, j) -= f * sub(c, j);
      }
    }
    return det;
  }

  std::size_t rows_ = 0, cols_ = 0;
  std::vector<T> data_;
};

inline double to_double(const Rational& r) { return r.convert_to<double>(); }
inline double to_double(const BigInt& r) { return r.convert_to<double>(); }
inline double to_double(double r) { return r; }

/// Exact rational value of a finite double.
Rational exact_rational(double v);

template <class T>
Eigen::MatrixXd to_eigen(const DenseMatrix<T>& m) {
  Eigen::MatrixXd r(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = to_double(m(i, j));
  return r;
}

/// "p/q" or "p" text form.
inline std::string to_string(const Rational& r) { return r.str(); }
inline std::string to_string(const BigInt& r) { return r.str(); }

}  // namespace oscctl
