#pragma once

// Small dense matrices at working precision. Sizes in this project stay
// below a few dozen, so everything is plain row-major storage.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "casimir/precision.hpp"

namespace casimir {

template <class S>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, S(0)) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = S(1);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  S& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const S& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    Matrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const S& aik = a(i, k);
        if (aik == 0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }
  friend Matrix operator-(const Matrix& a, const Matrix& b) {
    Matrix c = a;
    for (std::size_t i = 0; i < c.data_.size(); ++i) c.data_[i] -= b.data_[i];
    return c;
  }
  friend Matrix operator+(const Matrix& a, const Matrix& b) {
    Matrix c = a;
    for (std::size_t i = 0; i < c.data_.size(); ++i) c.data_[i] += b.data_[i];
    return c;
  }
  friend Matrix operator*(const S& s, const Matrix& a) {
    Matrix c = a;
    for (auto& v : c.data_) v *= s;
    return c;
  }

  S trace() const {
    S t(0);
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
  }

  S frobenius_squared() const {
    S t(0);
    for (const auto& v : data_) t += v * v;
    return t;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<S> data_;
};

/// Trace of a*b without forming the product.
template <class S>
S trace_of_product(const Matrix<S>& a, const Matrix<S>& b) {
  S t(0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) t += a(i, k) * b(k, i);
  return t;
}

/// LU factorisation with partial pivoting.
template <class S>
class LuDecomposition {
 public:
  explicit LuDecomposition(Matrix<S> a) : lu_(std::move(a)), perm_(lu_.rows()) {
    const std::size_t n = lu_.rows();
    for (std::size_t i = 0; i < n; ++i) perm_[i] = i;
    for (std::size_t k = 0; k < n; ++k) {
      std::size_t p = k;
      S best = scalar_traits<S>::abs(lu_(k, k));
      for (std::size_t i = k + 1; i < n; ++i) {
        const S v = scalar_traits<S>::abs(lu_(i, k));
        if (v > best) {
          best = v;
          p = i;
        }
      }
      if (p != k) {
        for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(p, j));
        std::swap(perm_[k], perm_[p]);
        sign_ = -sign_;
      }
      if (lu_(k, k) == 0) {
        singular_ = true;
        continue;
      }
      for (std::size_t i = k + 1; i < n; ++i) {
        if (lu_(i, k) == 0) continue;
        lu_(i, k) /= lu_(k, k);
        const S f = lu_(i, k);
        for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= f * lu_(k, j);
      }
    }
  }

  std::size_t size() const { return lu_.rows(); }
  bool exactly_singular() const { return singular_; }
  int permutation_sign() const { return sign_; }
  const S& pivot(std::size_t i) const { return lu_(i, i); }

  /// max|u_ii| / min|u_ii|, a cheap lower bound for the condition number.
  double pivot_ratio() const {
    if (size() == 0) return 1.0;
    S lo = scalar_traits<S>::abs(lu_(0, 0)), hi = lo;
    for (std::size_t i = 1; i < size(); ++i) {
      const S v = scalar_traits<S>::abs(lu_(i, i));
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
    if (lo == 0) return std::numeric_limits<double>::infinity();
    return scalar_traits<S>::to_double(hi / lo);
  }

  /// Solves A X = B column by column.
  Matrix<S> solve(const Matrix<S>& b) const {
    const std::size_t n = size();
    Matrix<S> x(n, b.cols());
    for (std::size_t c = 0; c < b.cols(); ++c) {
      std::vector<S> y(n);
      for (std::size_t i = 0; i < n; ++i) {
        S acc = b(perm_[i], c);
        for (std::size_t j = 0; j < i; ++j) acc -= lu_(i, j) * y[j];
        y[i] = acc;
      }
      for (std::size_t ii = n; ii-- > 0;) {
        S acc = y[ii];
        for (std::size_t j = ii + 1; j < n; ++j) acc -= lu_(ii, j) * x(j, c);
        x(ii, c) = acc / lu_(ii, ii);
      }
    }
    return x;
  }

 private:
  Matrix<S> lu_;
  std::vector<std::size_t> perm_;
  int sign_ = 1;
  bool singular_ = false;
};

/// ln det A for a matrix with positive determinant.
inline Real log_determinant(const Matrix<Real>& a) {
  const LuDecomposition<Real> lu(a);
  if (lu.exactly_singular()) throw SingularMatrix("log_determinant of a singular matrix", 0, INFINITY);
  Real acc(0);
  int sign = lu.permutation_sign();
  for (std::size_t i = 0; i < lu.size(); ++i) {
    const Real& p = lu.pivot(i);
    if (p < 0) sign = -sign;
    acc += boost::multiprecision::log(boost::multiprecision::abs(p));
  }
  if (sign < 0) throw DomainError("log_determinant of a matrix with negative determinant");
  return acc;
}

/// Upper estimate of the spectral radius by Gelfand's formula,
/// ||A^(2^k)||_F^(2^-k), with repeated squaring and rescaling.
inline Real spectral_radius_estimate(const Matrix<Real>& a, int squarings = 8) {
  Matrix<Real> p = a;
  Real log_scale(0);  // log of the factor divided out so far, per unit power
  Real power(1);
  for (int k = 0; k < squarings; ++k) {
    const Real norm = boost::multiprecision::sqrt(p.frobenius_squared());
    if (norm == 0) return Real(0);
    p = (Real(1) / norm) * p;
    log_scale += boost::multiprecision::log(norm) / power;
    p = p * p;
    power *= 2;
  }
  const Real norm = boost::multiprecision::sqrt(p.frobenius_squared());
  if (norm == 0) return Real(0);
  return boost::multiprecision::exp(log_scale + boost::multiprecision::log(norm) / power);
}

/// Least-squares solution of A c = b by Householder QR. Throws
/// RankDeficientFit when a column is dependent at working precision.
inline std::vector<Real> least_squares(Matrix<Real> a, std::vector<Real> b) {
  const std::size_t m = a.rows(), n = a.cols();
  if (m < n) throw RankDeficientFit("fewer samples than model terms");
  // Column scaling keeps the relative rank test meaningful.
  std::vector<Real> scale(n, Real(0));
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) scale[j] = std::max(scale[j], Real(boost::multiprecision::abs(a(i, j))));
    if (scale[j] == 0) throw RankDeficientFit("model column is identically zero on the grid");
    for (std::size_t i = 0; i < m; ++i) a(i, j) /= scale[j];
  }
  const Real tol = boost::multiprecision::pow(Real(10), -static_cast<int>(working_digits()) / 2);
  for (std::size_t k = 0; k < n; ++k) {
    Real norm(0);
    for (std::size_t i = k; i < m; ++i) norm += a(i, k) * a(i, k);
    norm = boost::multiprecision::sqrt(norm);
    if (norm <= tol) throw RankDeficientFit("design matrix is rank deficient");
    const Real alpha = a(k, k) > 0 ? Real(-norm) : norm;
    std::vector<Real> v(m, Real(0));
    for (std::size_t i = k; i < m; ++i) v[i] = a(i, k);
    v[k] -= alpha;
    Real vnorm2(0);
    for (std::size_t i = k; i < m; ++i) vnorm2 += v[i] * v[i];
    if (vnorm2 == 0) continue;
    for (std::size_t j = k; j < n; ++j) {
      Real dot(0);
      for (std::size_t i = k; i < m; ++i) dot += v[i] * a(i, j);
      const Real f = 2 * dot / vnorm2;
      for (std::size_t i = k; i < m; ++i) a(i, j) -= f * v[i];
    }
    Real dot(0);
    for (std::size_t i = k; i < m; ++i) dot += v[i] * b[i];
    const Real f = 2 * dot / vnorm2;
    for (std::size_t i = k; i < m; ++i) b[i] -= f * v[i];
  }
  std::vector<Real> c(n, Real(0));
  for (std::size_t k = n; k-- > 0;) {
    Real acc = b[k];
    for (std::size_t j = k + 1; j < n; ++j) acc -= a(k, j) * c[j];
    c[k] = acc / a(k, k);
  }
  for (std::size_t j = 0; j < n; ++j) c[j] /= scale[j];
  return c;
}

}  // namespace casimir
