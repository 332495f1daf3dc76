#pragma once

// Small dense linear algebra: row-major matrices, partially pivoted LU,
// determinants (real and complex), numerical rank with one-dimensional
// nullspaces via one-sided Jacobi SVD, and bordered solves of rank n-1
// systems. Sized for the (3n+2)-square Jacobians of the defining system.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "tbpoint/errors.h"

namespace tbpoint {

using Vector = std::vector<double>;
using ComplexVector = std::vector<std::complex<double>>;

inline constexpr double kEps = std::numeric_limits<double>::epsilon();

template <typename T>
class BasicMatrix {
 public:
  BasicMatrix() = default;
  BasicMatrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  BasicMatrix(std::initializer_list<std::initializer_list<T>> init) {
    rows_ = init.size();
    cols_ = rows_ ? init.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& row : init) {
      if (row.size() != cols_) throw InputError("ragged matrix initializer");
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  static BasicMatrix identity(std::size_t n) {
    BasicMatrix m(n, n);
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

  std::vector<T> column(std::size_t j) const {
    std::vector<T> c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }
  void set_column(std::size_t j, std::span<const T> c) {
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = c[i];
  }

  BasicMatrix transposed() const {
    BasicMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  BasicMatrix& operator+=(const BasicMatrix& o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  BasicMatrix& operator-=(const BasicMatrix& o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  BasicMatrix& operator*=(T s) {
    for (auto& v : data_) v *= s;
    return *this;
  }

  friend BasicMatrix operator+(BasicMatrix a, const BasicMatrix& b) { return a += b; }
  friend BasicMatrix operator-(BasicMatrix a, const BasicMatrix& b) { return a -= b; }
  friend BasicMatrix operator*(T s, BasicMatrix a) { return a *= s; }
  friend bool operator==(const BasicMatrix&, const BasicMatrix&) = default;

 private:
  void check_same(const BasicMatrix& o) const {
    if (o.rows_ != rows_ || o.cols_ != cols_)
      throw InputError("matrix shape mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using DenseMatrix = BasicMatrix<double>;
using ComplexMatrix = BasicMatrix<std::complex<double>>;

// Vector helpers.
double dot(std::span<const double> a, std::span<const double> b);
double norm_inf(std::span<const double> v);
double norm2(std::span<const double> v);
Vector axpy(double alpha, std::span<const double> x, std::span<const double> y);
Vector operator+(const Vector& a, const Vector& b);
Vector operator-(const Vector& a, const Vector& b);
Vector operator*(double s, const Vector& a);

/// A*x.
Vector matvec(const DenseMatrix& a, std::span<const double> x);
/// Row vector times matrix, x^T A.
Vector vecmat(std::span<const double> x, const DenseMatrix& a);
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
double norm_inf(const DenseMatrix& a);

template <typename T>
double magnitude(const T& v) {
  return std::abs(v);
}

template <typename T>
double norm_inf_of(const BasicMatrix<T>& a) {
  double best = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (const auto& v : a.row(i)) s += magnitude(v);
    best = std::max(best, s);
  }
  return best;
}

/// In-place LU with partial (row) pivoting, PA = LU.
template <typename T>
struct LuFactors {
  BasicMatrix<T> lu;
  std::vector<std::size_t> perm;
  int sign = 1;
  double min_pivot = std::numeric_limits<double>::infinity();
  bool exactly_singular = false;
};

template <typename T>
LuFactors<T> lu_factor(BasicMatrix<T> a) {
  if (!a.square()) throw InputError("LU requires a square matrix");
  const std::size_t n = a.rows();
  LuFactors<T> f;
  f.perm.resize(n);
  for (std::size_t i = 0; i < n; ++i) f.perm[i] = i;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = magnitude(a(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      if (magnitude(a(i, k)) > best) {
        best = magnitude(a(i, k));
        p = i;
      }
    }
    f.min_pivot = std::min(f.min_pivot, best);
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
      std::swap(f.perm[k], f.perm[p]);
      f.sign = -f.sign;
    }
    if (best == 0.0) {
      f.exactly_singular = true;
      continue;
    }
    const T pivot = a(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const T m = a(i, k) / pivot;
      a(i, k) = m;
      if (m == T{}) continue;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= m * a(k, j);
    }
  }
  if (n == 0) f.min_pivot = 0.0;
  f.lu = std::move(a);
  return f;
}

template <typename T>
std::vector<T> lu_solve(const LuFactors<T>& f, std::span<const T> b) {
  const std::size_t n = f.lu.rows();
  if (b.size() != n) throw InputError("right-hand side length mismatch");
  std::vector<T> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[f.perm[i]];
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) x[i] -= f.lu(i, j) * x[j];
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = i + 1; j < n; ++j) x[i] -= f.lu(i, j) * x[j];
    x[i] /= f.lu(i, i);
  }
  return x;
}

/// Determinant as the signed product of LU pivots.
template <typename T>
T det(const BasicMatrix<T>& a) {
  if (!a.square()) throw InputError("determinant of a non-square matrix");
  const auto f = lu_factor(a);
  T d = static_cast<T>(f.sign);
  for (std::size_t i = 0; i < a.rows(); ++i) d *= f.lu(i, i);
  return d;
}

inline double det2x2(double m11, double m12, double m21, double m22) {
  return m11 * m22 - m12 * m21;
}

/// Solves Ax = b. Throws NearSingular when a pivot falls below eps*||A||_inf
/// or the condition number exceeds 1/sqrt(eps).
Vector solve(const DenseMatrix& a, std::span<const double> b);

/// Infinity-norm condition number ||A|| ||A^-1||, computed from the explicit
/// inverse (exact up to rounding for the sizes handled here). Returns +inf
/// for an exactly singular factorization.
double cond_estimate(const DenseMatrix& a);

struct RankReport {
  int rank = 0;
  Vector singular_values;  // non-increasing
  double tol_used = 0.0;   // absolute threshold on singular values

  friend bool operator==(const RankReport&, const RankReport&) = default;
};

struct NullspaceResult {
  RankReport report;
  std::optional<Vector> right_null;  // A v ~ 0, unit 2-norm
  std::optional<Vector> left_null;   // w A ~ 0, unit 2-norm
};

/// Singular values (non-increasing) and matching right singular vectors
/// (columns of V) by one-sided Jacobi rotations.
struct JacobiSvd {
  Vector singular_values;
  DenseMatrix v;
};
JacobiSvd jacobi_svd(const DenseMatrix& a);

/// Numerical rank with threshold tol*||A||_inf (default n*eps*sigma_max).
/// Null vectors are returned only when rank == n-1; rank < n-1 throws
/// RankDeficiencyMismatch.
NullspaceResult rank_and_nullspace(const DenseMatrix& a,
                                   std::optional<double> tol = std::nullopt);

/// Flips v so that its first component of largest magnitude is positive.
void normalize_sign(Vector& v);

struct BorderedSolution {
  Vector x;
  double s = 0.0;
};

/// Solves [[A, c], [r^T, 0]] (x, s) = (rhs, beta).
BorderedSolution bordered_solve(const DenseMatrix& a,
                                std::span<const double> col_border,
                                std::span<const double> row_border,
                                std::span<const double> rhs, double beta);

}  // namespace tbpoint
