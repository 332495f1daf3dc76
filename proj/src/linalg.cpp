#include "tbpoint/linalg.h"

#include <numeric>
#include <string>

namespace tbpoint {

namespace {

void require_same_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw InputError(std::string(what) + ": length mismatch");
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
  require_same_length(a.size(), b.size(), "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm_inf(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double norm2(std::span<const double> v) {
  // scaled to avoid overflow on large entries
  const double scale = norm_inf(v);
  if (scale == 0.0) return 0.0;
  double s = 0.0;
  for (double x : v) s += (x / scale) * (x / scale);
  return scale * std::sqrt(s);
}

Vector axpy(double alpha, std::span<const double> x, std::span<const double> y) {
  require_same_length(x.size(), y.size(), "axpy");
  Vector r(y.begin(), y.end());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += alpha * x[i];
  return r;
}

Vector operator+(const Vector& a, const Vector& b) { return axpy(1.0, b, a); }
Vector operator-(const Vector& a, const Vector& b) { return axpy(-1.0, b, a); }
Vector operator*(double s, const Vector& a) {
  Vector r(a);
  for (auto& v : r) v *= s;
  return r;
}

Vector matvec(const DenseMatrix& a, std::span<const double> x) {
  require_same_length(a.cols(), x.size(), "matvec");
  Vector r(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) r[i] = dot(a.row(i), x);
  return r;
}

Vector vecmat(std::span<const double> x, const DenseMatrix& a) {
  require_same_length(a.rows(), x.size(), "vecmat");
  Vector r(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) r[j] += x[i] * a(i, j);
  return r;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  require_same_length(a.cols(), b.rows(), "matmul");
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

double norm_inf(const DenseMatrix& a) { return norm_inf_of(a); }

namespace {

double inverse_norm_inf(const LuFactors<double>& f) {
  const std::size_t n = f.lu.rows();
  Vector row_sums(n, 0.0);
  Vector e(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    std::fill(e.begin(), e.end(), 0.0);
    e[j] = 1.0;
    const Vector col = lu_solve<double>(f, e);
    for (std::size_t i = 0; i < n; ++i) row_sums[i] += std::abs(col[i]);
  }
  return norm_inf(row_sums);
}

}  // namespace

double cond_estimate(const DenseMatrix& a) {
  if (!a.square()) throw InputError("condition number of a non-square matrix");
  if (a.rows() == 0) return 1.0;
  const auto f = lu_factor(a);
  if (f.exactly_singular) return std::numeric_limits<double>::infinity();
  const double c = norm_inf(a) * inverse_norm_inf(f);
  return std::isfinite(c) ? c : std::numeric_limits<double>::infinity();
}

Vector solve(const DenseMatrix& a, std::span<const double> b) {
  if (!a.square()) throw InputError("solve requires a square matrix");
  require_same_length(a.rows(), b.size(), "solve");
  const auto f = lu_factor(a);
  const double anorm = norm_inf(a);
  if (f.exactly_singular || f.min_pivot < kEps * anorm || anorm == 0.0)
    throw NearSingular("pivot below eps*||A||", std::numeric_limits<double>::infinity());
  const double cond = anorm * inverse_norm_inf(f);
  if (!(cond <= 1.0 / std::sqrt(kEps)))
    throw NearSingular("condition number exceeds 1/sqrt(eps)", cond);
  return lu_solve<double>(f, b);
}

JacobiSvd jacobi_svd(const DenseMatrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  DenseMatrix w = a;
  DenseMatrix v = DenseMatrix::identity(n);

  constexpr int kMaxSweeps = 80;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          alpha += w(i, p) * w(i, p);
          beta += w(i, q) * w(i, q);
          gamma += w(i, p) * w(i, q);
        }
        if (gamma == 0.0 || std::abs(gamma) <= kEps * std::sqrt(alpha * beta))
          continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) /
                         (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < m; ++i) {
          const double wp = w(i, p), wq = w(i, q);
          w(i, p) = c * wp - s * wq;
          w(i, q) = s * wp + c * wq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double vp = v(i, p), vq = v(i, q);
          v(i, p) = c * vp - s * vq;
          v(i, q) = s * vp + c * vq;
        }
      }
    }
    if (!rotated) break;
  }

  Vector sigma(n);
  for (std::size_t j = 0; j < n; ++j) sigma[j] = norm2(w.column(j));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return sigma[i] > sigma[j]; });

  JacobiSvd out;
  out.singular_values.resize(n);
  out.v = DenseMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.singular_values[k] = sigma[order[k]];
    out.v.set_column(k, v.column(order[k]));
  }
  return out;
}

void normalize_sign(Vector& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (std::abs(v[i]) > std::abs(v[best])) best = i;
  if (!v.empty() && v[best] < 0.0)
    for (auto& x : v) x = -x;
}

namespace {

Vector unit_null_column(const JacobiSvd& svd) {
  Vector v = svd.v.column(svd.v.cols() - 1);
  const double nv = norm2(v);
  for (auto& x : v) x /= nv;
  normalize_sign(v);
  return v;
}

}  // namespace

NullspaceResult rank_and_nullspace(const DenseMatrix& a, std::optional<double> tol) {
  if (!a.square()) throw InputError("rank_and_nullspace requires a square matrix");
  const std::size_t n = a.rows();
  if (n == 0) throw InputError("empty matrix");

  const JacobiSvd right = jacobi_svd(a);
  NullspaceResult out;
  out.report.singular_values = right.singular_values;
  const double smax = right.singular_values.front();
  out.report.tol_used = tol ? *tol * norm_inf(a) : static_cast<double>(n) * kEps * smax;
  int rank = 0;
  for (double s : right.singular_values)
    if (s > out.report.tol_used) ++rank;
  out.report.rank = rank;

  if (rank < static_cast<int>(n) - 1)
    throw RankDeficiencyMismatch(
        "numerical rank " + std::to_string(rank) + " below n-1 = " + std::to_string(n - 1),
        rank);
  if (rank == static_cast<int>(n) - 1) {
    out.right_null = unit_null_column(right);
    out.left_null = unit_null_column(jacobi_svd(a.transposed()));
  }
  return out;
}

BorderedSolution bordered_solve(const DenseMatrix& a, std::span<const double> col_border,
                                std::span<const double> row_border,
                                std::span<const double> rhs, double beta) {
  if (!a.square()) throw InputError("bordered_solve requires a square matrix");
  const std::size_t n = a.rows();
  require_same_length(col_border.size(), n, "bordered_solve column border");
  require_same_length(row_border.size(), n, "bordered_solve row border");
  require_same_length(rhs.size(), n, "bordered_solve rhs");

  DenseMatrix m(n + 1, n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m(i, j) = a(i, j);
    m(i, n) = col_border[i];
    m(n, i) = row_border[i];
  }
  Vector b(rhs.begin(), rhs.end());
  b.push_back(beta);
  Vector sol = solve(m, b);
  BorderedSolution out;
  out.s = sol.back();
  sol.pop_back();
  out.x = std::move(sol);
  return out;
}

}  // namespace tbpoint
