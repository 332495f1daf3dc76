#include "tbpoint/eigenstructure.h"

namespace tbpoint {

namespace {

DenseMatrix shifted_identity(const DenseMatrix& f2) {
  return f2 + DenseMatrix::identity(f2.rows());
}

void check_pair(const DenseMatrix& f1, const DenseMatrix& f2) {
  if (!f1.square() || f1.rows() != f2.rows() || f1.cols() != f2.cols())
    throw InputError("f1 and f2 must be square matrices of the same size");
}

}  // namespace

double default_tolerance(const DenseMatrix& f1, const DenseMatrix& f2) {
  return 1e-8 * std::max(1.0, norm_inf(f1) + norm_inf(f2));
}

TbExistence tb_existence_test(const DenseMatrix& f1, const DenseMatrix& f2, double tol) {
  check_pair(f1, f2);
  const DenseMatrix a = f1 + f2;
  const double anorm = norm_inf(a);
  TbExistence out;
  out.tol = tol;
  NullspaceResult ns;
  try {
    ns = rank_and_nullspace(a, anorm > 0.0 ? std::optional<double>(tol / anorm) : std::nullopt);
  } catch (const RankDeficiencyMismatch& e) {
    // rank below n-1: condition (i) fails, nothing further is defined
    out.rank.rank = e.rank();
    return out;
  }
  out.rank = ns.report;
  out.cond_i = ns.report.rank == static_cast<int>(a.rows()) - 1;
  if (!out.cond_i) return out;

  const Vector& phi1 = *ns.right_null;
  const Vector& psi2 = *ns.left_null;
  out.phi1 = phi1;
  out.psi2 = psi2;
  const DenseMatrix f2i = shifted_identity(f2);
  const Vector chain_rhs = matvec(f2i, phi1);
  out.cond_ii_value = dot(psi2, chain_rhs);
  out.cond_ii = std::abs(out.cond_ii_value) <= tol;

  const Vector phi2 = bordered_solve(a, psi2, phi1, chain_rhs, 0.0).x;
  out.phi2 = phi2;
  const Vector w = matvec(f2i, phi2) - 0.5 * matvec(f2, phi1);
  out.cond_iii_value = dot(psi2, w);
  out.cond_iii = std::abs(out.cond_iii_value) > tol;
  return out;
}

EigenBasis compute_basis(const DenseMatrix& f1, const DenseMatrix& f2,
                         const BasisOptions& opts) {
  check_pair(f1, f2);
  const std::size_t n = f1.rows();
  const double tol = opts.tol.value_or(default_tolerance(f1, f2));
  const DenseMatrix a = f1 + f2;
  const double anorm = norm_inf(a);
  const NullspaceResult ns =
      rank_and_nullspace(a, anorm > 0.0 ? std::optional<double>(tol / anorm) : std::nullopt);
  if (ns.report.rank != static_cast<int>(n) - 1)
    throw InputError("f1 + f2 is nonsingular; there is no zero eigenvalue");

  const Vector& phi1 = *ns.right_null;
  const Vector& psi2_unit = *ns.left_null;
  const DenseMatrix f2i = shifted_identity(f2);

  // (f1+f2) phi2 = (f2+I) phi1, pinned by phi1 . phi2 = beta
  const Vector phi2 = bordered_solve(a, psi2_unit, phi1, matvec(f2i, phi1), opts.beta).x;
  // q (f1+f2) = psi2_unit (f2+I), pinned by q . psi2_unit = 0
  const Vector q =
      bordered_solve(a.transposed(), phi1, psi2_unit, vecmat(psi2_unit, f2i), 0.0).x;

  // psi2 = b psi2_unit, psi1 = b q + sigma psi2_unit; both normalizations are
  // linear in (b, sigma).
  const Vector f2phi1 = matvec(f2, phi1);
  const Vector f2iphi1 = matvec(f2i, phi1);
  const Vector f2iphi2 = matvec(f2i, phi2);
  const Vector f2phi2 = matvec(f2, phi2);
  const double m11 = dot(q, f2iphi1) - 0.5 * dot(psi2_unit, f2phi1);
  const double m12 = dot(psi2_unit, f2iphi1);
  const double m21 = dot(q, f2iphi2) - 0.5 * dot(q, f2phi1) +
                     dot(psi2_unit, f2phi1) / 6.0 - 0.5 * dot(psi2_unit, f2phi2);
  const double m22 = dot(psi2_unit, f2iphi2) - 0.5 * dot(psi2_unit, f2phi1);
  const double d = det2x2(m11, m12, m21, m22);
  const double scale = std::max({std::abs(m11) * std::abs(m22), std::abs(m12) * std::abs(m21),
                                 kEps});
  if (!(std::abs(d) > tol * scale) || !std::isfinite(d))
    throw DegenerateNormalization("eigenbasis normalizations are singular (det " +
                                  std::to_string(d) + ")");
  const double b = m22 / d;
  const double sigma = -m21 / d;

  EigenBasis out;
  out.phi1 = phi1;
  out.phi2 = phi2;
  out.psi2 = b * psi2_unit;
  out.psi1 = axpy(sigma, psi2_unit, b * q);
  return out;
}

std::array<double, 6> basis_residuals(const EigenBasis& basis, const DenseMatrix& f1,
                                      const DenseMatrix& f2) {
  check_pair(f1, f2);
  const DenseMatrix a = f1 + f2;
  const DenseMatrix f2i = shifted_identity(f2);
  const auto& [phi1, phi2, psi1, psi2] = basis;
  const Vector f2phi1 = matvec(f2, phi1);
  const Vector f2phi2 = matvec(f2, phi2);
  std::array<double, 6> r{};
  r[0] = norm_inf(matvec(a, phi1));
  r[1] = norm_inf(matvec(a, phi2) - matvec(f2i, phi1));
  r[2] = norm_inf(vecmat(psi2, a));
  r[3] = norm_inf(vecmat(psi1, a) - vecmat(psi2, f2i));
  r[4] = std::abs(dot(psi1, phi1) - 0.5 * dot(psi2, f2phi1) + dot(psi1, f2phi1) - 1.0);
  r[5] = std::abs(dot(psi1, phi2) - 0.5 * dot(psi1, f2phi1) + dot(psi1, f2phi2) +
                  dot(psi2, f2phi1) / 6.0 - 0.5 * dot(psi2, f2phi2));
  return r;
}

}  // namespace tbpoint
