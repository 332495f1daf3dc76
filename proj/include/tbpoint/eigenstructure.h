#pragma once

#include <array>
#include <optional>

#include "tbpoint/linalg.h"

namespace tbpoint {

/// Outcome of the finite-dimensional Takens-Bogdanov existence test on the
/// linearization (f1, f2) at an equilibrium:
///   (i)   rank(f1 + f2) = n - 1
///   (ii)  (f2 + I) phi1 lies in range(f1 + f2)
///   (iii) (f2 + I) phi2 - f2 phi1 / 2 does not, for (f1 + f2) phi2 = (f2 + I) phi1.
/// Range membership is tested against the unit left null vector psi2.
/// The hypothesis that no other root of the characteristic equation sits on
/// the imaginary axis is not checked here.
struct TbExistence {
  double tol = 0.0;
  RankReport rank;
  bool cond_i = false;
  bool cond_ii = false;
  bool cond_iii = false;
  double cond_ii_value = 0.0;
  double cond_iii_value = 0.0;
  std::optional<Vector> phi1;  // unit right null vector
  std::optional<Vector> psi2;  // unit left null vector
  std::optional<Vector> phi2;  // chain vector pinned by phi1 . phi2 = 0
  bool spectral_hypothesis_checked = false;

  bool passed() const { return cond_i && cond_ii && cond_iii; }

  friend bool operator==(const TbExistence&, const TbExistence&) = default;
};

/// 1e-8 * max(1, ||f1||_inf + ||f2||_inf).
double default_tolerance(const DenseMatrix& f1, const DenseMatrix& f2);

TbExistence tb_existence_test(const DenseMatrix& f1, const DenseMatrix& f2, double tol);

/// Coefficient vectors of the bases of the generalized zero eigenspace and its
/// dual: Phi(theta) = (phi1, phi2 + theta phi1), Psi(s) = (psi1 - s psi2, psi2).
struct EigenBasis {
  Vector phi1;
  Vector phi2;
  Vector psi1;  // row vector
  Vector psi2;  // row vector

  friend bool operator==(const EigenBasis&, const EigenBasis&) = default;
};

struct BasisOptions {
  /// Absolute rank threshold; default_tolerance(f1, f2) when empty.
  std::optional<double> tol;
  /// phi2 is pinned by phi1 . phi2 = beta. The remaining freedom (the scale
  /// of psi2 and the psi2-component of psi1) is fixed by the two inner
  /// product normalizations.
  double beta = 0.0;
};

/// phi1 is the unit null vector with its largest component positive.
/// Throws RankDeficiencyMismatch when rank(f1 + f2) < n - 1, InputError when
/// the rank is full, and DegenerateNormalization when the normalizations
/// cannot be met.
EigenBasis compute_basis(const DenseMatrix& f1, const DenseMatrix& f2,
                         const BasisOptions& opts = {});

/// Residuals (inf-norm / absolute value) of the six defining identities, in order:
/// (f1+f2)phi1, (f1+f2)phi2 - (f2+I)phi1, psi2(f1+f2), psi1(f1+f2) - psi2(f2+I),
/// the two inner-product normalizations.
std::array<double, 6> basis_residuals(const EigenBasis& basis, const DenseMatrix& f1,
                                      const DenseMatrix& f2);

}  // namespace tbpoint
