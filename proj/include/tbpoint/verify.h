#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "tbpoint/defining.h"
#include "tbpoint/eigenstructure.h"
#include "tbpoint/model.h"

namespace tbpoint {

using Complex = std::complex<double>;

/// Delta(z) = det(z I - f1 - f2 exp(-z)) of the linearization at (x, x, lambda, mu).
Complex characteristic(const DdeModel& model, const Vector& x, double lambda, double mu,
                       Complex z);
Complex characteristic(const DenseMatrix& f1, const DenseMatrix& f2, Complex z);

enum class ZeroDerivativeMethod {
  contour,             // trapezoidal Cauchy integral on |z| = 1
  central_difference,  // real-axis differences, h = eps^(1/3) and eps^(1/4)
  complex_step,        // Im Delta(i h) / h for the first derivative
};

struct CharacteristicAtZero {
  double delta0 = 0.0;
  double delta1 = 0.0;
  double delta2 = 0.0;

  friend bool operator==(const CharacteristicAtZero&, const CharacteristicAtZero&) = default;
};

/// Delta(0) exactly and Delta'(0), Delta''(0) by the chosen method. The
/// complex-step variant fills delta2 by central differences.
CharacteristicAtZero characteristic_at_zero(const DenseMatrix& f1, const DenseMatrix& f2,
                                            ZeroDerivativeMethod method =
                                                ZeroDerivativeMethod::contour);

struct DoubleZeroCheck {
  CharacteristicAtZero values;
  double tol = 0.0;
  double equilibrium_residual = 0.0;  // ||f(x, x, lambda, mu)||_inf
  bool pass = false;
};

/// pass when |Delta(0)| <= tol, |Delta'(0)| <= tol and |Delta''(0)| > sqrt(tol).
DoubleZeroCheck double_zero_check(const DdeModel& model, const Vector& x, double lambda,
                                  double mu, double tol);

struct ComplexBox {
  double re_min = -1.0;
  double re_max = 1.0;
  double im_min = -8.0;
  double im_max = 8.0;

  friend bool operator==(const ComplexBox&, const ComplexBox&) = default;
};

/// Best-effort, non-exhaustive search for roots of Delta in a box: Newton
/// from a grid x grid set of seeds, keeping deduplicated roots with
/// |Delta| <= 1e-10. Multiplicity is not resolved.
std::vector<Complex> spectral_scan(const DdeModel& model, const Vector& x, double lambda,
                                   double mu, const ComplexBox& box, int grid = 12);

/// Certification record for one candidate. Pass flags are derived from the
/// stored values and tol, never stored separately.
struct TbVerdict {
  double tol = 0.0;
  TbExistence existence;
  std::optional<EigenBasis> basis;
  double basis_residual = 0.0;  // max of the six basis identities

  double cond_i_value = 0.0;  // psi2 f_lambda
  double c_lam_mu = 0.0;
  Vector nu;
  double psi2_nu = 0.0;
  double nu_residual = 0.0;
  double d0 = 0.0;
  double cond_iii_value = 0.0;  // psi2 phi2 - psi2 f2 phi1 / 2 + psi2 f2 phi2

  CharacteristicAtZero characteristic;
  double jac_cond = 0.0;
  std::vector<Complex> near_axis_roots;  // roots other than 0 close to Re z = 0
  std::vector<std::string> notes;

  bool quadratic_computed = false;
  bool characteristic_computed = false;

  bool cond_i_pass() const;
  bool d0_pass() const;
  bool cond_iii_pass() const;
  bool double_zero_pass() const;
  bool passed() const;

  friend bool operator==(const TbVerdict&, const TbVerdict&) = default;
};

/// Definition-level nondegeneracy quantities at a solution, using a basis
/// built at that solution. c = -psi2 f_mu / psi2 f_lambda; nu solves
/// (f1+f2) nu + c f_lambda + f_mu = 0 pinned by phi1 . nu = 0; d0 is the 2x2
/// determinant built from the derivatives of f1 and f2 along phi1 and along
/// (nu, c, 1) in (x, lambda, mu).
/// Throws ConditionIFailed when |psi2 f_lambda| <= tol and SingularNuSystem
/// when the nu system cannot be solved.
TbVerdict quadratic_check(const DdeModel& model, const TbCandidate& solution,
                          const EigenBasis& basis, double tol);

struct CertifyOptions {
  std::optional<double> tol;  // default_tolerance(f1, f2)
  std::optional<Functionals> functionals;  // enables jac_cond
  std::optional<JacobianMode> mode;
  BasisOptions basis;
  ComplexBox scan_box;
  int scan_grid = 12;
  double axis_margin = 1e-3;
  bool run_scan = true;
};

/// Runs every test on a candidate: existence, basis, quadratic check and the
/// characteristic double zero. Failures are recorded in the verdict instead
/// of thrown.
TbVerdict certify(const DdeModel& model, const TbCandidate& candidate,
                  const CertifyOptions& opts = {});

}  // namespace tbpoint
