#include "tbpoint/verify.h"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace tbpoint {

namespace {

constexpr double kRootResidual = 1e-10;
constexpr int kContourNodes = 64;
constexpr double kContourRadius = 1.0;

}  // namespace

Complex characteristic(const DenseMatrix& f1, const DenseMatrix& f2, Complex z) {
  if (!f1.square() || f1.rows() != f2.rows() || f1.cols() != f2.cols())
    throw InputError("characteristic: f1 and f2 must be square of equal size");
  const std::size_t n = f1.rows();
  const Complex e = std::exp(-z);
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      m(i, j) = (i == j ? z : Complex{}) - f1(i, j) - f2(i, j) * e;
  return det(m);
}

Complex characteristic(const DdeModel& model, const Vector& x, double lambda, double mu,
                       Complex z) {
  const Point p = Point::equilibrium(x, lambda, mu);
  return characteristic(model.jac_x(p), model.jac_y(p), z);
}

CharacteristicAtZero characteristic_at_zero(const DenseMatrix& f1, const DenseMatrix& f2,
                                            ZeroDerivativeMethod method) {
  CharacteristicAtZero out;
  out.delta0 = det(DenseMatrix(-1.0 * (f1 + f2)));
  auto delta = [&](Complex z) { return characteristic(f1, f2, z); };

  switch (method) {
    case ZeroDerivativeMethod::contour: {
      // Taylor coefficients a_k = (1 / N r^k) sum_j Delta(r w^j) w^(-jk).
      Complex s1{}, s2{};
      for (int j = 0; j < kContourNodes; ++j) {
        const double theta = 2.0 * std::numbers::pi * j / kContourNodes;
        const Complex w = std::polar(1.0, theta);
        const Complex d = delta(kContourRadius * w);
        s1 += d * std::conj(w);
        s2 += d * std::conj(w * w);
      }
      out.delta1 = (s1 / (kContourNodes * kContourRadius)).real();
      out.delta2 = 2.0 * (s2 / (kContourNodes * kContourRadius * kContourRadius)).real();
      break;
    }
    case ZeroDerivativeMethod::central_difference: {
      const double h1 = std::cbrt(kEps);
      const double h2 = std::sqrt(std::sqrt(kEps));
      out.delta1 = (delta(h1) - delta(-h1)).real() / (2.0 * h1);
      out.delta2 = (delta(h2) - 2.0 * out.delta0 + delta(-h2)).real() / (h2 * h2);
      break;
    }
    case ZeroDerivativeMethod::complex_step: {
      const double h = 1e-20;
      out.delta1 = delta(Complex(0.0, h)).imag() / h;
      const double h2 = std::sqrt(std::sqrt(kEps));
      out.delta2 = (delta(h2) - 2.0 * out.delta0 + delta(-h2)).real() / (h2 * h2);
      break;
    }
  }
  return out;
}

DoubleZeroCheck double_zero_check(const DdeModel& model, const Vector& x, double lambda,
                                  double mu, double tol) {
  const Point p = Point::equilibrium(x, lambda, mu);
  DoubleZeroCheck out;
  out.tol = tol;
  out.equilibrium_residual = norm_inf(model.eval(p));
  out.values = characteristic_at_zero(model.jac_x(p), model.jac_y(p));
  out.pass = std::abs(out.values.delta0) <= tol && std::abs(out.values.delta1) <= tol &&
             std::abs(out.values.delta2) > std::sqrt(tol);
  return out;
}

std::vector<Complex> spectral_scan(const DdeModel& model, const Vector& x, double lambda,
                                   double mu, const ComplexBox& box, int grid) {
  if (grid < 1) throw InputError("spectral_scan: grid must be positive");
  if (!(box.re_min <= box.re_max && box.im_min <= box.im_max))
    throw InputError("spectral_scan: empty box");
  const Point p = Point::equilibrium(x, lambda, mu);
  const DenseMatrix f1 = model.jac_x(p);
  const DenseMatrix f2 = model.jac_y(p);
  auto delta = [&](Complex z) { return characteristic(f1, f2, z); };

  auto inside = [&](Complex z) {
    const double slack = 1e-9 * std::max(1.0, std::abs(z));
    return z.real() >= box.re_min - slack && z.real() <= box.re_max + slack &&
           z.imag() >= box.im_min - slack && z.imag() <= box.im_max + slack;
  };

  std::vector<Complex> roots;
  auto seed_coord = [&](double lo, double hi, int k) {
    return grid == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * k / (grid - 1);
  };
  for (int a = 0; a < grid; ++a) {
    for (int b = 0; b < grid; ++b) {
      Complex z(seed_coord(box.re_min, box.re_max, a), seed_coord(box.im_min, box.im_max, b));
      Complex d = delta(z);
      for (int it = 0; it < 100; ++it) {
        const double h = 1e-7 * std::max(1.0, std::abs(z));
        const Complex dd = (delta(z + h) - delta(z - h)) / (2.0 * h);
        if (dd == Complex{} || !std::isfinite(std::abs(dd))) break;
        const Complex step = d / dd;
        z -= step;
        d = delta(z);
        if (!std::isfinite(std::abs(z)) || std::abs(z) > 1e6) break;
        if (std::abs(step) <= 1e-13 * std::max(1.0, std::abs(z))) break;
      }
      if (!std::isfinite(std::abs(d)) || std::abs(d) > kRootResidual || !inside(z)) continue;
      const bool seen = std::any_of(roots.begin(), roots.end(), [&](Complex r) {
        return std::abs(r - z) <= 1e-6 * std::max(1.0, std::abs(z));
      });
      if (!seen) roots.push_back(z);
    }
  }
  std::sort(roots.begin(), roots.end(), [](Complex a, Complex b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return roots;
}

bool TbVerdict::cond_i_pass() const {
  return quadratic_computed && std::abs(cond_i_value) > tol;
}
bool TbVerdict::d0_pass() const { return quadratic_computed && std::abs(d0) > tol; }
bool TbVerdict::cond_iii_pass() const {
  return quadratic_computed && std::abs(cond_iii_value) > tol;
}
bool TbVerdict::double_zero_pass() const {
  return characteristic_computed && std::abs(characteristic.delta0) <= tol &&
         std::abs(characteristic.delta1) <= tol &&
         std::abs(characteristic.delta2) > std::sqrt(tol);
}
bool TbVerdict::passed() const {
  return existence.passed() && cond_i_pass() && d0_pass() && cond_iii_pass() &&
         double_zero_pass();
}

namespace {

// Fills the quadratic-check fields of out step by step so that a failure
// part-way leaves the quantities computed so far in place.
void fill_quadratic(const DdeModel& model, const TbCandidate& s, const EigenBasis& basis,
                    double tol, TbVerdict& out) {
  const std::size_t n = model.dimension();
  if (s.x.size() != n || basis.phi1.size() != n || basis.phi2.size() != n ||
      basis.psi1.size() != n || basis.psi2.size() != n)
    throw InputError("quadratic_check: vector lengths do not match the model");
  out.tol = tol;
  const Point p = s.equilibrium();
  const DenseMatrix f1 = model.jac_x(p);
  const DenseMatrix f2 = model.jac_y(p);
  const DenseMatrix j = f1 + f2;
  const Vector f_lam = model.param_der(Param::lambda, p);
  const Vector f_mu = model.param_der(Param::mu, p);
  const Vector& phi1 = basis.phi1;
  const Vector& phi2 = basis.phi2;
  const Vector& psi1 = basis.psi1;
  const Vector& psi2 = basis.psi2;

  out.cond_i_value = dot(psi2, f_lam);
  const Vector f2phi1 = matvec(f2, phi1);
  const Vector f2phi2 = matvec(f2, phi2);
  out.cond_iii_value = dot(psi2, phi2) - 0.5 * dot(psi2, f2phi1) + dot(psi2, f2phi2);
  if (!(std::abs(out.cond_i_value) > tol))
    throw ConditionIFailed("psi2 f_lambda = " + std::to_string(out.cond_i_value) +
                           " is not above tol");

  out.c_lam_mu = -dot(psi2, f_mu) / out.cond_i_value;
  Vector rhs(n);
  for (std::size_t i = 0; i < n; ++i) rhs[i] = -(out.c_lam_mu * f_lam[i] + f_mu[i]);
  try {
    out.nu = bordered_solve(j, psi2, phi1, rhs, 0.0).x;
  } catch (const NearSingular& e) {
    throw SingularNuSystem(std::string("nu system: ") + e.what());
  }
  out.psi2_nu = dot(psi2, out.nu);
  out.nu_residual = norm_inf(matvec(j, out.nu) - rhs);

  const DenseMatrix f1_lam = model.mixed_param_der(Slot::x, Param::lambda, p);
  const DenseMatrix f1_mu = model.mixed_param_der(Slot::x, Param::mu, p);
  const DenseMatrix f2_lam = model.mixed_param_der(Slot::y, Param::lambda, p);
  const DenseMatrix f2_mu = model.mixed_param_der(Slot::y, Param::mu, p);

  // A_a w: derivative of f_a along the diagonal state direction phi1, applied to w.
  auto along = [&](Slot a, const Vector& dir, const Vector& w) {
    return model.second_dirder(a, Slot::x, p, w, dir) +
           model.second_dirder(a, Slot::y, p, w, dir);
  };
  auto a_op = [&](Slot a, const Vector& w) { return along(a, phi1, w); };
  auto b_op = [&](Slot a, const Vector& w) {
    const DenseMatrix& fl = a == Slot::x ? f1_lam : f2_lam;
    const DenseMatrix& fm = a == Slot::x ? f1_mu : f2_mu;
    return along(a, out.nu, w) + out.c_lam_mu * matvec(fl, w) + matvec(fm, w);
  };

  const Vector a1phi1 = a_op(Slot::x, phi1), a2phi1 = a_op(Slot::y, phi1);
  const Vector a1phi2 = a_op(Slot::x, phi2), a2phi2 = a_op(Slot::y, phi2);
  const Vector b1phi1 = b_op(Slot::x, phi1), b2phi1 = b_op(Slot::y, phi1);
  const Vector b1phi2 = b_op(Slot::x, phi2), b2phi2 = b_op(Slot::y, phi2);

  const Vector a_phi1 = a1phi1 + a2phi1, a_phi2 = a1phi2 + a2phi2;
  const Vector b_phi1 = b1phi1 + b2phi1, b_phi2 = b1phi2 + b2phi2;
  const double m11 = dot(psi2, a_phi1);
  const double m12 = dot(psi2, b_phi1);
  const double m21 = dot(psi1, a_phi1) + dot(psi2, a_phi2) - dot(psi2, a2phi1);
  const double m22 = dot(psi1, b_phi1) + dot(psi2, b_phi2) - dot(psi2, b2phi1);
  out.d0 = det2x2(m11, m12, m21, m22);
  out.quadratic_computed = true;
}

}  // namespace

TbVerdict quadratic_check(const DdeModel& model, const TbCandidate& solution,
                          const EigenBasis& basis, double tol) {
  TbVerdict out;
  out.basis = basis;
  const Point p = solution.equilibrium();
  out.basis_residual = 0.0;
  for (double r : basis_residuals(basis, model.jac_x(p), model.jac_y(p)))
    out.basis_residual = std::max(out.basis_residual, r);
  fill_quadratic(model, solution, basis, tol, out);
  return out;
}

TbVerdict certify(const DdeModel& model, const TbCandidate& candidate,
                  const CertifyOptions& opts) {
  TbVerdict out;
  const std::size_t n = model.dimension();
  if (candidate.x.size() != n) throw InputError("certify: state length mismatch");
  const Point p = candidate.equilibrium();
  const DenseMatrix f1 = model.jac_x(p);
  const DenseMatrix f2 = model.jac_y(p);
  out.tol = opts.tol ? *opts.tol : default_tolerance(f1, f2);

  const double eq_res = norm_inf(model.eval(p));
  if (eq_res > 1e-8)
    out.notes.push_back("equilibrium residual " + std::to_string(eq_res) + " exceeds 1e-8");

  try {
    out.existence = tb_existence_test(f1, f2, out.tol);
  } catch (const Error& e) {
    out.notes.push_back(std::string("existence test: ") + e.what());
  }

  if (out.existence.passed()) {
    try {
      BasisOptions bo = opts.basis;
      if (!bo.tol) bo.tol = out.tol;
      out.basis = compute_basis(f1, f2, bo);
      out.basis_residual = 0.0;
      for (double r : basis_residuals(*out.basis, f1, f2))
        out.basis_residual = std::max(out.basis_residual, r);
      fill_quadratic(model, candidate, *out.basis, out.tol, out);
    } catch (const Error& e) {
      out.notes.push_back(std::string("quadratic check: ") + e.what());
    }
  } else {
    out.notes.push_back("existence test failed; quadratic check skipped");
  }

  out.characteristic = characteristic_at_zero(f1, f2);
  out.characteristic_computed = true;

  if (opts.functionals) {
    const JacobianMode mode = opts.mode ? *opts.mode : default_jacobian_mode(model);
    TbCandidate at = candidate;
    if (out.basis && (at.phi1.size() != n || at.phi2.size() != n)) {
      at.phi1 = out.basis->phi1;
      at.phi2 = out.basis->phi2;
    }
    if (at.phi1.size() == n && at.phi2.size() == n)
      out.jac_cond = cond_estimate(jacobian(model, at, *opts.functionals, mode));
    else
      out.jac_cond = std::numeric_limits<double>::infinity();
  }

  if (opts.run_scan) {
    for (Complex z : spectral_scan(model, candidate.x, candidate.lambda, candidate.mu,
                                   opts.scan_box, opts.scan_grid)) {
      if (std::abs(z) <= 1e-4) continue;
      if (std::abs(z.real()) <= opts.axis_margin) out.near_axis_roots.push_back(z);
    }
    if (!out.near_axis_roots.empty())
      out.notes.push_back("warning: roots other than 0 near the imaginary axis "
                          "(non-exhaustive scan)");
  }
  return out;
}

}  // namespace tbpoint
