#include <doctest.h>

#include <numbers>

#include "tbpoint/defining.h"
#include "tbpoint/models.h"
#include "tbpoint/verify.h"

using namespace tbpoint;

namespace {

const TbCandidate kPredatorPrey{{1, 1}, {1, 0}, {0, -2}, 0.5, 2.0};
const TbCandidate kSynthetic{{0, 0}, {0.8, 0}, {-1.0 / 75.0, 1.2}, 0, 0};

// x' = -c x(t - 1) when delayed, else x' = -c x(t).
DdeModel scalar(double c, bool delayed) {
  DerivativeSuppliers d;
  d.jac_x = [=](const Point&) { return DenseMatrix{{delayed ? 0.0 : -c}}; };
  d.jac_y = [=](const Point&) { return DenseMatrix{{delayed ? -c : 0.0}}; };
  return DdeModel(delayed ? "delayed-decay" : "decay", 1, 1.0,
                  [=](const Point& p) { return Vector{-c * (delayed ? p.y[0] : p.x[0])}; }, d);
}

// Independent reference for the principal roots of z + exp(-z) = 0: Newton in
// one complex variable with the exact derivative 1 - exp(-z).
Complex scalar_root(Complex z) {
  for (int k = 0; k < 60; ++k) z -= (z + std::exp(-z)) / (1.0 - std::exp(-z));
  return z;
}

TbVerdict verdict_at(const DdeModel& m, const TbCandidate& s, double beta = 0.0) {
  const Point p = s.equilibrium();
  const DenseMatrix f1 = m.jac_x(p), f2 = m.jac_y(p);
  const double tol = default_tolerance(f1, f2);
  return quadratic_check(m, s, compute_basis(f1, f2, {.beta = beta}), tol);
}

}  // namespace

TEST_CASE("characteristic function values") {
  CHECK(std::abs(characteristic(predator_prey(), {1, 1}, 0.5, 2.0, 0.0)) == 0.0);
  CHECK(characteristic(scalar(1.0, false), {0}, 0, 0, 0.0) == Complex(1.0, 0.0));
  const Complex z(0.0, std::numbers::pi / 2);
  const Complex d = characteristic(scalar(1.0, true), {0}, 0, 0, z);
  CHECK(std::abs(d - Complex(0.0, std::numbers::pi / 2 - 1.0)) <= 1e-15);
}

TEST_CASE("derivative routes at zero agree") {
  const DdeModel m = synthetic_tb();
  for (const Point& p : {Point::equilibrium({0.3, -0.2}, 0.1, 0.05),
                         Point::equilibrium({1, 1}, 0.6, 2.0)}) {
    const DenseMatrix f1 = m.jac_x(p), f2 = m.jac_y(p);
    const auto contour = characteristic_at_zero(f1, f2, ZeroDerivativeMethod::contour);
    const auto central = characteristic_at_zero(f1, f2, ZeroDerivativeMethod::central_difference);
    const auto step = characteristic_at_zero(f1, f2, ZeroDerivativeMethod::complex_step);
    REQUIRE(std::abs(step.delta1) > 1e-3);
    CHECK(std::abs(central.delta1 - step.delta1) <= 1e-6 * std::abs(step.delta1));
    CHECK(std::abs(contour.delta1 - step.delta1) <= 1e-12 * std::max(1.0, std::abs(step.delta1)));
    CHECK(std::abs(contour.delta2 - central.delta2) <= 1e-6 * std::max(1.0, std::abs(contour.delta2)));
  }
}

TEST_CASE("characteristic derivatives at the predator-prey T-B point") {
  // Delta(z) = z^2 there: f1 + f2 e^{-z} has f2 = 0 and f1 nilpotent.
  const DdeModel m = predator_prey();
  const auto check = double_zero_check(m, {1, 1}, 0.5, 2.0, 1e-8);
  CHECK(check.pass);
  CHECK(check.values.delta0 == 0.0);
  CHECK(std::abs(check.values.delta1) <= 1e-14);
  CHECK(check.values.delta2 == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(check.equilibrium_residual == 0.0);
}

TEST_CASE("double-zero check fails away from the T-B point") {
  const DdeModel m = predator_prey();
  for (double sign : {1.0, -1.0}) {
    const double x1 = (1.0 + sign * std::sqrt(0.19)) / 0.9;
    const double x2 = (1.0 - x1 / 2.0) * (1.0 + x1 * x1);
    CHECK_FALSE(double_zero_check(m, {x1, x2}, 0.45, 2.0, 1e-8).pass);
  }
  CHECK_FALSE(double_zero_check(m, {2, 0}, 0.55, 2.0, 1e-8).pass);
  const auto decay = double_zero_check(scalar(1.0, false), {0}, 0, 0, 1e-8);
  CHECK_FALSE(decay.pass);
  CHECK(decay.values.delta0 == 1.0);
}

TEST_CASE("spectral scan on x' = -x finds the single root -1") {
  const auto roots = spectral_scan(scalar(1.0, false), {0}, 0, 0, {-2, 0, -1, 1}, 6);
  REQUIRE(roots.size() == 1);
  CHECK(std::abs(roots[0] - Complex(-1.0, 0.0)) <= 1e-12);
}

TEST_CASE("spectral scan on x' = -x(t - 1) finds the principal root") {
  const Complex ref = scalar_root(Complex(-0.3, 1.3));
  CHECK(std::abs(ref - Complex(-0.3181315052047642, 1.3372357014306893)) <= 1e-14);
  const auto roots = spectral_scan(scalar(1.0, true), {0}, 0, 0, {-1, 1, 0, 8}, 12);
  REQUIRE(roots.size() == 1);
  CHECK(std::abs(roots[0] - ref) <= 1e-10);
}

TEST_CASE("spectral scan at the predator-prey T-B point reports the zero root") {
  const auto roots = spectral_scan(predator_prey(), {1, 1}, 0.5, 2.0, {-1, 1, -8, 8}, 12);
  REQUIRE(roots.size() == 1);
  CHECK(std::abs(roots[0]) <= 1e-4);
  // Delta = z^2 is nonnegative on the real axis: a touching zero, no sign change
  for (double t = -1.0; t <= 1.0; t += 0.125)
    CHECK(characteristic(predator_prey(), {1, 1}, 0.5, 2.0, t).real() >= 0.0);
}

TEST_CASE("spectral scan input validation") {
  CHECK_THROWS_AS(spectral_scan(scalar(1.0, false), {0}, 0, 0, {}, 0), InputError);
  CHECK_THROWS_AS(spectral_scan(scalar(1.0, false), {0}, 0, 0, {1, -1, 0, 0}, 4), InputError);
}

TEST_CASE("quadratic check at the predator-prey T-B point matches the exact oracle") {
  const TbVerdict v = verdict_at(predator_prey(), kPredatorPrey);
  CHECK(v.quadratic_computed);
  CHECK(v.cond_i_value == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(std::abs(v.c_lam_mu) <= 1e-15);
  CHECK(std::abs(v.nu[0]) <= 1e-15);
  CHECK(v.nu[1] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(v.psi2_nu == doctest::Approx(-0.25).epsilon(1e-14));
  CHECK(v.nu_residual <= 1e-9);
  CHECK(std::abs(v.d0 - 0.125) <= 1e-9);
  CHECK(v.cond_iii_value == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(v.cond_i_pass());
  CHECK(v.d0_pass());
  CHECK(v.cond_iii_pass());
}

TEST_CASE("quadratic check on the synthetic model matches the exact oracle") {
  const TbVerdict v = verdict_at(synthetic_tb(), kSynthetic);
  CHECK(v.cond_i_value == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
  CHECK(v.c_lam_mu == doctest::Approx(-2.0).epsilon(1e-14));
  CHECK(std::abs(v.nu[0]) <= 1e-15);
  CHECK(v.nu[1] == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(v.psi2_nu == doctest::Approx(-4.0 / 3.0).epsilon(1e-14));
  CHECK(std::abs(v.d0 - 40.0 / 9.0) <= 1e-9);
  CHECK(v.cond_iii_value == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("d0 does not depend on the phi2 pinning") {
  for (const auto& [m, s] : {std::pair{predator_prey(), kPredatorPrey},
                            std::pair{synthetic_tb(), kSynthetic}}) {
    const double ref = verdict_at(m, s, 0.0).d0;
    for (double beta : {-0.7, 0.3, 1.5}) {
      const double d0 = verdict_at(m, s, beta).d0;
      CHECK(std::abs(d0 - ref) <= 1e-8 * std::abs(ref));
    }
  }
}

TEST_CASE("swapping the parameter roles on the synthetic model") {
  // lambda and mu exchanged in f: f1 = ... + mu_shift lambda + lam_delay mu y1
  const SyntheticTbParams sp{};
  DdeModel base = synthetic_tb(sp);
  const DdeModel swapped("synthetic-tb-swapped", 2, 1.0, [&base](const Point& p) {
    Point q = p;
    std::swap(q.lambda, q.mu);
    return base.eval(q);
  });
  const TbCandidate s = kSynthetic;
  const TbVerdict a = verdict_at(base, s);
  const TbVerdict b = verdict_at(swapped, s);
  CHECK(b.c_lam_mu == doctest::Approx(-0.5).epsilon(1e-8));
  CHECK(a.c_lam_mu * b.c_lam_mu == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(b.cond_i_value == doctest::Approx(8.0 / 3.0).epsilon(1e-8));
  CHECK(b.nu[1] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(b.d0 == doctest::Approx(-20.0 / 9.0).epsilon(1e-5));
}

TEST_CASE("condition (i) failure is an error") {
  // predator-prey with D and K exchanged: psi2 f_K = 0 at the T-B point
  const DdeModel base = predator_prey();
  const DdeModel swapped("swapped", 2, 1.0, [&base](const Point& p) {
    Point q = p;
    std::swap(q.lambda, q.mu);
    return base.eval(q);
  });
  const TbCandidate s{{1, 1}, {1, 0}, {0, -2}, 2.0, 0.5};
  CHECK_THROWS_AS(verdict_at(swapped, s), ConditionIFailed);
}

TEST_CASE("a model without mu dependence has c = 0") {
  const DdeModel base = synthetic_tb({.unfold = 0, .mu_shift = 0});
  const TbVerdict v = verdict_at(base, kSynthetic);
  CHECK(v.c_lam_mu == 0.0);
}

TEST_CASE("certify the predator-prey T-B point") {
  CertifyOptions o;
  o.functionals = Functionals({1, 0}, {1, 0});
  const TbVerdict v = certify(predator_prey(), kPredatorPrey, o);
  CHECK(v.passed());
  CHECK(v.existence.passed());
  CHECK(v.double_zero_pass());
  CHECK(v.basis_residual <= 1e-9);
  CHECK(v.jac_cond > 1.0);
  CHECK(v.jac_cond < 1e8);
  CHECK(v.near_axis_roots.empty());
  CHECK(v.notes.empty());
}

TEST_CASE("certify fails at D = 0.6 without throwing") {
  const TbVerdict v = certify(predator_prey(), {{1, 1}, {1, 0}, {0, -2}, 0.6, 2.0});
  CHECK_FALSE(v.passed());
  CHECK(v.existence.cond_i);
  CHECK_FALSE(v.existence.cond_ii);
  CHECK_FALSE(v.quadratic_computed);
  CHECK_FALSE(v.notes.empty());
}

TEST_CASE("certify records a condition (i) failure") {
  const DdeModel base = predator_prey();
  const DdeModel swapped("swapped", 2, 1.0, [&base](const Point& p) {
    Point q = p;
    std::swap(q.lambda, q.mu);
    return base.eval(q);
  });
  const TbVerdict v = certify(swapped, {{1, 1}, {1, 0}, {0, -2}, 2.0, 0.5});
  CHECK(v.existence.passed());
  CHECK_FALSE(v.cond_i_pass());
  CHECK_FALSE(v.passed());
  CHECK(std::abs(v.cond_i_value) <= v.tol);
}

TEST_CASE("certify warns about roots near the imaginary axis") {
  // x' = -(pi/2) x(t - 1) has roots +-i pi/2 on the axis
  const TbVerdict v = certify(scalar(std::numbers::pi / 2, true), {{0}, {1}, {0}, 0, 0});
  REQUIRE(v.near_axis_roots.size() == 2);
  CHECK(std::abs(std::abs(v.near_axis_roots[0].imag()) - std::numbers::pi / 2) <= 1e-9);
}
