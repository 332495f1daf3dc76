#include "tbpoint/defining.h"

#include <cmath>

namespace tbpoint {

Vector TbCandidate::pack() const {
  const std::size_t n = x.size();
  if (phi1.size() != n || phi2.size() != n)
    throw InputError("candidate blocks have inconsistent lengths");
  Vector v;
  v.reserve(3 * n + 2);
  v.insert(v.end(), x.begin(), x.end());
  v.insert(v.end(), phi1.begin(), phi1.end());
  v.insert(v.end(), phi2.begin(), phi2.end());
  v.push_back(lambda);
  v.push_back(mu);
  return v;
}

TbCandidate TbCandidate::unpack(std::span<const double> v, std::size_t n) {
  if (v.size() != 3 * n + 2)
    throw InputError("packed candidate has length " + std::to_string(v.size()) +
                     ", expected " + std::to_string(3 * n + 2));
  TbCandidate c;
  c.x.assign(v.begin(), v.begin() + n);
  c.phi1.assign(v.begin() + n, v.begin() + 2 * n);
  c.phi2.assign(v.begin() + 2 * n, v.begin() + 3 * n);
  c.lambda = v[3 * n];
  c.mu = v[3 * n + 1];
  return c;
}

bool TbCandidate::all_finite() const {
  for (const Vector* b : {&x, &phi1, &phi2})
    for (double e : *b)
      if (!std::isfinite(e)) return false;
  return std::isfinite(lambda) && std::isfinite(mu);
}

Functionals::Functionals(Vector l1_, Vector l2_) : l1(std::move(l1_)), l2(std::move(l2_)) {
  if (l1.size() != l2.size()) throw InputError("l1 and l2 must have the same length");
  if (norm_inf(l1) == 0.0 && norm_inf(l2) == 0.0)
    throw InputError("l1 and l2 must not both be zero");
}

Functionals Functionals::from_phi1_guess(std::span<const double> phi1_guess) {
  if (phi1_guess.empty()) throw InputError("empty phi1 guess");
  std::size_t k = 0;
  for (std::size_t i = 1; i < phi1_guess.size(); ++i)
    if (std::abs(phi1_guess[i]) > std::abs(phi1_guess[k])) k = i;
  Vector e(phi1_guess.size(), 0.0);
  e[k] = 1.0;
  return Functionals(e, e);
}

std::string to_string(JacobianMode m) { return m == JacobianMode::analytic ? "analytic" : "fd"; }

JacobianMode parse_jacobian_mode(const std::string& s) {
  if (s == "analytic") return JacobianMode::analytic;
  if (s == "fd") return JacobianMode::fd;
  throw InputError("unknown jacobian mode '" + s + "' (expected analytic or fd)");
}

JacobianMode default_jacobian_mode(const DdeModel& model) {
  return model.missing_for_analytic_jacobian().empty() ? JacobianMode::analytic
                                                       : JacobianMode::fd;
}

namespace {

void check_shapes(const DdeModel& model, const TbCandidate& v, const Functionals& l) {
  const std::size_t n = model.dimension();
  if (v.x.size() != n || v.phi1.size() != n || v.phi2.size() != n)
    throw InputError("candidate does not match model dimension " + std::to_string(n));
  if (l.l1.size() != n || l.l2.size() != n)
    throw InputError("functionals do not match model dimension " + std::to_string(n));
}

}  // namespace

Vector residual(const DdeModel& model, const TbCandidate& v, const Functionals& l) {
  check_shapes(model, v, l);
  const std::size_t n = model.dimension();
  const Point p = v.equilibrium();
  const DenseMatrix f1 = model.jac_x(p);
  const DenseMatrix f2 = model.jac_y(p);
  const DenseMatrix a = f1 + f2;
  const Vector f2phi1 = matvec(f2, v.phi1);
  const Vector f2phi2 = matvec(f2, v.phi2);

  Vector h;
  h.reserve(3 * n + 2);
  const Vector b1 = model.eval(p);
  const Vector b2 = matvec(a, v.phi1);
  const Vector b3 = matvec(a, v.phi2) - (f2phi1 + v.phi1);
  h.insert(h.end(), b1.begin(), b1.end());
  h.insert(h.end(), b2.begin(), b2.end());
  h.insert(h.end(), b3.begin(), b3.end());
  h.push_back(dot(l.l1, v.phi1) - 0.5 * dot(l.l2, f2phi1) + dot(l.l1, f2phi1) - 1.0);
  h.push_back(dot(l.l1, v.phi2) - 0.5 * dot(l.l1, f2phi1) + dot(l.l1, f2phi2) +
              dot(l.l2, f2phi1) / 6.0 - 0.5 * dot(l.l2, f2phi2));
  return h;
}

namespace {

DenseMatrix fd_jacobian(const DdeModel& model, const TbCandidate& v, const Functionals& l) {
  const std::size_t n = model.dimension();
  const Vector v0 = v.pack();
  const Vector h0 = residual(model, v, l);
  const std::size_t m = v0.size();
  DenseMatrix j(m, m);
  const double root_eps = std::sqrt(kEps);
  for (std::size_t c = 0; c < m; ++c) {
    Vector vp = v0;
    const double h = root_eps * std::max(1.0, std::abs(v0[c]));
    vp[c] += h;
    const double dh = vp[c] - v0[c];
    const Vector hp = residual(model, TbCandidate::unpack(vp, n), l);
    for (std::size_t r = 0; r < m; ++r) j(r, c) = (hp[r] - h0[r]) / dh;
  }
  return j;
}

// Derivatives of the three x-dependent blocks and two scalar rows along one
// direction of (x, lambda, mu). d1u/d2u give the derivative of f1/f2 along
// that direction applied to phi1 and phi2.
struct DirectionalPieces {
  Vector df;                 // derivative of f itself
  Vector d1phi1, d1phi2;     // (d f1) phi1, (d f1) phi2
  Vector d2phi1, d2phi2;     // (d f2) phi1, (d f2) phi2
};

void fill_column(DenseMatrix& j, std::size_t col, std::size_t n, const DirectionalPieces& d,
                 const Functionals& l) {
  for (std::size_t i = 0; i < n; ++i) {
    j(i, col) = d.df[i];
    j(n + i, col) = d.d1phi1[i] + d.d2phi1[i];
    j(2 * n + i, col) = d.d1phi2[i] + d.d2phi2[i] - d.d2phi1[i];
  }
  j(3 * n, col) = dot(l.l1, d.d2phi1) - 0.5 * dot(l.l2, d.d2phi1);
  j(3 * n + 1, col) = dot(l.l1, d.d2phi2) - 0.5 * dot(l.l1, d.d2phi1) +
                      dot(l.l2, d.d2phi1) / 6.0 - 0.5 * dot(l.l2, d.d2phi2);
}

DenseMatrix analytic_jacobian(const DdeModel& model, const TbCandidate& v,
                              const Functionals& l) {
  if (const auto missing = model.missing_for_analytic_jacobian(); !missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    throw MissingDerivatives("model '" + model.name() + "' lacks analytic " + list);
  }
  const std::size_t n = model.dimension();
  const Point p = v.equilibrium();
  const DenseMatrix f1 = model.jac_x(p);
  const DenseMatrix f2 = model.jac_y(p);
  const DenseMatrix a = f1 + f2;
  const std::size_t m = 3 * n + 2;
  DenseMatrix j(m, m);

  // x columns: x enters both the current and the delayed slot.
  auto along_state = [&](Slot slot, std::span<const double> u, std::span<const double> dir) {
    return model.second_dirder(slot, Slot::x, p, u, dir) +
           model.second_dirder(slot, Slot::y, p, u, dir);
  };
  Vector e(n, 0.0);
  for (std::size_t c = 0; c < n; ++c) {
    e[c] = 1.0;
    DirectionalPieces d;
    d.df = a.column(c);
    d.d1phi1 = along_state(Slot::x, v.phi1, e);
    d.d1phi2 = along_state(Slot::x, v.phi2, e);
    d.d2phi1 = along_state(Slot::y, v.phi1, e);
    d.d2phi2 = along_state(Slot::y, v.phi2, e);
    fill_column(j, c, l.l1.size(), d, l);
    e[c] = 0.0;
  }

  for (Param k : {Param::lambda, Param::mu}) {
    const DenseMatrix m1 = model.mixed_param_der(Slot::x, k, p);
    const DenseMatrix m2 = model.mixed_param_der(Slot::y, k, p);
    DirectionalPieces d;
    d.df = model.param_der(k, p);
    d.d1phi1 = matvec(m1, v.phi1);
    d.d1phi2 = matvec(m1, v.phi2);
    d.d2phi1 = matvec(m2, v.phi1);
    d.d2phi2 = matvec(m2, v.phi2);
    fill_column(j, k == Param::lambda ? 3 * n : 3 * n + 1, n, d, l);
  }

  // phi1 and phi2 columns are linear in the unknowns.
  const DenseMatrix f2i = f2 + DenseMatrix::identity(n);
  const Vector l1f2 = vecmat(l.l1, f2);
  const Vector l2f2 = vecmat(l.l2, f2);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      j(n + i, n + c) = a(i, c);
      j(2 * n + i, n + c) = -f2i(i, c);
      j(2 * n + i, 2 * n + c) = a(i, c);
    }
    j(3 * n, n + c) = l.l1[c] - 0.5 * l2f2[c] + l1f2[c];
    j(3 * n + 1, n + c) = -0.5 * l1f2[c] + l2f2[c] / 6.0;
    j(3 * n + 1, 2 * n + c) = l.l1[c] + l1f2[c] - 0.5 * l2f2[c];
  }
  return j;
}

}  // namespace

DenseMatrix jacobian(const DdeModel& model, const TbCandidate& v, const Functionals& l,
                     JacobianMode mode) {
  check_shapes(model, v, l);
  return mode == JacobianMode::analytic ? analytic_jacobian(model, v, l)
                                        : fd_jacobian(model, v, l);
}

NewtonReport newton_solve(const DdeModel& model, const TbCandidate& v0, const Functionals& l,
                          const NewtonOptions& opts) {
  check_shapes(model, v0, l);
  if (!v0.all_finite()) throw InputError("initial candidate has non-finite components");
  if (opts.max_iter < 0) throw InputError("max_iter must be non-negative");
  if (!(opts.damping > 0.0 && opts.damping <= 1.0))
    throw InputError("damping must lie in (0, 1]");

  const std::size_t n = model.dimension();
  NewtonReport rep;
  rep.mode = opts.mode.value_or(default_jacobian_mode(model));

  Vector scale;
  if (opts.scaling)
    for (double c : v0.pack()) scale.push_back(std::max(1.0, std::abs(c)));

  TbCandidate v = v0;
  double rn = norm_inf(residual(model, v, l));
  rep.iterate_history.push_back(v);
  rep.residual_history.push_back(rn);

  while (true) {
    if (!std::isfinite(rn) || rn > opts.divergence_threshold || !v.all_finite()) {
      rep.failure_reason = "diverged";
      break;
    }
    if (rn <= opts.tol_res) {
      rep.converged = true;
      rep.stop_rule = "residual";
      break;
    }
    if (rep.iterations >= opts.max_iter) {
      rep.failure_reason = "max_iter";
      break;
    }

    DenseMatrix j = jacobian(model, v, l, rep.mode);
    const Vector h = residual(model, v, l);
    Vector step;
    try {
      if (opts.scaling) {
        for (std::size_t r = 0; r < j.rows(); ++r)
          for (std::size_t c = 0; c < j.cols(); ++c) j(r, c) *= scale[c];
        step = solve(j, h);
        for (std::size_t c = 0; c < step.size(); ++c) step[c] *= scale[c];
      } else {
        step = solve(j, h);
      }
    } catch (const NearSingular&) {
      rep.failure_reason = "singular_jacobian";
      break;
    }

    const Vector packed = v.pack();
    const Vector next = axpy(-opts.damping, step, packed);
    const double step_norm = opts.damping * norm_inf(step);
    v = TbCandidate::unpack(next, n);
    rn = norm_inf(residual(model, v, l));
    ++rep.iterations;
    rep.iterate_history.push_back(v);
    rep.residual_history.push_back(rn);
    rep.step_history.push_back(step_norm);

    if (std::isfinite(rn) && v.all_finite() && rn > opts.tol_res &&
        step_norm <= opts.tol_step * std::max(1.0, norm_inf(packed))) {
      rep.converged = true;
      rep.stop_rule = "step";
      break;
    }
  }

  try {
    rep.final_cond = v.all_finite() ? cond_estimate(jacobian(model, v, l, rep.mode))
                                    : std::numeric_limits<double>::infinity();
  } catch (const Error&) {
    rep.final_cond = std::numeric_limits<double>::infinity();
  }
  if (!std::isfinite(rep.final_cond)) rep.final_cond = std::numeric_limits<double>::infinity();
  return rep;
}

}  // namespace tbpoint
