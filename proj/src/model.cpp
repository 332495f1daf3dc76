#include "tbpoint/model.h"

#include <cmath>

namespace tbpoint {

namespace {

const double kStep1 = std::cbrt(kEps);
const double kStep2 = std::sqrt(std::sqrt(kEps));

Vector& slot_ref(Point& p, Slot s) { return s == Slot::x ? p.x : p.y; }
const Vector& slot_ref(const Point& p, Slot s) { return s == Slot::x ? p.x : p.y; }
double& param_ref(Point& p, Param k) { return k == Param::lambda ? p.lambda : p.mu; }
double param_value(const Point& p, Param k) { return k == Param::lambda ? p.lambda : p.mu; }

Point shifted(const Point& p, Slot s, std::span<const double> dir, double h) {
  Point q = p;
  Vector& z = slot_ref(q, s);
  for (std::size_t i = 0; i < z.size(); ++i) z[i] += h * dir[i];
  return q;
}

int index(Slot s) { return s == Slot::x ? 0 : 1; }
int index(Param k) { return k == Param::lambda ? 0 : 1; }

}  // namespace

std::string to_string(Slot s) { return s == Slot::x ? "1" : "2"; }
std::string to_string(Param p) { return p == Param::lambda ? "lambda" : "mu"; }

DdeModel::DdeModel(std::string name, std::size_t n, double tau, Rhs f,
                   DerivativeSuppliers derivs,
                   std::pair<std::string, std::string> parameter_names)
    : name_(std::move(name)),
      n_(n),
      tau_(tau),
      f_(std::move(f)),
      d_(std::move(derivs)),
      parameter_names_(std::move(parameter_names)) {
  if (n_ < 1) throw InputError("model dimension must be at least 1");
  if (!(tau_ > 0.0) || !std::isfinite(tau_)) throw InputError("delay must be positive");
  if (!f_) throw InputError("model right-hand side is empty");
}

void DdeModel::check_point(const Point& p) const {
  if (p.x.size() != n_ || p.y.size() != n_)
    throw InputError("state length " + std::to_string(p.x.size()) + "/" +
                     std::to_string(p.y.size()) + " does not match model dimension " +
                     std::to_string(n_));
}

void DdeModel::check_direction(std::span<const double> v, const char* what) const {
  if (v.size() != n_) throw InputError(std::string(what) + " has wrong length");
}

Vector DdeModel::eval(const Point& p) const {
  check_point(p);
  Vector r = f_(p);
  if (r.size() != n_) throw InputError("model returned a vector of the wrong length");
  return r;
}

bool DdeModel::has_analytic_jacobian(Slot s) const {
  return s == Slot::x ? static_cast<bool>(d_.jac_x) : static_cast<bool>(d_.jac_y);
}
bool DdeModel::has_analytic_param(Param k) const {
  return k == Param::lambda ? static_cast<bool>(d_.d_lambda) : static_cast<bool>(d_.d_mu);
}
bool DdeModel::has_analytic_second(Slot a, Slot b) const {
  return static_cast<bool>(d_.second[index(a)][index(b)]);
}
bool DdeModel::has_analytic_mixed(Slot a, Param k) const {
  return static_cast<bool>(d_.mixed[index(a)][index(k)]);
}

std::vector<std::string> DdeModel::missing_for_analytic_jacobian() const {
  std::vector<std::string> missing;
  for (Slot a : {Slot::x, Slot::y}) {
    if (!has_analytic_jacobian(a)) missing.push_back("f" + to_string(a));
    for (Slot b : {Slot::x, Slot::y})
      if (!has_analytic_second(a, b)) missing.push_back("f" + to_string(a) + to_string(b));
    for (Param k : {Param::lambda, Param::mu})
      if (!has_analytic_mixed(a, k)) missing.push_back("f" + to_string(a) + to_string(k));
  }
  for (Param k : {Param::lambda, Param::mu})
    if (!has_analytic_param(k)) missing.push_back("f_" + to_string(k));
  return missing;
}

DenseMatrix DdeModel::fd_jac(Slot s, const Point& p) const {
  check_point(p);
  DenseMatrix j(n_, n_);
  Vector e(n_, 0.0);
  for (std::size_t c = 0; c < n_; ++c) {
    const double h = kStep1 * std::max(1.0, std::abs(slot_ref(p, s)[c]));
    e[c] = 1.0;
    const Vector fp = eval(shifted(p, s, e, h));
    const Vector fm = eval(shifted(p, s, e, -h));
    e[c] = 0.0;
    for (std::size_t r = 0; r < n_; ++r) j(r, c) = (fp[r] - fm[r]) / (2.0 * h);
  }
  return j;
}

DenseMatrix DdeModel::jac(Slot s, const Point& p) const {
  check_point(p);
  const auto& fn = s == Slot::x ? d_.jac_x : d_.jac_y;
  if (!fn) return fd_jac(s, p);
  DenseMatrix j = fn(p);
  if (j.rows() != n_ || j.cols() != n_) throw InputError("Jacobian supplier returned wrong shape");
  return j;
}

Vector DdeModel::fd_param_der(Param k, const Point& p) const {
  check_point(p);
  const double h = kStep1 * std::max(1.0, std::abs(param_value(p, k)));
  Point q = p;
  param_ref(q, k) += h;
  const Vector fp = eval(q);
  param_ref(q, k) = param_value(p, k) - h;
  const Vector fm = eval(q);
  Vector d(n_);
  for (std::size_t i = 0; i < n_; ++i) d[i] = (fp[i] - fm[i]) / (2.0 * h);
  return d;
}

Vector DdeModel::param_der(Param k, const Point& p) const {
  check_point(p);
  const auto& fn = k == Param::lambda ? d_.d_lambda : d_.d_mu;
  return fn ? fn(p) : fd_param_der(k, p);
}

Vector DdeModel::fd_second_dirder(Slot a, Slot b, const Point& p, std::span<const double> u,
                                  std::span<const double> w) const {
  check_point(p);
  check_direction(u, "first direction");
  check_direction(w, "second direction");
  const double nu = norm_inf(u);
  const double nw = norm_inf(w);
  Vector out(n_, 0.0);
  if (nu == 0.0 || nw == 0.0) return out;
  Vector un(u.begin(), u.end()), wn(w.begin(), w.end());
  for (auto& v : un) v /= nu;
  for (auto& v : wn) v /= nw;

  if (has_analytic_jacobian(a)) {
    const double h = kStep1 * std::max(1.0, norm_inf(slot_ref(p, b)));
    const Vector jp = matvec(jac(a, shifted(p, b, wn, h)), un);
    const Vector jm = matvec(jac(a, shifted(p, b, wn, -h)), un);
    for (std::size_t i = 0; i < n_; ++i) out[i] = nu * nw * (jp[i] - jm[i]) / (2.0 * h);
    return out;
  }
  const double h = kStep2 * std::max({1.0, norm_inf(p.x), norm_inf(p.y)});
  auto at = [&](double sa, double sb) {
    return eval(shifted(shifted(p, a, un, sa * h), b, wn, sb * h));
  };
  const Vector pp = at(1, 1), pm = at(1, -1), mp = at(-1, 1), mm = at(-1, -1);
  for (std::size_t i = 0; i < n_; ++i)
    out[i] = nu * nw * ((pp[i] - pm[i]) - (mp[i] - mm[i])) / (4.0 * h * h);
  return out;
}

Vector DdeModel::second_dirder(Slot a, Slot b, const Point& p, std::span<const double> u,
                               std::span<const double> w) const {
  const auto& fn = d_.second[index(a)][index(b)];
  if (!fn) return fd_second_dirder(a, b, p, u, w);
  check_point(p);
  check_direction(u, "first direction");
  check_direction(w, "second direction");
  return fn(p, u, w);
}

DenseMatrix DdeModel::fd_mixed_param_der(Slot a, Param k, const Point& p) const {
  check_point(p);
  DenseMatrix m(n_, n_);
  if (has_analytic_jacobian(a)) {
    const double h = kStep1 * std::max(1.0, std::abs(param_value(p, k)));
    Point q = p;
    param_ref(q, k) += h;
    const DenseMatrix jp = jac(a, q);
    param_ref(q, k) = param_value(p, k) - h;
    const DenseMatrix jm = jac(a, q);
    for (std::size_t r = 0; r < n_; ++r)
      for (std::size_t c = 0; c < n_; ++c) m(r, c) = (jp(r, c) - jm(r, c)) / (2.0 * h);
    return m;
  }
  const double hk = kStep2 * std::max(1.0, std::abs(param_value(p, k)));
  Vector e(n_, 0.0);
  for (std::size_t c = 0; c < n_; ++c) {
    const double hz = kStep2 * std::max(1.0, std::abs(slot_ref(p, a)[c]));
    e[c] = 1.0;
    auto at = [&](double sz, double sk) {
      Point q = shifted(p, a, e, sz * hz);
      param_ref(q, k) += sk * hk;
      return eval(q);
    };
    const Vector pp = at(1, 1), pm = at(1, -1), mp = at(-1, 1), mm = at(-1, -1);
    e[c] = 0.0;
    for (std::size_t r = 0; r < n_; ++r)
      m(r, c) = ((pp[r] - pm[r]) - (mp[r] - mm[r])) / (4.0 * hz * hk);
  }
  return m;
}

DenseMatrix DdeModel::mixed_param_der(Slot a, Param k, const Point& p) const {
  const auto& fn = d_.mixed[index(a)][index(k)];
  if (!fn) return fd_mixed_param_der(a, k, p);
  check_point(p);
  return fn(p);
}

}  // namespace tbpoint
