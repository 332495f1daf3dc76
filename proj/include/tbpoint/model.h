#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>

#include "tbpoint/linalg.h"

namespace tbpoint {

/// Argument of the right-hand side: current state x, delayed state y = x(t - tau),
/// and the two bifurcation parameters.
struct Point {
  Vector x;
  Vector y;
  double lambda = 0.0;
  double mu = 0.0;

  /// Steady state: the delayed state equals the current one.
  static Point equilibrium(Vector x, double lambda, double mu) {
    Vector y = x;
    return {std::move(x), std::move(y), lambda, mu};
  }
};

enum class Slot { x, y };
enum class Param { lambda, mu };

std::string to_string(Slot s);
std::string to_string(Param p);

/// Optional analytic derivative suppliers. Every missing entry falls back to
/// central finite differences.
///
/// Bilinear second derivatives follow the convention
///   second[a][b](p, u, w) = d/ds [ (df/d slot_a)(p + s w in slot_b) u ] at s = 0,
/// so second[x][y](p, u, w) is f_12[u, w]. Mixed parameter derivatives are
/// mixed[a][k](p) = d/d param_k of (df/d slot_a).
struct DerivativeSuppliers {
  using MatrixFn = std::function<DenseMatrix(const Point&)>;
  using VectorFn = std::function<Vector(const Point&)>;
  using BilinearFn = std::function<Vector(const Point&, std::span<const double>,
                                          std::span<const double>)>;

  MatrixFn jac_x;
  MatrixFn jac_y;
  VectorFn d_lambda;
  VectorFn d_mu;
  BilinearFn second[2][2];
  MatrixFn mixed[2][2];  // [slot][param]
};

/// Central-difference accuracy used for agreement checks, relative to
/// max(1, |reference|). First derivatives use h = eps^(1/3) max(1, |z_i|).
/// Second derivatives difference an analytic first derivative with the same
/// step, or f itself with h = eps^(1/4) max(1, |z_i|).
inline constexpr double kFirstOrderFdBound = 1e-8;
inline constexpr double kSecondOrderFdBound = 1e-6;

/// A delay differential equation x'(t) = f(x(t), x(t - tau), lambda, mu)
/// with a single constant delay. The delay is recorded but every computation
/// here works in the rescaled time where the delay is 1; equilibria and
/// parameter values do not depend on it.
class DdeModel {
 public:
  using Rhs = std::function<Vector(const Point&)>;

  DdeModel(std::string name, std::size_t n, double tau, Rhs f,
           DerivativeSuppliers derivs = {},
           std::pair<std::string, std::string> parameter_names = {"lambda", "mu"});

  const std::string& name() const noexcept { return name_; }
  std::size_t dimension() const noexcept { return n_; }
  double tau() const noexcept { return tau_; }
  const std::pair<std::string, std::string>& parameter_names() const noexcept {
    return parameter_names_;
  }

  Vector eval(const Point& p) const;

  DenseMatrix jac(Slot s, const Point& p) const;
  DenseMatrix jac_x(const Point& p) const { return jac(Slot::x, p); }
  DenseMatrix jac_y(const Point& p) const { return jac(Slot::y, p); }

  Vector second_dirder(Slot a, Slot b, const Point& p, std::span<const double> u,
                       std::span<const double> w) const;

  Vector param_der(Param k, const Point& p) const;
  DenseMatrix mixed_param_der(Slot a, Param k, const Point& p) const;

  bool has_analytic_jacobian(Slot s) const;
  bool has_analytic_param(Param k) const;
  bool has_analytic_second(Slot a, Slot b) const;
  bool has_analytic_mixed(Slot a, Param k) const;

  /// Names of the suppliers missing for a fully analytic defining-system
  /// Jacobian; empty when all are present.
  std::vector<std::string> missing_for_analytic_jacobian() const;

  /// Finite-difference versions, ignoring any analytic supplier. Used both as
  /// the fallback and to validate suppliers.
  DenseMatrix fd_jac(Slot s, const Point& p) const;
  Vector fd_param_der(Param k, const Point& p) const;
  Vector fd_second_dirder(Slot a, Slot b, const Point& p, std::span<const double> u,
                          std::span<const double> w) const;
  DenseMatrix fd_mixed_param_der(Slot a, Param k, const Point& p) const;

 private:
  void check_point(const Point& p) const;
  void check_direction(std::span<const double> v, const char* what) const;

  std::string name_;
  std::size_t n_;
  double tau_;
  Rhs f_;
  DerivativeSuppliers d_;
  std::pair<std::string, std::string> parameter_names_;
};

}  // namespace tbpoint
