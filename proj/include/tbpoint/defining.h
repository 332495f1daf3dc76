#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tbpoint/model.h"

namespace tbpoint {

/// Unknown of the reduced defining system, packed as v = (x, phi1, phi2, lambda, mu)
/// of length 3n + 2.
struct TbCandidate {
  Vector x;
  Vector phi1;
  Vector phi2;
  double lambda = 0.0;
  double mu = 0.0;

  std::size_t state_dimension() const noexcept { return x.size(); }
  Vector pack() const;
  static TbCandidate unpack(std::span<const double> v, std::size_t n);
  Point equilibrium() const { return Point::equilibrium(x, lambda, mu); }
  bool all_finite() const;

  friend bool operator==(const TbCandidate&, const TbCandidate&) = default;
};

/// Row vectors l1, l2 normalizing the chain (phi1, phi2).
struct Functionals {
  Vector l1;
  Vector l2;

  Functionals() = default;
  Functionals(Vector l1_, Vector l2_);

  /// Unit row vector in the coordinate where |phi1_guess| is largest, used for both.
  static Functionals from_phi1_guess(std::span<const double> phi1_guess);

  friend bool operator==(const Functionals&, const Functionals&) = default;
};

enum class JacobianMode { analytic, fd };

std::string to_string(JacobianMode m);
JacobianMode parse_jacobian_mode(const std::string& s);

/// analytic when the model supplies every derivative the Jacobian needs, else fd.
JacobianMode default_jacobian_mode(const DdeModel& model);

/// The five stacked blocks
///   f(x, x, lambda, mu)
///   (f1 + f2) phi1
///   (f1 + f2) phi2 - (f2 + I) phi1
///   l1 phi1 - l2 f2 phi1 / 2 + l1 f2 phi1 - 1
///   l1 phi2 - l1 f2 phi1 / 2 + l1 f2 phi2 + l2 f2 phi1 / 6 - l2 f2 phi2 / 2
/// with all derivatives evaluated at (x, x, lambda, mu).
Vector residual(const DdeModel& model, const TbCandidate& v, const Functionals& l);

/// Jacobian of residual() w.r.t. the packed v. Analytic mode differentiates
/// the blocks at the current iterate by contracting second and mixed
/// derivatives of f; fd mode forward-differences residual() column by column.
DenseMatrix jacobian(const DdeModel& model, const TbCandidate& v, const Functionals& l,
                     JacobianMode mode);

struct NewtonOptions {
  double tol_res = 1e-12;
  double tol_step = 1e-13;
  int max_iter = 50;
  std::optional<JacobianMode> mode;  // default_jacobian_mode() when empty
  double damping = 1.0;              // step multiplier; 1 is pure Newton
  bool scaling = false;              // column scaling by max(1, |v0_i|)
  double divergence_threshold = 1e12;

  friend bool operator==(const NewtonOptions&, const NewtonOptions&) = default;
};

struct NewtonReport {
  bool converged = false;
  int iterations = 0;
  std::vector<TbCandidate> iterate_history;  // iterations + 1 entries
  Vector residual_history;                   // inf-norms, iterations + 1 entries
  Vector step_history;                       // inf-norms, iterations entries
  double final_cond = 0.0;
  std::optional<std::string> failure_reason;  // singular_jacobian | diverged | max_iter
  JacobianMode mode = JacobianMode::analytic;
  std::string stop_rule;  // residual | step, when converged

  const TbCandidate& solution() const { return iterate_history.back(); }
  double final_residual() const { return residual_history.back(); }

  friend bool operator==(const NewtonReport&, const NewtonReport&) = default;
};

/// Undamped Newton iteration v <- v - J(v)^-1 H(v) by default. Stops when
/// ||H||_inf <= tol_res or the step is below tol_step * max(1, ||v||_inf).
/// A near-singular Jacobian aborts the run rather than regularizing it.
NewtonReport newton_solve(const DdeModel& model, const TbCandidate& v0, const Functionals& l,
                          const NewtonOptions& opts = {});

}  // namespace tbpoint
