// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <sys/wait.h>

#include "tbpoint/cli.h"
#include "tbpoint/defining.h"
#include "tbpoint/eigenstructure.h"
#include "tbpoint/models.h"
#include "tbpoint/verify.h"

using namespace tbpoint;

namespace {

const Functionals kL({1, 0}, {1, 0});
const TbCandidate kTarget{{1, 1}, {1, 0}, {0, -2}, 0.5, 2.0};

struct Row {
  TbCandidate v0;
  int count;
};

std::vector<Row> reference_starts() {
  auto c = [](std::initializer_list<double> v) { return TbCandidate::unpack(Vector(v), 2); };
  return {{c({1.1, 1.1, 1, 0, 3, 0, 0.4, 1}), 5},
          {c({1.2, 1.2, 1.2, 1, 1, 0, 0.5, 0.5}), 7},
          {c({1.5, 1.5, 1.5, 1.5, 1.5, 1.5, 0.6, 1.6}), 7},
          {c({3, 1.5, 1.2, 0.5, 1.8, -1.8, 0.45, 1.9}), 6}};
}

int failures = 0;

void report(int n, bool ok, const std::string& detail) {
  std::cout << (ok ? "PASS" : "FAIL") << " criterion " << n << ": " << detail << "\n";
  if (!ok) ++failures;
}

std::string sci(double v) {
  std::ostringstream s;
  s.precision(3);
  s << std::scientific << v;
  return s.str();
}

double max_abs(const DenseMatrix& a) {
  double m = 0.0;
  for (double v : a.data()) m = std::max(m, std::abs(v));
  return m;
}

int run_binary(const std::string& args) {
  const std::string cmd = std::string(TBPOINT_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string fixture(const std::string& name) { return std::string(TBPOINT_FIXTURE_DIR) + "/" + name; }

void criterion1_2_3(std::vector<NewtonReport>& reports) {
  const DdeModel m = predator_prey();
  const auto t0 = std::chrono::steady_clock::now();
  for (const Row& r : reference_starts()) reports.push_back(newton_solve(m, r.v0, kL));
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const auto rows = reference_starts();
  bool ok1 = seconds < 1.0;
  bool ok2 = true, ok3 = true;
  std::string counts;
  double max_res = 0.0, max_err = 0.0, max_id = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const NewtonReport& r = reports[i];
    counts += (i ? "," : "") + std::to_string(r.iterations);
    ok1 = ok1 && r.converged && std::abs(r.iterations - rows[i].count) <= 2 &&
          r.final_residual() <= 1e-12;
    max_res = std::max(max_res, r.final_residual());
    const TbCandidate s = r.solution();
    const double err = std::max({norm_inf(s.x - kTarget.x), std::abs(s.lambda - 0.5),
                                 std::abs(s.mu - 2.0)});
    ok2 = ok2 && r.converged && err <= 1e-10;
    max_err = std::max(max_err, err);
    // mu_growth^2 - 4 a D^2 = 0 and mu_growth = K D with a = mu_growth = 1
    const PredatorPreyParams p;
    const double id1 = std::abs(p.mu_growth * p.mu_growth - 4 * p.a * s.lambda * s.lambda);
    const double id2 = std::abs(p.mu_growth - s.mu * s.lambda);
    ok3 = ok3 && r.converged && id1 <= 1e-9 && id2 <= 1e-9;
    max_id = std::max({max_id, id1, id2});
  }
  report(1, ok1,
         "iterations (" + counts + ") vs (5,7,7,6) within 2, max residual " + sci(max_res) +
             " <= 1e-12, runtime " + sci(seconds) + " s < 1 s");
  report(2, ok2, "max |x-(1,1)|, |D-0.5|, |K-2| = " + sci(max_err) + " <= 1e-10");
  report(3, ok3, "max identity defect " + sci(max_id) + " <= 1e-9");
}

void criterion4(const TbCandidate& pp_solution, const TbCandidate& syn_solution) {
  bool ok = true;
  double worst = 0.0;
  for (const auto& [m, s] : {std::pair{predator_prey(), pp_solution},
                             std::pair{synthetic_tb(), syn_solution}}) {
    const Point p = s.equilibrium();
    const DenseMatrix f1 = m.jac_x(p), f2 = m.jac_y(p);
    for (double beta : {0.0, 0.3, -0.7}) {
      const EigenBasis b = compute_basis(f1, f2, {.beta = beta});
      for (double r : basis_residuals(b, f1, f2)) {
        worst = std::max(worst, r);
        ok = ok && r <= 1e-9;
      }
    }
  }
  report(4, ok, "max residual of the six chain equations " + sci(worst) + " <= 1e-9");
}

void criterion5(const TbCandidate& solution) {
  const DdeModel m = predator_prey();
  auto passes = [&](const Vector& x, double D, double K) {
    const Point p = Point::equilibrium(x, D, K);
    const DenseMatrix f1 = m.jac_x(p), f2 = m.jac_y(p);
    return tb_existence_test(f1, f2, default_tolerance(f1, f2)).passed();
  };
  const bool at_solution = passes(solution.x, solution.lambda, solution.mu);
  // D + 0.05: the only equilibrium with x1 > 0 is (K, 0); D - 0.05: two interior ones
  std::vector<Vector> perturbed_up{{2.0, 0.0}};
  std::vector<Vector> perturbed_down;
  for (double sign : {1.0, -1.0}) {
    const double x1 = (1.0 + sign * std::sqrt(0.19)) / 0.9;
    perturbed_down.push_back({x1, (1.0 - x1 / 2.0) * (1.0 + x1 * x1)});
  }
  bool rejects = true;
  double worst_eq = 0.0;
  for (const auto& x : perturbed_up) {
    worst_eq = std::max(worst_eq, norm_inf(m.eval(Point::equilibrium(x, 0.55, 2.0))));
    rejects = rejects && !passes(x, 0.55, 2.0);
  }
  for (const auto& x : perturbed_down) {
    worst_eq = std::max(worst_eq, norm_inf(m.eval(Point::equilibrium(x, 0.45, 2.0))));
    rejects = rejects && !passes(x, 0.45, 2.0);
  }
  report(5, at_solution && rejects && worst_eq <= 1e-12,
         std::string("existence test ") + (at_solution ? "passes" : "fails") +
             " at the solution and " + (rejects ? "fails" : "passes") +
             " at the 3 equilibria for D = 0.5 +- 0.05 (equilibrium residual " + sci(worst_eq) +
             ")");
}

void criterion6(const NewtonReport& row1) {
  const DdeModel m = predator_prey();
  std::mt19937 rng(6);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  double worst = 0.0;
  bool ok = true;
  int points = 0;
  while (points < 20) {
    Vector dv(8);
    for (auto& e : dv) e = d(rng);
    if (norm2(dv) > 1.0) continue;  // rejection sampling inside the unit ball
    const TbCandidate c = TbCandidate::unpack(kTarget.pack() + 0.1 * dv, 2);
    const DenseMatrix ja = jacobian(m, c, kL, JacobianMode::analytic);
    const DenseMatrix jf = jacobian(m, c, kL, JacobianMode::fd);
    double diff = 0.0;
    for (std::size_t i = 0; i < ja.data().size(); ++i)
      diff = std::max(diff, std::abs(ja.data()[i] - jf.data()[i]));
    const double rel = diff / std::max(1.0, max_abs(ja));
    worst = std::max(worst, rel);
    ok = ok && rel <= 1e-5;
    ++points;
  }
  const double cond = cond_estimate(jacobian(m, row1.solution(), kL, JacobianMode::analytic));
  report(6, ok && std::isfinite(cond) && cond < 1e8,
         "20 points, max relative Jacobian difference " + sci(worst) +
             " <= 1e-5, cond at the solution " + sci(cond) + " < 1e8");
}

void criterion7(const NewtonReport& row1) {
  const Vector& r = row1.residual_history;
  bool ok = r.size() >= 3;
  std::string detail;
  for (std::size_t k = r.size() - 3; ok && k + 1 < r.size(); ++k) {
    const double bound = 1e4 * r[k] * r[k];
    detail += (detail.empty() ? "" : ", ") + sci(r[k + 1]) + " <= " + sci(bound);
    ok = ok && r[k + 1] <= bound;
  }
  report(7, ok, "r_{k+1} <= 1e4 r_k^2 on the last three residuals: " + detail);
}

void criterion8(const TbCandidate& solution) {
  const Point p = solution.equilibrium();
  const DdeModel m = predator_prey();
  const CharacteristicAtZero c = characteristic_at_zero(m.jac_x(p), m.jac_y(p));
  const bool ok = std::abs(c.delta0) <= 1e-10 && std::abs(c.delta1) <= 1e-8 &&
                  std::abs(c.delta2) >= 1e-4;
  report(8, ok,
         "|Delta(0)| = " + sci(std::abs(c.delta0)) + " <= 1e-10, |Delta'(0)| = " +
             sci(std::abs(c.delta1)) + " <= 1e-8, |Delta''(0)| = " + sci(std::abs(c.delta2)) +
             " >= 1e-4");
}

const TbCandidate kSyntheticTarget{{0, 0}, {0.8, 0}, {-1.0 / 75.0, 1.2}, 0, 0};

NewtonReport synthetic_recovery() {
  Vector v = kSyntheticTarget.pack();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += (i % 2 ? -0.1 : 0.1);
  return newton_solve(synthetic_tb(), TbCandidate::unpack(v, 2), kL);
}

void criterion9(const NewtonReport& r) {
  const DdeModel m = synthetic_tb();
  const TbCandidate& target = kSyntheticTarget;
  const double err = norm_inf(r.solution().pack() - target.pack());
  double d0 = std::numeric_limits<double>::quiet_NaN();
  if (r.converged) {
    const TbVerdict verdict = certify(m, r.solution(), {.functionals = kL});
    d0 = verdict.d0;
  }
  const double d0_err = std::abs(d0 - 40.0 / 9.0);
  report(9, r.converged && err <= 1e-10 && d0_err <= 1e-9,
         "recovery error " + sci(err) + " <= 1e-10, |d0 - 40/9| = " + sci(d0_err) + " <= 1e-9");
}

void criterion10() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "tbpoint-acceptance";
  bool ok = true;
  std::string detail;
  for (int row = 1; row <= 4; ++row) {
    fs::remove_all(dir);
    fs::create_directories(dir);
    setenv(cli::kOutputDirEnv, dir.c_str(), 1);
    const int code = run_binary("solve --config " +
                                fixture("solve_start" + std::to_string(row) + ".json"));
    bool round_trip = false;
    try {
      std::ifstream in(dir / "solve.json");
      const nlohmann::json j = nlohmann::json::parse(in);
      const cli::RunResult back = cli::run_result_from_json(j);
      round_trip = cli::to_json(back).dump() == j.dump() && back.exit_code == code;
    } catch (const std::exception&) {
    }
    detail += "row " + std::to_string(row) + " exit " + std::to_string(code) +
              (round_trip ? " json ok; " : " json BAD; ");
    ok = ok && code == 0 && round_trip;
  }
  const int bad = run_binary("verify --config " + fixture("verify_d06.json"));
  unsetenv(cli::kOutputDirEnv);
  fs::remove_all(dir);
  detail += "D = 0.6 verify exit " + std::to_string(bad);
  report(10, ok && bad == 3, detail + " (expected 0 and 3)");
}

}  // namespace

int main() {
  std::vector<NewtonReport> reports;
  criterion1_2_3(reports);
  const NewtonReport syn = synthetic_recovery();
  criterion4(reports[0].solution(), syn.solution());
  criterion5(reports[0].solution());
  criterion6(reports[0]);
  criterion7(reports[0]);
  criterion8(reports[0].solution());
  criterion9(syn);
  criterion10();
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " failed")
            << "\n";
  return failures == 0 ? 0 : 1;
}
