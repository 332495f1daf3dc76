#include <charconv>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "json_util.h"
#include "tbpoint/cli.h"

namespace tbpoint::cli {

using detail::get_num;
using detail::get_vec;
using detail::num;
using detail::vec;
using nlohmann::json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

json opt_vec(const std::optional<Vector>& v) { return v ? vec(*v) : json(nullptr); }

std::optional<Vector> get_opt_vec(const json& j, const std::string& field) {
  if (j.is_null()) return std::nullopt;
  return get_vec(j, field);
}

const json& at(const json& j, const std::string& key) { return detail::require(j, key, "result"); }

json existence_json(const TbExistence& e) {
  return {{"tol", num(e.tol)},
          {"rank", e.rank.rank},
          {"singular_values", vec(e.rank.singular_values)},
          {"rank_tol_used", num(e.rank.tol_used)},
          {"cond_i", e.cond_i},
          {"cond_ii", e.cond_ii},
          {"cond_iii", e.cond_iii},
          {"cond_ii_value", num(e.cond_ii_value)},
          {"cond_iii_value", num(e.cond_iii_value)},
          {"phi1", opt_vec(e.phi1)},
          {"psi2", opt_vec(e.psi2)},
          {"phi2", opt_vec(e.phi2)},
          {"spectral_hypothesis_checked", e.spectral_hypothesis_checked},
          {"passed", e.passed()}};
}

TbExistence existence_from(const json& j) {
  TbExistence e;
  e.tol = get_num(at(j, "tol"), "existence.tol");
  e.rank.rank = at(j, "rank").get<int>();
  e.rank.singular_values = get_vec(at(j, "singular_values"), "existence.singular_values");
  e.rank.tol_used = get_num(at(j, "rank_tol_used"), "existence.rank_tol_used");
  e.cond_i = at(j, "cond_i").get<bool>();
  e.cond_ii = at(j, "cond_ii").get<bool>();
  e.cond_iii = at(j, "cond_iii").get<bool>();
  e.cond_ii_value = get_num(at(j, "cond_ii_value"), "existence.cond_ii_value");
  e.cond_iii_value = get_num(at(j, "cond_iii_value"), "existence.cond_iii_value");
  e.phi1 = get_opt_vec(at(j, "phi1"), "existence.phi1");
  e.psi2 = get_opt_vec(at(j, "psi2"), "existence.psi2");
  e.phi2 = get_opt_vec(at(j, "phi2"), "existence.phi2");
  e.spectral_hypothesis_checked = at(j, "spectral_hypothesis_checked").get<bool>();
  return e;
}

json candidate_json(const TbCandidate& c) { return vec(c.pack()); }

TbCandidate candidate_from(const json& j, const std::string& field) {
  const Vector v = get_vec(j, field);
  if (v.size() < 5 || (v.size() - 2) % 3 != 0)
    throw ConfigError(field, "packed candidate has an invalid length");
  return TbCandidate::unpack(v, (v.size() - 2) / 3);
}

}  // namespace

json to_json(const NewtonReport& r) {
  json iterates = json::array();
  for (const auto& c : r.iterate_history) iterates.push_back(candidate_json(c));
  return {{"converged", r.converged},
          {"iterations", r.iterations},
          {"iterates", iterates},
          {"residuals", vec(r.residual_history)},
          {"steps", vec(r.step_history)},
          {"final_cond", num(r.final_cond)},
          {"failure_reason", r.failure_reason ? json(*r.failure_reason) : json(nullptr)},
          {"mode", to_string(r.mode)},
          {"stop_rule", r.stop_rule}};
}

NewtonReport newton_report_from_json(const json& j) {
  NewtonReport r;
  r.converged = at(j, "converged").get<bool>();
  r.iterations = at(j, "iterations").get<int>();
  const json& its = at(j, "iterates");
  for (std::size_t i = 0; i < its.size(); ++i)
    r.iterate_history.push_back(candidate_from(its[i], "newton.iterates"));
  r.residual_history = get_vec(at(j, "residuals"), "newton.residuals");
  r.step_history = get_vec(at(j, "steps"), "newton.steps");
  r.final_cond = get_num(at(j, "final_cond"), "newton.final_cond");
  if (!at(j, "failure_reason").is_null())
    r.failure_reason = at(j, "failure_reason").get<std::string>();
  r.mode = parse_jacobian_mode(at(j, "mode").get<std::string>());
  r.stop_rule = at(j, "stop_rule").get<std::string>();
  return r;
}

json to_json(const TbVerdict& v) {
  json basis = nullptr;
  if (v.basis)
    basis = {{"phi1", vec(v.basis->phi1)},
             {"phi2", vec(v.basis->phi2)},
             {"psi1", vec(v.basis->psi1)},
             {"psi2", vec(v.basis->psi2)}};
  json roots = json::array();
  for (const auto& z : v.near_axis_roots) roots.push_back({num(z.real()), num(z.imag())});
  return {{"tol", num(v.tol)},
          {"existence", existence_json(v.existence)},
          {"basis", basis},
          {"basis_residual", num(v.basis_residual)},
          {"quadratic_computed", v.quadratic_computed},
          {"cond_i", {{"value", num(v.cond_i_value)}, {"pass", v.cond_i_pass()}}},
          {"c_lam_mu", num(v.c_lam_mu)},
          {"nu", vec(v.nu)},
          {"psi2_nu", num(v.psi2_nu)},
          {"nu_residual", num(v.nu_residual)},
          {"d0", {{"value", num(v.d0)}, {"pass", v.d0_pass()}}},
          {"cond_iii", {{"value", num(v.cond_iii_value)}, {"pass", v.cond_iii_pass()}}},
          {"characteristic_computed", v.characteristic_computed},
          {"char_values",
           {{"delta0", num(v.characteristic.delta0)},
            {"delta1", num(v.characteristic.delta1)},
            {"delta2", num(v.characteristic.delta2)},
            {"pass", v.double_zero_pass()}}},
          {"jac_cond", num(v.jac_cond)},
          {"near_axis_roots", roots},
          {"notes", v.notes},
          {"passed", v.passed()}};
}

TbVerdict verdict_from_json(const json& j) {
  TbVerdict v;
  v.tol = get_num(at(j, "tol"), "verdict.tol");
  v.existence = existence_from(at(j, "existence"));
  if (const json& b = at(j, "basis"); !b.is_null())
    v.basis = EigenBasis{get_vec(at(b, "phi1"), "basis.phi1"), get_vec(at(b, "phi2"), "basis.phi2"),
                         get_vec(at(b, "psi1"), "basis.psi1"), get_vec(at(b, "psi2"), "basis.psi2")};
  v.basis_residual = get_num(at(j, "basis_residual"), "verdict.basis_residual");
  v.quadratic_computed = at(j, "quadratic_computed").get<bool>();
  v.cond_i_value = get_num(at(at(j, "cond_i"), "value"), "verdict.cond_i");
  v.c_lam_mu = get_num(at(j, "c_lam_mu"), "verdict.c_lam_mu");
  v.nu = get_vec(at(j, "nu"), "verdict.nu");
  v.psi2_nu = get_num(at(j, "psi2_nu"), "verdict.psi2_nu");
  v.nu_residual = get_num(at(j, "nu_residual"), "verdict.nu_residual");
  v.d0 = get_num(at(at(j, "d0"), "value"), "verdict.d0");
  v.cond_iii_value = get_num(at(at(j, "cond_iii"), "value"), "verdict.cond_iii");
  v.characteristic_computed = at(j, "characteristic_computed").get<bool>();
  const json& cv = at(j, "char_values");
  v.characteristic = {get_num(at(cv, "delta0"), "delta0"), get_num(at(cv, "delta1"), "delta1"),
                      get_num(at(cv, "delta2"), "delta2")};
  v.jac_cond = get_num(at(j, "jac_cond"), "verdict.jac_cond");
  for (const auto& z : at(j, "near_axis_roots"))
    v.near_axis_roots.emplace_back(get_num(z.at(0), "root"), get_num(z.at(1), "root"));
  v.notes = at(j, "notes").get<std::vector<std::string>>();
  return v;
}

json to_json(const RunResult& r) {
  return {{"command", r.command},
          {"tool_version", r.tool_version},
          {"timestamp", r.timestamp},
          {"exit_code", r.exit_code},
          {"config", to_json(r.config)},
          {"newton", r.newton ? to_json(*r.newton) : json(nullptr)},
          {"verdict", r.verdict ? to_json(*r.verdict) : json(nullptr)}};
}

RunResult run_result_from_json(const json& j) {
  RunResult r;
  r.command = at(j, "command").get<std::string>();
  r.tool_version = at(j, "tool_version").get<std::string>();
  r.timestamp = at(j, "timestamp").get<std::string>();
  r.exit_code = at(j, "exit_code").get<int>();
  r.config = parse_config(at(j, "config"));
  if (!at(j, "newton").is_null()) r.newton = newton_report_from_json(at(j, "newton"));
  if (!at(j, "verdict").is_null()) r.verdict = verdict_from_json(at(j, "verdict"));
  return r;
}

std::string csv_header(std::size_t n) {
  std::string h = "index,converged,iterations,final_residual,failure_reason,stop_rule";
  for (const auto& name : component_names(n)) h += "," + name;
  h += ",verified,d0,c_lam_mu,exit_code";
  return h;
}

std::string csv_row(std::size_t index, const RunResult& r) {
  const std::size_t n = r.config.initial.x.size();
  std::ostringstream row;
  row << index;
  if (r.newton) {
    row << ',' << (r.newton->converged ? 1 : 0) << ',' << r.newton->iterations << ','
        << format_double(r.newton->final_residual()) << ','
        << r.newton->failure_reason.value_or("") << ',' << r.newton->stop_rule;
    for (double v : r.newton->solution().pack()) row << ',' << format_double(v);
  } else {
    row << ",,,,,";
    for (std::size_t i = 0; i < 3 * n + 2; ++i) row << ',';
  }
  if (r.verdict)
    row << ',' << (r.verdict->passed() ? 1 : 0) << ',' << format_double(r.verdict->d0) << ','
        << format_double(r.verdict->c_lam_mu);
  else
    row << ",,,";
  row << ',' << r.exit_code;
  return row.str();
}

namespace {

std::string join(const Vector& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_double(v[i]);
  return s + ")";
}

const char* mark(bool ok) { return ok ? "pass" : "FAIL"; }

}  // namespace

void print_report(const RunResult& r, std::ostream& out) {
  out << "tbpoint " << r.tool_version << "  " << r.command << "  model " << r.config.model << "\n";
  if (r.newton) {
    const auto& nr = *r.newton;
    out << "jacobian: " << to_string(nr.mode) << "\n";
    out << std::setw(5) << "iter" << std::setw(16) << "||H||_inf" << std::setw(16) << "step"
        << "\n";
    for (std::size_t k = 0; k < nr.residual_history.size(); ++k) {
      out << std::setw(5) << k << std::setw(16) << std::setprecision(6) << std::scientific
          << nr.residual_history[k];
      if (k > 0) out << std::setw(16) << nr.step_history[k - 1];
      out << std::defaultfloat << "\n";
    }
    if (nr.converged) {
      out << "converged in " << nr.iterations << " iterations (" << nr.stop_rule
          << " rule), cond(H_v) = " << format_double(nr.final_cond) << "\n";
      out << "solution v = " << join(nr.solution().pack()) << "\n";
    } else {
      out << "not converged: " << nr.failure_reason.value_or("unknown") << " after "
          << nr.iterations << " iterations\n";
    }
  }
  if (r.verdict) {
    const auto& v = *r.verdict;
    const auto& e = v.existence;
    out << "verification (tol " << format_double(v.tol) << ")\n";
    out << "  existence (i) rank n-1: " << mark(e.cond_i) << "  (ii): " << mark(e.cond_ii)
        << "  (iii): " << mark(e.cond_iii) << "\n";
    out << "  psi2 f_lambda = " << format_double(v.cond_i_value) << "  " << mark(v.cond_i_pass())
        << "\n";
    out << "  c_lam_mu = " << format_double(v.c_lam_mu) << "  nu = " << join(v.nu)
        << "  psi2 nu = " << format_double(v.psi2_nu) << "\n";
    out << "  d0 = " << format_double(v.d0) << "  " << mark(v.d0_pass()) << "\n";
    out << "  condition (iii) value = " << format_double(v.cond_iii_value) << "  "
        << mark(v.cond_iii_pass()) << "\n";
    out << "  Delta(0) = " << format_double(v.characteristic.delta0)
        << "  Delta'(0) = " << format_double(v.characteristic.delta1)
        << "  Delta''(0) = " << format_double(v.characteristic.delta2) << "  "
        << mark(v.double_zero_pass()) << "\n";
    if (v.jac_cond != 0.0) out << "  cond(H_v) = " << format_double(v.jac_cond) << "\n";
    for (const auto& note : v.notes) out << "  note: " << note << "\n";
    out << (v.passed() ? "quadratic T-B point: verified\n" : "quadratic T-B point: NOT verified\n");
  }
  out << "exit code " << r.exit_code << "\n";
}

void list_models(const ModelRegistry& registry, bool as_json, std::ostream& out) {
  if (as_json) {
    json a = json::array();
    for (const auto& name : registry.names()) {
      const auto& e = registry.entry(name);
      json constants = json::object();
      for (const auto& [k, v] : e.defaults) constants[k] = num(v);
      a.push_back({{"name", name}, {"description", e.description}, {"constants", constants}});
    }
    out << a.dump(2) << "\n";
    return;
  }
  for (const auto& name : registry.names()) {
    const auto& e = registry.entry(name);
    out << name << "  " << e.description << "\n";
  }
}

}  // namespace tbpoint::cli
