#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "json_util.h"
#include "tbpoint/cli.h"

namespace tbpoint::cli {

using detail::get_num;
using detail::get_vec;
using detail::num;
using detail::vec;
using nlohmann::json;

std::vector<std::string> component_names(std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t i = 1; i <= n; ++i) names.push_back("x" + std::to_string(i));
  for (std::size_t i = 1; i <= n; ++i) names.push_back("phi1_" + std::to_string(i));
  for (std::size_t i = 1; i <= n; ++i) names.push_back("phi2_" + std::to_string(i));
  names.push_back("lambda");
  names.push_back("mu");
  return names;
}

namespace {

const std::set<std::string> kKnownKeys = {
    "model",     "model_constants", "initial",       "l1",          "l2",
    "tol_res",   "tol_step",        "max_iter",      "jacobian",    "damping",
    "scaling",   "divergence_threshold",             "verify_tol",  "spectral_box",
    "spectral_grid", "axis_margin", "scan",          "threads"};

double positive(const json& j, const std::string& field) {
  const double v = get_num(j, field);
  if (!(v > 0.0)) throw ConfigError(field, "must be positive");
  return v;
}

int integer(const json& j, const std::string& field, int lo) {
  if (!j.is_number_integer()) throw ConfigError(field, "expected an integer");
  const auto v = j.get<long long>();
  if (v < lo || v > 1'000'000'000) throw ConfigError(field, "out of range");
  return static_cast<int>(v);
}

Vector sized(const json& j, const std::string& field, std::size_t n) {
  Vector v = get_vec(j, field);
  if (v.size() != n)
    throw ConfigError(field, "expected " + std::to_string(n) + " entries, got " +
                                 std::to_string(v.size()));
  for (double x : v)
    if (!std::isfinite(x)) throw ConfigError(field, "entries must be finite");
  return v;
}

double finite(const json& j, const std::string& field) {
  const double v = get_num(j, field);
  if (!std::isfinite(v)) throw ConfigError(field, "must be finite");
  return v;
}

// Index into the packed unknown for a component given by index or name; the
// model's parameter names are accepted as aliases of lambda and mu.
std::size_t component_index(const json& j, std::size_t n, const DdeModel& model,
                            const std::string& field) {
  const std::size_t len = 3 * n + 2;
  if (j.is_number_integer()) {
    const auto k = j.get<long long>();
    if (k < 0 || static_cast<std::size_t>(k) >= len)
      throw ConfigError(field, "component index out of range");
    return static_cast<std::size_t>(k);
  }
  if (!j.is_string()) throw ConfigError(field, "expected a component index or name");
  const auto s = j.get<std::string>();
  const auto names = component_names(n);
  const auto it = std::find(names.begin(), names.end(), s);
  if (it != names.end()) return static_cast<std::size_t>(it - names.begin());
  if (s == model.parameter_names().first) return 3 * n;
  if (s == model.parameter_names().second) return 3 * n + 1;
  throw ConfigError(field, "unknown component '" + s + "'");
}

TbCandidate parse_initial(const json& j, std::size_t n, const DdeModel& model) {
  if (j.is_array()) {
    const Vector v = sized(j, "initial", 3 * n + 2);
    return TbCandidate::unpack(v, n);
  }
  if (!j.is_object()) throw ConfigError("initial", "expected an array or an object");
  const auto& [lam_name, mu_name] = model.parameter_names();
  for (const auto& [key, _] : j.items())
    if (key != "x" && key != "phi1" && key != "phi2" && key != "lambda" && key != "mu" &&
        key != lam_name && key != mu_name)
      throw ConfigError("initial." + key, "unknown field");
  auto param = [&](const std::string& canonical, const std::string& alias) {
    const bool a = j.contains(canonical);
    const bool b = alias != canonical && j.contains(alias);
    if (a && b) throw ConfigError("initial." + alias, "given twice (also as " + canonical + ")");
    if (!a && !b) throw ConfigError("initial." + canonical, "missing field");
    return finite(j.at(a ? canonical : alias), "initial." + (a ? canonical : alias));
  };
  TbCandidate c;
  c.x = sized(detail::require(j, "x", "initial"), "initial.x", n);
  c.phi1 = sized(detail::require(j, "phi1", "initial"), "initial.phi1", n);
  c.phi2 = sized(detail::require(j, "phi2", "initial"), "initial.phi2", n);
  c.lambda = param("lambda", lam_name);
  c.mu = param("mu", mu_name);
  return c;
}

}  // namespace

RunConfig parse_config(const json& j, const ModelRegistry& registry) {
  if (!j.is_object()) throw ConfigError("<root>", "config must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (!kKnownKeys.count(key)) throw ConfigError(key, "unknown field");

  RunConfig c;
  const json& m = detail::require(j, "model", "");
  if (!m.is_string()) throw ConfigError("model", "expected a string");
  c.model = m.get<std::string>();
  if (!registry.contains(c.model)) throw ConfigError("model", "unknown model '" + c.model + "'");

  if (j.contains("model_constants")) {
    const json& mc = j.at("model_constants");
    if (!mc.is_object()) throw ConfigError("model_constants", "expected an object");
    for (const auto& [key, value] : mc.items())
      c.model_constants[key] = finite(value, "model_constants." + key);
  }
  std::optional<DdeModel> model;
  try {
    model.emplace(registry.create(c.model, c.model_constants));
  } catch (const InputError& e) {
    throw ConfigError("model_constants", e.what());
  }
  const std::size_t n = model->dimension();

  c.initial = parse_initial(detail::require(j, "initial", ""), n, *model);

  if (j.contains("l1") != j.contains("l2"))
    throw ConfigError(j.contains("l1") ? "l2" : "l1", "l1 and l2 must be given together");
  if (j.contains("l1")) {
    try {
      c.functionals = Functionals(sized(j.at("l1"), "l1", n), sized(j.at("l2"), "l2", n));
    } catch (const ConfigError&) {
      throw;
    } catch (const InputError& e) {
      throw ConfigError("l1", e.what());
    }
  } else {
    c.functionals = Functionals::from_phi1_guess(c.initial.phi1);
  }

  if (j.contains("tol_res")) c.newton.tol_res = positive(j.at("tol_res"), "tol_res");
  if (j.contains("tol_step")) c.newton.tol_step = positive(j.at("tol_step"), "tol_step");
  if (j.contains("max_iter")) c.newton.max_iter = integer(j.at("max_iter"), "max_iter", 0);
  if (j.contains("jacobian")) {
    if (!j.at("jacobian").is_string()) throw ConfigError("jacobian", "expected a string");
    try {
      c.newton.mode = parse_jacobian_mode(j.at("jacobian").get<std::string>());
    } catch (const InputError& e) {
      throw ConfigError("jacobian", e.what());
    }
    if (*c.newton.mode == JacobianMode::analytic &&
        !model->missing_for_analytic_jacobian().empty())
      throw ConfigError("jacobian", "model lacks analytic derivatives for this mode");
  }
  if (j.contains("damping")) {
    c.newton.damping = positive(j.at("damping"), "damping");
    if (c.newton.damping > 1.0) throw ConfigError("damping", "must lie in (0, 1]");
  }
  if (j.contains("scaling")) {
    if (!j.at("scaling").is_boolean()) throw ConfigError("scaling", "expected true or false");
    c.newton.scaling = j.at("scaling").get<bool>();
  }
  if (j.contains("divergence_threshold"))
    c.newton.divergence_threshold =
        positive(j.at("divergence_threshold"), "divergence_threshold");
  if (j.contains("verify_tol")) c.verify_tol = positive(j.at("verify_tol"), "verify_tol");
  if (j.contains("spectral_box")) {
    const Vector b = sized(j.at("spectral_box"), "spectral_box", 4);
    c.spectral_box = {b[0], b[1], b[2], b[3]};
    if (!(b[0] <= 0.0 && 0.0 <= b[1] && b[2] <= 0.0 && 0.0 <= b[3]))
      throw ConfigError("spectral_box", "box [re_min, re_max, im_min, im_max] must contain 0");
  }
  if (j.contains("spectral_grid"))
    c.spectral_grid = integer(j.at("spectral_grid"), "spectral_grid", 1);
  if (j.contains("axis_margin")) c.axis_margin = positive(j.at("axis_margin"), "axis_margin");
  if (j.contains("threads")) c.threads = integer(j.at("threads"), "threads", 0);

  if (j.contains("scan")) {
    const json& s = j.at("scan");
    if (!s.is_array()) throw ConfigError("scan", "expected an array of axes");
    for (std::size_t i = 0; i < s.size(); ++i) {
      const std::string where = "scan[" + std::to_string(i) + "]";
      const json& a = s[i];
      if (!a.is_object()) throw ConfigError(where, "expected an object");
      for (const auto& [key, _] : a.items())
        if (key != "component" && key != "min" && key != "max" && key != "count")
          throw ConfigError(where + "." + key, "unknown field");
      ScanAxis axis;
      axis.component =
          component_index(detail::require(a, "component", where), n, *model, where + ".component");
      axis.min = finite(detail::require(a, "min", where), where + ".min");
      axis.max = finite(detail::require(a, "max", where), where + ".max");
      axis.count = integer(detail::require(a, "count", where), where + ".count", 0);
      if (axis.min > axis.max) throw ConfigError(where, "min exceeds max");
      c.scan.push_back(axis);
    }
  }
  return c;
}

namespace {

std::string locate(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const ModelRegistry& registry) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(locate(text, e.byte), "JSON syntax error");
  }
  return parse_config(j, registry);
}

RunConfig load_config(const std::string& path, const ModelRegistry& registry) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), registry);
}

json to_json(const RunConfig& c) {
  json j;
  j["model"] = c.model;
  j["model_constants"] = json::object();
  for (const auto& [k, v] : c.model_constants) j["model_constants"][k] = num(v);
  j["initial"] = vec(c.initial.pack());
  j["l1"] = vec(c.functionals.l1);
  j["l2"] = vec(c.functionals.l2);
  j["tol_res"] = num(c.newton.tol_res);
  j["tol_step"] = num(c.newton.tol_step);
  j["max_iter"] = c.newton.max_iter;
  if (c.newton.mode) j["jacobian"] = to_string(*c.newton.mode);
  j["damping"] = num(c.newton.damping);
  j["scaling"] = c.newton.scaling;
  j["divergence_threshold"] = num(c.newton.divergence_threshold);
  if (c.verify_tol) j["verify_tol"] = num(*c.verify_tol);
  j["spectral_box"] = vec({c.spectral_box.re_min, c.spectral_box.re_max,
                           c.spectral_box.im_min, c.spectral_box.im_max});
  j["spectral_grid"] = c.spectral_grid;
  j["axis_margin"] = num(c.axis_margin);
  if (!c.scan.empty()) {
    j["scan"] = json::array();
    for (const auto& a : c.scan)
      j["scan"].push_back({{"component", a.component},
                           {"min", num(a.min)},
                           {"max", num(a.max)},
                           {"count", a.count}});
  }
  j["threads"] = c.threads;
  return j;
}

std::vector<Vector> scan_grid(const RunConfig& config) {
  if (config.scan.empty()) throw ConfigError("scan", "no grid axes given");
  const Vector base = config.initial.pack();
  for (std::size_t i = 0; i < config.scan.size(); ++i) {
    const auto& a = config.scan[i];
    const std::string where = "scan[" + std::to_string(i) + "]";
    if (a.component >= base.size()) throw ConfigError(where, "component index out of range");
    if (a.count < 1) throw ConfigError(where + ".count", "grid is empty");
    if (a.min > a.max) throw ConfigError(where, "min exceeds max");
    if (a.count == 1 && a.min != a.max)
      throw ConfigError(where, "a single-point axis needs min == max");
  }
  std::vector<Vector> points{base};
  for (const auto& a : config.scan) {
    std::vector<Vector> next;
    next.reserve(points.size() * static_cast<std::size_t>(a.count));
    for (const auto& p : points) {
      for (int k = 0; k < a.count; ++k) {
        Vector q = p;
        q[a.component] = a.count == 1 ? a.min : a.min + (a.max - a.min) * k / (a.count - 1);
        next.push_back(std::move(q));
      }
    }
    points = std::move(next);
  }
  return points;
}

}  // namespace tbpoint::cli
