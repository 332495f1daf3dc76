#include "tbpoint/models.h"

#include <cmath>

namespace tbpoint {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw InputError(std::string("model constant '") + name + "' must be positive");
}

}  // namespace

DdeModel predator_prey(const PredatorPreyParams& params) {
  require_positive(params.r, "r");
  require_positive(params.K, "K");
  require_positive(params.a, "a");
  require_positive(params.mu_growth, "mu_growth");
  require_positive(params.D, "D");
  require_positive(params.tau, "tau");
  const double r = params.r, a = params.a, m = params.mu_growth;

  // g(y) = y / (a + y^2) and its first two derivatives
  auto g = [a](double y) { return y / (a + y * y); };
  auto g1 = [a](double y) {
    const double q = a + y * y;
    return (a - y * y) / (q * q);
  };
  auto g2 = [a](double y) {
    const double q = a + y * y;
    return (2.0 * y * y * y - 6.0 * a * y) / (q * q * q);
  };

  auto f = [=](const Point& p) {
    const double x1 = p.x[0], x2 = p.x[1], y1 = p.y[0];
    const double K = p.mu, D = p.lambda;
    return Vector{r * x1 * (1.0 - x1 / K) - x2 * g(y1), x2 * (m * g(y1) - D)};
  };

  DerivativeSuppliers d;
  d.jac_x = [=](const Point& p) {
    const double x1 = p.x[0], y1 = p.y[0], K = p.mu, D = p.lambda;
    return DenseMatrix{{r * (1.0 - 2.0 * x1 / K), -g(y1)}, {0.0, m * g(y1) - D}};
  };
  d.jac_y = [=](const Point& p) {
    const double x2 = p.x[1], y1 = p.y[0];
    return DenseMatrix{{-x2 * g1(y1), 0.0}, {m * x2 * g1(y1), 0.0}};
  };
  d.d_lambda = [](const Point& p) { return Vector{0.0, -p.x[1]}; };
  d.d_mu = [r](const Point& p) {
    const double x1 = p.x[0], K = p.mu;
    return Vector{r * x1 * x1 / (K * K), 0.0};
  };

  using Span = std::span<const double>;
  d.second[0][0] = [r](const Point& p, Span u, Span w) {
    return Vector{-2.0 * r / p.mu * u[0] * w[0], 0.0};
  };
  d.second[0][1] = [=](const Point& p, Span u, Span w) {
    const double s = g1(p.y[0]) * u[1] * w[0];
    return Vector{-s, m * s};
  };
  d.second[1][0] = [=](const Point& p, Span u, Span w) {
    const double s = g1(p.y[0]) * u[0] * w[1];
    return Vector{-s, m * s};
  };
  d.second[1][1] = [=](const Point& p, Span u, Span w) {
    const double s = p.x[1] * g2(p.y[0]) * u[0] * w[0];
    return Vector{-s, m * s};
  };

  d.mixed[0][0] = [](const Point&) { return DenseMatrix{{0.0, 0.0}, {0.0, -1.0}}; };
  d.mixed[0][1] = [r](const Point& p) {
    const double K = p.mu;
    return DenseMatrix{{2.0 * r * p.x[0] / (K * K), 0.0}, {0.0, 0.0}};
  };
  d.mixed[1][0] = [](const Point&) { return DenseMatrix(2, 2); };
  d.mixed[1][1] = [](const Point&) { return DenseMatrix(2, 2); };

  return DdeModel("predator-prey", 2, params.tau, f, std::move(d), {"D", "K"});
}

DdeModel synthetic_tb(const SyntheticTbParams& params) {
  require_positive(params.tau, "tau");
  const double qxx = params.quad_xx, qxy = params.quad_xy, unfold = params.unfold;
  const double ld = params.lam_delay, ms = params.mu_shift;

  auto f = [=](const Point& p) {
    const double x1 = p.x[0], x2 = p.x[1], y1 = p.y[0], y2 = p.y[1];
    const double lam = p.lambda, mu = p.mu;
    return Vector{
        -0.5 * x1 + 0.75 * x2 + 0.5 * y1 + 0.25 * y2 + ld * lam * y1 + ms * mu,
        0.5 * x2 - 0.5 * y2 + lam + unfold * mu + mu * x2 + qxx * x1 * x1 + qxy * x1 * y2};
  };

  DerivativeSuppliers d;
  d.jac_x = [=](const Point& p) {
    return DenseMatrix{{-0.5, 0.75}, {2.0 * qxx * p.x[0] + qxy * p.y[1], 0.5 + p.mu}};
  };
  d.jac_y = [=](const Point& p) {
    return DenseMatrix{{0.5 + ld * p.lambda, 0.25}, {0.0, -0.5 + qxy * p.x[0]}};
  };
  d.d_lambda = [ld](const Point& p) { return Vector{ld * p.y[0], 1.0}; };
  d.d_mu = [=](const Point& p) { return Vector{ms, unfold + p.x[1]}; };

  using Span = std::span<const double>;
  d.second[0][0] = [qxx](const Point&, Span u, Span w) {
    return Vector{0.0, 2.0 * qxx * u[0] * w[0]};
  };
  d.second[0][1] = [qxy](const Point&, Span u, Span w) {
    return Vector{0.0, qxy * u[0] * w[1]};
  };
  d.second[1][0] = [qxy](const Point&, Span u, Span w) {
    return Vector{0.0, qxy * u[1] * w[0]};
  };
  d.second[1][1] = [](const Point&, Span, Span) { return Vector{0.0, 0.0}; };

  d.mixed[0][0] = [](const Point&) { return DenseMatrix(2, 2); };
  d.mixed[0][1] = [](const Point&) { return DenseMatrix{{0.0, 0.0}, {0.0, 1.0}}; };
  d.mixed[1][0] = [ld](const Point&) { return DenseMatrix{{ld, 0.0}, {0.0, 0.0}}; };
  d.mixed[1][1] = [](const Point&) { return DenseMatrix(2, 2); };

  return DdeModel("synthetic-tb", 2, params.tau, f, std::move(d), {"lambda", "mu"});
}

void ModelRegistry::add(ModelEntry entry) {
  const std::string key = entry.name;
  entries_.insert_or_assign(key, std::move(entry));
}

bool ModelRegistry::contains(const std::string& name) const {
  return entries_.count(name) != 0;
}

const ModelEntry& ModelRegistry::entry(const std::string& name) const {
  const auto it = entries_.find(name);
  if (it == entries_.end()) throw InputError("unknown model '" + name + "'");
  return it->second;
}

DdeModel ModelRegistry::create(const std::string& name, const ModelConstants& constants) const {
  const ModelEntry& e = entry(name);
  ModelConstants merged = e.defaults;
  for (const auto& [key, value] : constants) {
    if (!merged.count(key))
      throw InputError("model '" + name + "' has no constant '" + key + "'");
    merged[key] = value;
  }
  return e.make(merged);
}

std::vector<std::string> ModelRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [key, _] : entries_) out.push_back(key);
  return out;
}

const ModelRegistry& builtin_registry() {
  static const ModelRegistry registry = [] {
    ModelRegistry r;
    const PredatorPreyParams pp;
    r.add({"predator-prey",
           "delayed predator-prey system; lambda = D, mu = K",
           {{"r", pp.r}, {"a", pp.a}, {"mu_growth", pp.mu_growth}, {"tau", pp.tau}},
           [](const ModelConstants& c) {
             PredatorPreyParams p;
             p.r = c.at("r");
             p.a = c.at("a");
             p.mu_growth = c.at("mu_growth");
             p.tau = c.at("tau");
             return predator_prey(p);
           }});
    const SyntheticTbParams st;
    r.add({"synthetic-tb",
           "polynomial system with a quadratic T-B point at the origin",
           {{"quad_xx", st.quad_xx},
            {"quad_xy", st.quad_xy},
            {"unfold", st.unfold},
            {"lam_delay", st.lam_delay},
            {"mu_shift", st.mu_shift},
            {"tau", st.tau}},
           [](const ModelConstants& c) {
             SyntheticTbParams p;
             p.quad_xx = c.at("quad_xx");
             p.quad_xy = c.at("quad_xy");
             p.unfold = c.at("unfold");
             p.lam_delay = c.at("lam_delay");
             p.mu_shift = c.at("mu_shift");
             p.tau = c.at("tau");
             return synthetic_tb(p);
           }});
    return r;
  }();
  return registry;
}

}  // namespace tbpoint
