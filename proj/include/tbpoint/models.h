#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "tbpoint/model.h"

namespace tbpoint {

/// Delayed predator-prey system
///   x1' = r x1 (1 - x1/K) - x1(t-tau) x2 / (a + x1(t-tau)^2)
///   x2' = x2 (m x1(t-tau) / (a + x1(t-tau)^2) - D)
/// with lambda = D and mu = K as the bifurcation parameters.
/// K and D here are only reference values; the model reads both from Point.
struct PredatorPreyParams {
  double r = 1.0;
  double K = 2.0;
  double a = 1.0;
  double mu_growth = 1.0;
  double D = 0.5;
  double tau = 1.0;
};

/// Polynomial 2-d delay system with a quadratic Takens-Bogdanov point at
/// x = 0, lambda = mu = 0 for every coefficient choice:
///   f1 = -x1/2 + 3x2/4 + y1/2 + y2/4 + lam_delay*lambda*y1 + mu_shift*mu
///   f2 = x2/2 - y2/2 + lambda + unfold*mu + mu*x2 + quad_xx*x1^2 + quad_xy*x1*y2
struct SyntheticTbParams {
  double quad_xx = 1.0;
  double quad_xy = 1.0;
  double unfold = 2.0;
  double lam_delay = 1.0;
  double mu_shift = 1.0;
  double tau = 1.0;
};

DdeModel predator_prey(const PredatorPreyParams& params = {});
DdeModel synthetic_tb(const SyntheticTbParams& params = {});

using ModelConstants = std::map<std::string, double>;

struct ModelEntry {
  std::string name;
  std::string description;
  ModelConstants defaults;
  std::function<DdeModel(const ModelConstants&)> make;
};

/// Name-keyed model table. Unknown constants passed to create() are an
/// InputError; omitted ones take the entry's defaults.
class ModelRegistry {
 public:
  void add(ModelEntry entry);
  bool contains(const std::string& name) const;
  const ModelEntry& entry(const std::string& name) const;
  DdeModel create(const std::string& name, const ModelConstants& constants = {}) const;
  std::vector<std::string> names() const;

 private:
  std::map<std::string, ModelEntry> entries_;
};

const ModelRegistry& builtin_registry();

}  // namespace tbpoint
