#pragma once

// Number and vector helpers shared by the config and report serializers.

#include <cmath>
#include <limits>
#include <string>

#include <json.hpp>

#include "tbpoint/cli.h"

namespace tbpoint::cli::detail {

using nlohmann::json;

inline json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

inline double get_num(const json& j, const std::string& field) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw ConfigError(field, "expected a number");
}

inline json vec(const Vector& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

inline Vector get_vec(const json& j, const std::string& field) {
  if (!j.is_array()) throw ConfigError(field, "expected an array of numbers");
  Vector v;
  v.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    v.push_back(get_num(j[i], field + "[" + std::to_string(i) + "]"));
  return v;
}

inline const json& require(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_object() || !j.contains(key))
    throw ConfigError(where.empty() ? key : where + "." + key, "missing field");
  return j.at(key);
}

}  // namespace tbpoint::cli::detail
