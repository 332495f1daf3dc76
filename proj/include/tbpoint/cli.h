#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tbpoint/defining.h"
#include "tbpoint/models.h"
#include "tbpoint/verify.h"

namespace tbpoint::cli {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kOutputDirEnv = "TBPOINT_OUTPUT_DIR";

/// The only exit codes the tool returns.
enum ExitCode : int {
  kExitOk = 0,
  kExitNotConverged = 2,
  kExitVerificationFailed = 3,
  kExitConfigError = 4,
};

/// Bad configuration, reported with the offending field (or line for syntax errors).
class ConfigError : public InputError {
 public:
  ConfigError(const std::string& field, const std::string& message)
      : InputError(field + ": " + message), field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// One axis of a scan grid over a component of the packed unknown
/// (x, phi1, phi2, lambda, mu).
struct ScanAxis {
  std::size_t component = 0;
  double min = 0.0;
  double max = 0.0;
  int count = 0;

  friend bool operator==(const ScanAxis&, const ScanAxis&) = default;
};

struct RunConfig {
  std::string model;
  ModelConstants model_constants;
  TbCandidate initial;
  Functionals functionals;  // resolved; defaults follow Functionals::from_phi1_guess
  NewtonOptions newton;
  std::optional<double> verify_tol;
  ComplexBox spectral_box;
  int spectral_grid = 12;
  double axis_margin = 1e-3;
  std::vector<ScanAxis> scan;
  int threads = 0;  // 0: hardware concurrency

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Parses and validates a config against a registry. Throws ConfigError.
RunConfig parse_config(const nlohmann::json& j, const ModelRegistry& registry = builtin_registry());
RunConfig parse_config_text(const std::string& text,
                            const ModelRegistry& registry = builtin_registry());
RunConfig load_config(const std::string& path,
                      const ModelRegistry& registry = builtin_registry());
nlohmann::json to_json(const RunConfig& c);

/// Names of the packed components: x1.., phi1_1.., phi2_1.., lambda, mu.
std::vector<std::string> component_names(std::size_t n);

struct RunResult {
  std::string command;  // solve | verify
  std::string tool_version = kToolVersion;
  std::string timestamp;
  RunConfig config;
  std::optional<NewtonReport> newton;
  std::optional<TbVerdict> verdict;
  int exit_code = kExitOk;

  friend bool operator==(const RunResult&, const RunResult&) = default;
};

/// Finite numbers are JSON numbers in shortest round-trip form; inf and nan
/// become the strings "inf", "-inf", "nan".
nlohmann::json to_json(const RunResult& r);
RunResult run_result_from_json(const nlohmann::json& j);
nlohmann::json to_json(const NewtonReport& r);
NewtonReport newton_report_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TbVerdict& v);
TbVerdict verdict_from_json(const nlohmann::json& j);

int exit_code_for(bool converged, const std::optional<TbVerdict>& verdict);

/// Newton from config.initial, then certification of a converged solution.
RunResult run_solve(const RunConfig& config, const ModelRegistry& registry = builtin_registry());
/// Certification of config.initial as given, without Newton.
RunResult run_verify(const RunConfig& config, const ModelRegistry& registry = builtin_registry());

struct ScanOutcome {
  std::vector<Vector> grid_points;     // packed initial values, grid order
  std::vector<RunResult> runs;         // same order
  std::vector<TbCandidate> distinct;   // converged solutions, 1e-6 apart
  int exit_code = kExitOk;
};

/// Cartesian product of the configured axes; other components keep their
/// initial values. Throws ConfigError on an empty or malformed grid.
std::vector<Vector> scan_grid(const RunConfig& config);
ScanOutcome run_scan(const RunConfig& config, const ModelRegistry& registry = builtin_registry());

std::string csv_header(std::size_t n);
std::string csv_row(std::size_t index, const RunResult& r);

/// Convergence table and verdict summary.
void print_report(const RunResult& r, std::ostream& out);
void list_models(const ModelRegistry& registry, bool json, std::ostream& out);

/// Entry point of the tbpoint executable.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
            const ModelRegistry& registry = builtin_registry());

/// Shortest decimal form that reads back to the same double.
std::string format_double(double v);

}  // namespace tbpoint::cli
