#include <atomic>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include <CLI11.hpp>

#include "json_util.h"
#include "tbpoint/cli.h"

namespace tbpoint::cli {

using nlohmann::json;

namespace {

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

CertifyOptions certify_options(const RunConfig& c) {
  CertifyOptions o;
  o.tol = c.verify_tol;
  o.functionals = c.functionals;
  o.mode = c.newton.mode;
  o.scan_box = c.spectral_box;
  o.scan_grid = c.spectral_grid;
  o.axis_margin = c.axis_margin;
  return o;
}

}  // namespace

int exit_code_for(bool converged, const std::optional<TbVerdict>& verdict) {
  if (!converged) return kExitNotConverged;
  if (!verdict || !verdict->passed()) return kExitVerificationFailed;
  return kExitOk;
}

RunResult run_solve(const RunConfig& config, const ModelRegistry& registry) {
  const DdeModel model = registry.create(config.model, config.model_constants);
  RunResult r;
  r.command = "solve";
  r.timestamp = utc_timestamp();
  r.config = config;
  r.newton = newton_solve(model, config.initial, config.functionals, config.newton);
  if (r.newton->converged)
    r.verdict = certify(model, r.newton->solution(), certify_options(config));
  r.exit_code = exit_code_for(r.newton->converged, r.verdict);
  return r;
}

RunResult run_verify(const RunConfig& config, const ModelRegistry& registry) {
  const DdeModel model = registry.create(config.model, config.model_constants);
  RunResult r;
  r.command = "verify";
  r.timestamp = utc_timestamp();
  r.config = config;
  r.verdict = certify(model, config.initial, certify_options(config));
  r.exit_code = exit_code_for(true, r.verdict);
  return r;
}

ScanOutcome run_scan(const RunConfig& config, const ModelRegistry& registry) {
  ScanOutcome out;
  out.grid_points = scan_grid(config);
  const std::size_t total = out.grid_points.size();
  const std::size_t n = config.initial.x.size();
  out.runs.resize(total);

  std::size_t workers = config.threads > 0 ? static_cast<std::size_t>(config.threads)
                                           : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, total);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      try {
        RunConfig c = config;
        c.initial = TbCandidate::unpack(out.grid_points[i], n);
        out.runs[i] = run_solve(c, registry);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  bool any_converged = false, any_verified = false;
  for (const auto& r : out.runs) {
    if (!r.newton || !r.newton->converged) continue;
    any_converged = true;
    if (r.verdict && r.verdict->passed()) any_verified = true;
    const Vector v = r.newton->solution().pack();
    const bool seen = std::any_of(out.distinct.begin(), out.distinct.end(),
                                  [&](const TbCandidate& d) {
                                    return norm_inf(d.pack() - v) <= 1e-6;
                                  });
    if (!seen) out.distinct.push_back(r.newton->solution());
  }
  out.exit_code = any_verified    ? kExitOk
                  : any_converged ? kExitVerificationFailed
                                  : kExitNotConverged;
  return out;
}

namespace {

struct Overrides {
  std::optional<int> max_iter;
  std::optional<double> tol;
  std::optional<std::string> jacobian;
};

void apply(const Overrides& o, const std::string& command, const ModelRegistry& registry,
           RunConfig& c) {
  if (o.max_iter) {
    if (*o.max_iter < 0) throw ConfigError("--max-iter", "must be non-negative");
    c.newton.max_iter = *o.max_iter;
  }
  if (o.tol) {
    if (!(*o.tol > 0.0) || !std::isfinite(*o.tol)) throw ConfigError("--tol", "must be positive");
    if (command == "verify")
      c.verify_tol = *o.tol;
    else
      c.newton.tol_res = *o.tol;
  }
  if (o.jacobian) {
    try {
      c.newton.mode = parse_jacobian_mode(*o.jacobian);
    } catch (const InputError& e) {
      throw ConfigError("--jacobian", e.what());
    }
    if (*c.newton.mode == JacobianMode::analytic &&
        !registry.create(c.model, c.model_constants).missing_for_analytic_jacobian().empty())
      throw ConfigError("--jacobian", "model lacks analytic derivatives for this mode");
  }
}

std::optional<std::filesystem::path> output_dir() {
  const char* dir = std::getenv(kOutputDirEnv);
  if (!dir || !*dir) return std::nullopt;
  std::filesystem::path p(dir);
  std::filesystem::create_directories(p);
  return p;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw ConfigError("output", "cannot write '" + path.string() + "'");
  f << text;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
            const ModelRegistry& registry) {
  CLI::App app{"Takens-Bogdanov points of delay differential equations", "tbpoint"};
  app.require_subcommand(1);

  std::string config_path, csv_path;
  bool as_json = false;
  Overrides ov;

  auto add_run_options = [&](CLI::App* sub, bool with_newton) {
    sub->add_option("--config", config_path, "run config (JSON)")->required();
    sub->add_flag("--json", as_json, "print the result as JSON");
    sub->add_option("--tol", ov.tol,
                    with_newton ? "Newton residual tolerance" : "verification tolerance");
    sub->add_option("--jacobian", ov.jacobian, "analytic or fd");
    if (with_newton) {
      sub->add_option("--max-iter", ov.max_iter, "Newton iteration limit");
      sub->add_option("--csv", csv_path, "write result rows as CSV");
    }
  };
  CLI::App* solve = app.add_subcommand("solve", "Newton solve from the configured initial value");
  add_run_options(solve, true);
  CLI::App* scan = app.add_subcommand("scan", "solve from every point of a grid of initial values");
  add_run_options(scan, true);
  CLI::App* verify = app.add_subcommand("verify", "certify the configured point without Newton");
  add_run_options(verify, false);
  CLI::App* list = app.add_subcommand("list-models", "list the registered models");
  list->add_flag("--json", as_json, "print a JSON array");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }

  try {
    if (list->parsed()) {
      list_models(registry, as_json, out);
      return kExitOk;
    }
    const std::string command = solve->parsed() ? "solve" : scan->parsed() ? "scan" : "verify";
    RunConfig config = load_config(config_path, registry);
    apply(ov, command, registry, config);
    const auto dir = output_dir();

    if (command == "scan") {
      const ScanOutcome s = run_scan(config, registry);
      std::string csv = csv_header(config.initial.x.size()) + "\n";
      for (std::size_t i = 0; i < s.runs.size(); ++i) csv += csv_row(i, s.runs[i]) + "\n";
      std::optional<std::filesystem::path> target;
      if (!csv_path.empty())
        target = csv_path;
      else if (dir)
        target = *dir / "scan.csv";
      if (target) write_file(*target, csv);

      if (as_json) {
        json j;
        j["runs"] = json::array();
        for (const auto& r : s.runs) j["runs"].push_back(to_json(r));
        j["distinct"] = json::array();
        for (const auto& d : s.distinct) j["distinct"].push_back(detail::vec(d.pack()));
        j["exit_code"] = s.exit_code;
        out << j.dump(2) << "\n";
      } else {
        if (!target) out << csv;
        std::size_t converged = 0;
        for (const auto& r : s.runs) converged += r.newton && r.newton->converged;
        out << "runs " << s.runs.size() << ", converged " << converged << ", distinct "
            << s.distinct.size() << "\n";
        for (const auto& d : s.distinct) {
          out << "  v =";
          for (double x : d.pack()) out << ' ' << format_double(x);
          out << "\n";
        }
        out << "exit code " << s.exit_code << "\n";
      }
      return s.exit_code;
    }

    const RunResult r = command == "solve" ? run_solve(config, registry)
                                           : run_verify(config, registry);
    const std::string dumped = to_json(r).dump(2) + "\n";
    if (dir) write_file(*dir / (command + ".json"), dumped);
    if (!csv_path.empty())
      write_file(csv_path, csv_header(config.initial.x.size()) + "\n" + csv_row(0, r) + "\n");
    if (as_json)
      out << dumped;
    else
      print_report(r, out);
    return r.exit_code;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
}

}  // namespace tbpoint::cli
