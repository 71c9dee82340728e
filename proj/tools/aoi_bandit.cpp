#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "aoi/baselines.hpp"
#include "aoi/errors.hpp"
#include "aoi/experiments.hpp"
#include "aoi/relaxed_solver.hpp"
#include "aoi/selftest.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

std::uint64_t env_seed() {
  const char* raw = std::getenv("AOI_BANDIT_SEED");
  if (raw == nullptr || *raw == '\0') return 1;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(raw, &end, 10);
  if (*end != '\0') throw aoi::ConfigError(std::string("AOI_BANDIT_SEED is not an integer: ") + raw);
  return v;
}

aoi::ScenarioConfig load(const std::string& path, const std::optional<std::uint64_t>& seed) {
  aoi::ScenarioConfig c = aoi::load_config(path, env_seed());
  if (seed) c.seed = *seed;
  return c;
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            const std::optional<std::uint64_t>& seed, const std::optional<std::uint64_t>& horizon,
            int jobs) {
  aoi::ScenarioConfig c = load(config_path, seed);
  if (horizon) {
    c.horizon = *horizon;
    c.validate();
  }
  const auto rows = aoi::run_scenario(c, jobs);
  std::filesystem::create_directories(out_dir);
  const auto path = std::filesystem::path(out_dir) /
                    (std::filesystem::path(config_path).stem().string() + ".csv");
  aoi::emit_figure_data(rows, path);

  int failed = 0;
  for (const auto& r : rows) {
    if (r.failed_trials == 0) continue;
    ++failed;
    std::fprintf(stderr, "x=%g: %d of %d trials failed: %s\n", r.x, r.failed_trials, c.trials,
                 r.error.c_str());
  }
  std::printf("wrote %zu rows to %s\n", rows.size(), path.string().c_str());
  return failed ? kExitNumerical : 0;
}

int cmd_lb(const std::vector<double>& ps, std::optional<int> n) {
  std::vector<aoi::ChainParams> sensors;
  if (ps.size() == 1) {
    const int count = n.value_or(1);
    if (count < 1) throw aoi::ConfigError("--n must be >= 1");
    sensors.assign(static_cast<std::size_t>(count), aoi::ChainParams(ps[0], 2));
  } else {
    if (n && *n != static_cast<int>(ps.size())) {
      throw aoi::ConfigError("--n does not match the number of --p values");
    }
    for (double p : ps) sensors.emplace_back(p, 2);
  }
  const auto lb = aoi::lower_bound(sensors);
  if (lb.l_star) {
    std::printf("L*=%d omega*=%.9g l_b=%.9g\n", *lb.l_star, lb.omega_star, lb.l_b);
  } else {
    std::printf("L*=inf l_b=%.9g\n", lb.l_b);
  }
  return 0;
}

int cmd_solve_eta(const std::string& config_path, const std::optional<std::uint64_t>& seed,
                  int trial) {
  const aoi::ScenarioConfig c = load(config_path, seed);
  if (trial < 0 || trial >= c.trials) throw aoi::ConfigError("--trial out of range");
  std::printf("x,eta_star,d_hat,j_value,active\n");
  for (double x : c.sweep) {
    const auto sensors = aoi::trial_sensors(c, x, trial);
    const auto sol = aoi::solve_eta(sensors);
    std::string active;
    for (std::size_t n : sol.active) {
      if (!active.empty()) active += ' ';
      active += std::to_string(n);
    }
    std::printf("%.9g,%.9g,%.9g,%.9g,%s\n", x, sol.eta_star, sol.d_hat, sol.j_value,
                active.c_str());
    if (!sol.monotone) std::fprintf(stderr, "x=%g: d_hat not monotone in eta\n", x);
  }
  return 0;
}

int cmd_selftest() {
  int failed = 0;
  for (const auto& check : aoi::run_selftest()) {
    std::printf("%s  %s (%s)\n", check.passed ? "PASS" : "FAIL", check.name.c_str(),
                check.detail.c_str());
    if (!check.passed) ++failed;
  }
  return failed ? kExitNumerical : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scheduling under partially observable age of information"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed, horizon;
  int jobs = 0;
  auto* run = app.add_subcommand("run", "run a scenario and write its CSV");
  run->add_option("--config", config_path, "scenario JSON")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "output directory")->required();
  run->add_option("--seed", seed, "master seed (overrides config and AOI_BANDIT_SEED)");
  run->add_option("--horizon", horizon, "simulated slots per policy");
  run->add_option("--jobs", jobs, "worker threads, 0 = OpenMP default")->check(CLI::NonNegativeNumber);

  std::vector<double> ps;
  std::optional<int> n;
  auto* lb = app.add_subcommand("lb", "proactive-policy lower bound");
  lb->add_option("--p", ps, "failure probability, or one per sensor")->required();
  lb->add_option("--n", n, "number of sensors sharing a single --p");

  int trial = 0;
  auto* solve = app.add_subcommand("solve-eta", "relaxed-policy threshold for each sweep value");
  solve->add_option("--config", config_path, "scenario JSON")->required()->check(CLI::ExistingFile);
  solve->add_option("--seed", seed, "master seed");
  solve->add_option("--trial", trial, "which trial's sensor draw to use");

  auto* selftest = app.add_subcommand("selftest", "cross-check closed forms against oracles");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return cmd_run(config_path, out_dir, seed, horizon, jobs);
    if (*lb) return cmd_lb(ps, n);
    if (*solve) return cmd_solve_eta(config_path, seed, trial);
    if (*selftest) return cmd_selftest();
  } catch (const aoi::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const aoi::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
