#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "aoi/chain.hpp"
#include "aoi/rng.hpp"

namespace aoi {

enum class ScenarioKind { symmetric, asym_deterministic, asym_uniform, asym_gaussian };

std::string_view to_string(ScenarioKind kind);
/// Throws ConfigError for unknown names.
ScenarioKind parse_kind(std::string_view name);

/// The sweep value x is p (symmetric), the span of p (deterministic), the
/// interval width (uniform) or the standard deviation (gaussian).
struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::symmetric;
  int n = 4;
  int m = 100;
  std::vector<double> sweep;
  int trials = 1;
  std::uint64_t horizon = 1'000'000;
  std::uint64_t seed = 1;

  /// Throws ConfigError.
  void validate() const;
};

/// Keys: kind, N, M, sweep, trials, horizon, seed. Unknown keys are rejected.
/// `seed` is optional; `fallback_seed` fills it when absent.
ScenarioConfig config_from_json(const nlohmann::json& j, std::uint64_t fallback_seed = 1);
ScenarioConfig load_config(const std::filesystem::path& path, std::uint64_t fallback_seed = 1);
nlohmann::json to_json(const ScenarioConfig& config);

/// Failure probabilities for one trial at sweep value x. Random kinds draw
/// from `rng`; deterministic kinds ignore it.
std::vector<ChainParams> gen_sensors(const ScenarioConfig& config, double x, Rng& rng);

/// Everything computed for one sensor set. Failed pieces hold NaN.
struct TrialResult {
  double lb = 0;
  double j_random_analytic = 0;
  double j_random_sim = 0;
  double j_relaxed_analytic = 0;
  double j_relaxed_sim = 0;
  double j_greedy_sim = 0;
  double eta_star = 0;
  double d_hat = 0;
  double ci_random = 0;
  double ci_relaxed = 0;
  double ci_greedy = 0;
  std::string error;
};

/// The sensor set used by trial `trial` at sweep value x.
std::vector<ChainParams> trial_sensors(const ScenarioConfig& config, double x, int trial);

TrialResult run_trial(const ScenarioConfig& config, double x, int trial);

/// One sweep point, averaged over trials. The first ten fields are the CSV
/// columns; the rest are diagnostics kept in memory only.
struct ScenarioRow {
  double x = 0;
  double lb = 0;
  double j_random_analytic = 0;
  double j_random_sim = 0;
  double j_relaxed_analytic = 0;
  double j_relaxed_sim = 0;
  double j_greedy_sim = 0;
  double eta_star = 0;
  double d_hat = 0;
  double ci_halfwidth = 0;  // Monte Carlo half-width of the averaged simulated values

  double se_random_sim = 0;  // standard error of j_random_sim across trials
  int failed_trials = 0;
  std::string error;  // first failure message, empty when the row is clean
};

/// Sweep points and trials spread over an OpenMP team; `jobs` <= 0 uses the
/// runtime default. Output is identical to run_scenario_serial.
std::vector<ScenarioRow> run_scenario(const ScenarioConfig& config, int jobs = 0);
std::vector<ScenarioRow> run_scenario_serial(const ScenarioConfig& config);

/// Rows built from per-trial results laid out sweep-major.
std::vector<ScenarioRow> aggregate_rows(const ScenarioConfig& config,
                                        std::span<const TrialResult> trials);

std::string format_csv(std::span<const ScenarioRow> rows);
std::vector<ScenarioRow> parse_csv(std::string_view text);
/// Throws std::runtime_error when the file cannot be written.
void emit_figure_data(std::span<const ScenarioRow> rows, const std::filesystem::path& path);

}  // namespace aoi
