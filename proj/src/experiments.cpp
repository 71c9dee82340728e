#include "aoi/experiments.hpp"

#include <omp.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "aoi/baselines.hpp"
#include "aoi/errors.hpp"
#include "aoi/relaxed_solver.hpp"
#include "aoi/sim.hpp"

namespace aoi {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr const char* kCsvHeader =
    "x,lb,j_random_analytic,j_random_sim,j_relaxed_analytic,j_relaxed_sim,j_greedy_sim,"
    "eta_star,d_hat,ci_halfwidth";

constexpr ScenarioKind kKinds[] = {ScenarioKind::symmetric, ScenarioKind::asym_deterministic,
                                   ScenarioKind::asym_uniform, ScenarioKind::asym_gaussian};

void check_sweep_value(const ScenarioConfig& c, double x) {
  const auto bad = [&](const char* why) {
    throw ConfigError("sweep value " + std::to_string(x) + " invalid for " +
                      std::string(to_string(c.kind)) + ": " + why);
  };
  if (!std::isfinite(x)) bad("not finite");
  switch (c.kind) {
    case ScenarioKind::symmetric:
      if (x < 0.0 || x >= 1.0) bad("p must lie in [0, 1)");
      break;
    case ScenarioKind::asym_deterministic:
    case ScenarioKind::asym_uniform:
      if (x < 0.0 || x >= 1.0) bad("span must lie in [0, 1) so that every p stays in [0, 1)");
      break;
    case ScenarioKind::asym_gaussian:
      if (x < 0.0) bad("standard deviation must be >= 0");
      break;
  }
}

std::uint64_t kind_tag(ScenarioKind kind) {
  return static_cast<std::uint64_t>(std::find(std::begin(kKinds), std::end(kKinds), kind) -
                                    std::begin(kKinds));
}

std::uint64_t stream_seed(const ScenarioConfig& c, double x, int trial, std::uint64_t purpose) {
  return derive_seed(c.seed, {kind_tag(c.kind), static_cast<std::uint64_t>(c.n),
                              static_cast<std::uint64_t>(c.m), std::bit_cast<std::uint64_t>(x),
                              static_cast<std::uint64_t>(trial), purpose});
}

template <class F>
double guarded(std::string& error, F&& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    if (error.empty()) error = e.what();
    return kNaN;
  }
}

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

std::string_view to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::symmetric: return "symmetric";
    case ScenarioKind::asym_deterministic: return "asym_deterministic";
    case ScenarioKind::asym_uniform: return "asym_uniform";
    case ScenarioKind::asym_gaussian: return "asym_gaussian";
  }
  return "unknown";
}

ScenarioKind parse_kind(std::string_view name) {
  for (ScenarioKind k : kKinds) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown scenario kind '" + std::string(name) + "'");
}

void ScenarioConfig::validate() const {
  if (n < 1) throw ConfigError("N must be >= 1");
  if (m < 2) throw ConfigError("M must be >= 2");
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (horizon < 10 * static_cast<std::uint64_t>(m)) throw ConfigError("horizon must be >= 10*M");
  if (sweep.empty()) throw ConfigError("sweep must not be empty");
  for (double x : sweep) check_sweep_value(*this, x);
}

ScenarioConfig config_from_json(const nlohmann::json& j, std::uint64_t fallback_seed) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const char* const kKeys[] = {"kind", "N", "M", "sweep", "trials", "horizon", "seed"};
  for (const auto& [key, value] : j.items()) {
    if (std::find_if(std::begin(kKeys), std::end(kKeys), [&](const char* k) { return key == k; }) ==
        std::end(kKeys)) {
      throw ConfigError("unknown config field '" + key + "'");
    }
  }
  ScenarioConfig c;
  c.seed = fallback_seed;
  try {
    c.kind = parse_kind(j.at("kind").get<std::string>());
    c.n = j.at("N").get<int>();
    if (j.contains("M")) c.m = j.at("M").get<int>();
    c.sweep = j.at("sweep").get<std::vector<double>>();
    if (j.contains("trials")) c.trials = j.at("trials").get<int>();
    if (j.contains("horizon")) c.horizon = j.at("horizon").get<std::uint64_t>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  c.validate();
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path, std::uint64_t fallback_seed) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("cannot parse " + path.string() + ": " + e.what());
  }
  return config_from_json(j, fallback_seed);
}

nlohmann::json to_json(const ScenarioConfig& c) {
  return {{"kind", std::string(to_string(c.kind))}, {"N", c.n}, {"M", c.m}, {"sweep", c.sweep},
          {"trials", c.trials}, {"horizon", c.horizon}, {"seed", c.seed}};
}

std::vector<ChainParams> gen_sensors(const ScenarioConfig& c, double x, Rng& rng) {
  check_sweep_value(c, x);
  std::vector<ChainParams> out;
  out.reserve(static_cast<std::size_t>(c.n));
  for (int n = 1; n <= c.n; ++n) {
    double p = 0.5;
    switch (c.kind) {
      case ScenarioKind::symmetric:
        p = x;
        break;
      case ScenarioKind::asym_deterministic:
        // Equally spaced around 1/2 with max - min = x.
        p = c.n == 1 ? 0.5 : 0.5 + (n - (c.n + 1) / 2.0) * x / (c.n - 1);
        break;
      case ScenarioKind::asym_uniform:
        p = 0.5 - x / 2.0 + x * rng.uniform();
        break;
      case ScenarioKind::asym_gaussian:
        do {
          p = rng.normal(0.5, x);
        } while (!(p > 0.0 && p < 1.0));
        break;
    }
    if (!(p >= 0.0 && p < 1.0)) {
      throw ConfigError("generated failure probability " + std::to_string(p) + " outside [0, 1)");
    }
    out.emplace_back(p, c.m);
  }
  return out;
}

std::vector<ChainParams> trial_sensors(const ScenarioConfig& c, double x, int trial) {
  Rng rng(stream_seed(c, x, trial, 0));
  return gen_sensors(c, x, rng);
}

TrialResult run_trial(const ScenarioConfig& c, double x, int trial) {
  TrialResult r;
  std::vector<ChainParams> sensors;
  try {
    sensors = trial_sensors(c, x, trial);
  } catch (const std::exception& e) {
    r.error = e.what();
    r.lb = r.j_random_analytic = r.j_random_sim = r.j_relaxed_analytic = r.j_relaxed_sim =
        r.j_greedy_sim = r.eta_star = r.d_hat = r.ci_random = r.ci_relaxed = r.ci_greedy = kNaN;
    return r;
  }
  const std::uint64_t sim_seed = stream_seed(c, x, trial, 1);

  r.lb = guarded(r.error, [&] { return lower_bound(sensors).l_b; });
  r.j_random_analytic = guarded(r.error, [&] { return random_policy_value(sensors); });

  EtaSolution sol;
  r.j_relaxed_analytic = guarded(r.error, [&] {
    sol = solve_eta(sensors);
    return sol.j_value;
  });
  r.eta_star = std::isnan(r.j_relaxed_analytic) ? kNaN : sol.eta_star;
  r.d_hat = std::isnan(r.j_relaxed_analytic) ? kNaN : sol.d_hat;

  r.ci_random = kNaN;
  r.j_random_sim = guarded(r.error, [&] {
    const SimResult s = run_random(sensors, c.horizon, sim_seed);
    r.ci_random = s.ci_realized;
    return s.j_realized;
  });
  r.ci_greedy = kNaN;
  r.j_greedy_sim = guarded(r.error, [&] {
    const SimResult s = run_greedy(sensors, c.horizon, sim_seed);
    r.ci_greedy = s.ci_realized;
    return s.j_realized;
  });
  r.ci_relaxed = kNaN;
  r.j_relaxed_sim = guarded(r.error, [&] {
    if (std::isnan(r.eta_star)) throw NumericalError("no eta to simulate the relaxed policy with");
    const SimResult s = run_relaxed(sensors, r.eta_star, c.horizon, sim_seed);
    r.ci_relaxed = s.ci_expected;
    return s.j_expected;
  });
  return r;
}

std::vector<ScenarioRow> aggregate_rows(const ScenarioConfig& c,
                                        std::span<const TrialResult> trials) {
  const std::size_t per = static_cast<std::size_t>(c.trials);
  if (trials.size() != c.sweep.size() * per) {
    throw std::invalid_argument("trial count does not match the sweep layout");
  }
  std::vector<ScenarioRow> rows;
  rows.reserve(c.sweep.size());
  for (std::size_t s = 0; s < c.sweep.size(); ++s) {
    const auto block = trials.subspan(s * per, per);
    ScenarioRow row;
    row.x = c.sweep[s];
    const double inv = 1.0 / static_cast<double>(per);
    double ci2_random = 0.0, ci2_relaxed = 0.0, ci2_greedy = 0.0;
    for (const TrialResult& t : block) {
      row.lb += t.lb * inv;
      row.j_random_analytic += t.j_random_analytic * inv;
      row.j_random_sim += t.j_random_sim * inv;
      row.j_relaxed_analytic += t.j_relaxed_analytic * inv;
      row.j_relaxed_sim += t.j_relaxed_sim * inv;
      row.j_greedy_sim += t.j_greedy_sim * inv;
      row.eta_star += t.eta_star * inv;
      row.d_hat += t.d_hat * inv;
      ci2_random += t.ci_random * t.ci_random;
      ci2_relaxed += t.ci_relaxed * t.ci_relaxed;
      ci2_greedy += t.ci_greedy * t.ci_greedy;
      if (!t.error.empty()) {
        ++row.failed_trials;
        if (row.error.empty()) row.error = t.error;
      }
    }
    // Trial-level Monte Carlo errors are independent, so variances add.
    row.ci_halfwidth =
        std::max({std::sqrt(ci2_random), std::sqrt(ci2_relaxed), std::sqrt(ci2_greedy)}) * inv;
    if (per > 1) {
      double var = 0.0;
      for (const TrialResult& t : block) {
        var += (t.j_random_sim - row.j_random_sim) * (t.j_random_sim - row.j_random_sim);
      }
      row.se_random_sim = std::sqrt(var / static_cast<double>(per - 1) * inv);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<ScenarioRow> run_scenario_serial(const ScenarioConfig& c) {
  c.validate();
  std::vector<TrialResult> results;
  results.reserve(c.sweep.size() * static_cast<std::size_t>(c.trials));
  for (double x : c.sweep) {
    for (int t = 0; t < c.trials; ++t) results.push_back(run_trial(c, x, t));
  }
  return aggregate_rows(c, results);
}

std::vector<ScenarioRow> run_scenario(const ScenarioConfig& c, int jobs) {
  c.validate();
  const std::int64_t per = c.trials;
  const std::int64_t tasks = static_cast<std::int64_t>(c.sweep.size()) * per;
  std::vector<TrialResult> results(static_cast<std::size_t>(tasks));
  const int threads = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (std::int64_t task = 0; task < tasks; ++task) {
    results[static_cast<std::size_t>(task)] =
        run_trial(c, c.sweep[static_cast<std::size_t>(task / per)], static_cast<int>(task % per));
  }
  return aggregate_rows(c, results);
}

std::string format_csv(std::span<const ScenarioRow> rows) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const ScenarioRow& r : rows) {
    const double cols[] = {r.x, r.lb, r.j_random_analytic, r.j_random_sim, r.j_relaxed_analytic,
                           r.j_relaxed_sim, r.j_greedy_sim, r.eta_star, r.d_hat, r.ci_halfwidth};
    for (std::size_t i = 0; i < std::size(cols); ++i) {
      if (i) out += ',';
      out += format_value(cols[i]);
    }
    out += '\n';
  }
  return out;
}

std::vector<ScenarioRow> parse_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw std::runtime_error("CSV header does not match the figure-data layout");
  }
  std::vector<ScenarioRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> v;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) v.push_back(std::strtod(cell.c_str(), nullptr));
    if (v.size() != 10) throw std::runtime_error("CSV row has " + std::to_string(v.size()) + " columns");
    ScenarioRow r;
    r.x = v[0];
    r.lb = v[1];
    r.j_random_analytic = v[2];
    r.j_random_sim = v[3];
    r.j_relaxed_analytic = v[4];
    r.j_relaxed_sim = v[5];
    r.j_greedy_sim = v[6];
    r.eta_star = v[7];
    r.d_hat = v[8];
    r.ci_halfwidth = v[9];
    rows.push_back(r);
  }
  return rows;
}

void emit_figure_data(std::span<const ScenarioRow> rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << format_csv(rows);
  if (!out.flush()) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace aoi
