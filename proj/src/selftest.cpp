#include "aoi/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "aoi/baselines.hpp"
#include "aoi/belief.hpp"
#include "aoi/chain.hpp"
#include "aoi/lambert_w.hpp"
#include "aoi/relaxed_solver.hpp"
#include "aoi/threshold.hpp"

namespace aoi {
namespace {

std::string fmt(const char* f, double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

SelftestCheck belief_vs_matrix_power() {
  double worst = 0.0;
  for (double p : {0.1, 0.5, 0.8, 0.95}) {
    for (int m : {2, 5, 10}) {
      const ChainParams c(p, m);
      const TransitionMatrix t = build_transition(c);
      for (int k = 1; k <= m; ++k) {
        Eigen::RowVectorXd v = Eigen::RowVectorXd::Unit(m, k - 1);
        for (int i = 1; i <= m - 1; ++i) {
          v = v * t;
          const auto pi = branch_belief(c, {k, i});
          for (int a = 0; a < m; ++a) worst = std::max(worst, std::abs(pi[a] - v(a)));
        }
      }
    }
  }
  return {"branch belief equals e_k T^i", worst < 1e-10, fmt("max error %.3g", worst)};
}

SelftestCheck thresholds_agree() {
  int mismatches = 0;
  int points = 0;
  for (double p = 0.05; p < 0.96; p += 0.15) {
    for (int m : {3, 10, 40}) {
      const ChainParams c(p, m);
      const double top = c.q() + m * p + 1.0;
      for (int s = 1; s <= 25; ++s) {
        const double eta = 1.0 + (top - 1.0) * s / 25.0;
        ++points;
        if (!(gamma_analytic(c, eta) == gamma_scan(c, eta))) ++mismatches;
      }
    }
  }
  return {"analytic thresholds equal scanned thresholds", mismatches == 0,
          std::to_string(mismatches) + " mismatches over " + std::to_string(points) + " points"};
}

SelftestCheck lambert_round_trip() {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> dist(-1.0, 10.0);
  double worst = 0.0;
  for (int n = 0; n < 200; ++n) {
    const double w = dist(gen);
    worst = std::max(worst, std::abs(lambert_w0(w * std::exp(w)) - w));
  }
  return {"lambert W0 round trip", worst < 1e-9, fmt("max error %.3g", worst)};
}

SelftestCheck rates_vs_iteration() {
  double worst = 0.0;
  for (double p : {0.3, 0.6, 0.85}) {
    const ChainParams c(p, 12);
    const double eta = 0.5 * (steady_expected_aoi(c) + c.q() + 12 * p);
    const RecurrenceSystem sys = build_system(c, gamma_analytic(c, eta));
    const PerSensorRates r = solve_rates(sys);
    const std::int64_t horizon = 50'000;
    const auto d = iterate_recurrence(sys, horizon, RecurrenceKind::count);
    const auto big_r = iterate_recurrence(sys, horizon, RecurrenceKind::reward);
    for (std::size_t k = 0; k < d.size(); ++k) {
      worst = std::max(worst, std::abs(d[k] / horizon - r.d_bar));
      worst = std::max(worst, std::abs(big_r[k] / horizon - r.r_bar));
    }
  }
  return {"linear-solve rates match recurrence iteration", worst < 2e-3,
          fmt("max error %.3g", worst)};
}

SelftestCheck symmetric_bound() {
  int mismatches = 0;
  for (double p = 0.1; p < 0.95; p += 0.1) {
    for (int n : {2, 4, 8, 12}) {
      const std::vector<ChainParams> sensors(static_cast<std::size_t>(n), ChainParams(p, 100));
      const LowerBoundResult search = lower_bound(sensors);
      const SymmetricBound closed = lower_bound_symmetric(p, n);
      if (search.l_star != closed.l_star || std::abs(search.omega_star - closed.omega_star) > 1e-9) {
        ++mismatches;
      }
    }
  }
  return {"symmetric lower bound closed form matches search", mismatches == 0,
          std::to_string(mismatches) + " mismatches"};
}

}  // namespace

std::vector<SelftestCheck> run_selftest() {
  return {belief_vs_matrix_power(), thresholds_agree(), lambert_round_trip(), rates_vs_iteration(),
          symmetric_bound()};
}

}  // namespace aoi
