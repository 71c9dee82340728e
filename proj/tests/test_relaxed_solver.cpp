#include "doctest.h"

#include <cmath>
#include <random>

#include "aoi/belief.hpp"
#include "aoi/errors.hpp"
#include "aoi/relaxed_solver.hpp"
#include "aoi/sim.hpp"
#include "oracles.hpp"

using aoi::ChainParams;

namespace {

aoi::RecurrenceSystem system_at(const ChainParams& c, double eta) {
  return aoi::build_system(c, aoi::gamma_analytic(c, eta));
}

double eta_between(const ChainParams& c, double frac) {
  const double lo = aoi::steady_expected_aoi(c);
  const double hi = c.q() + c.m() * c.p();
  return lo + frac * (hi - lo);
}

}  // namespace

TEST_SUITE("relaxed_solver") {

TEST_CASE("build_system rows and rewards") {
  const ChainParams c(0.8, 10);
  const auto all_one = system_at(c, 100.0);
  const auto t = oracle::transition(0.8, 10);
  for (int k = 0; k < 10; ++k)
    for (int j = 0; j < 10; ++j) CHECK(all_one.rows(k, j) == doctest::Approx(t[k][j]));

  const auto sys = system_at(c, 5.0);
  for (int k = 1; k <= 10; ++k) {
    const auto want = oracle::belief(0.8, 10, k, sys.gamma[k - 1]);
    CHECK(std::abs(sys.rows.row(k - 1).sum() - 1.0) < 1e-12);
    for (int j = 0; j < 10; ++j) CHECK(std::abs(sys.rows(k - 1, j) - want[j]) < 1e-12);
    CHECK(sys.rewards(k - 1) < 5.0);
  }
  CHECK_THROWS_AS(system_at(c, 4.0), aoi::NumericalError);
}

TEST_CASE("all thresholds one gives one sample per slot") {
  for (double p : {0.0, 0.3, 0.5, 0.9}) {
    const ChainParams c(p, 100);
    const auto r = aoi::solve_rates(system_at(c, 1000.0));
    CHECK(r.d_bar == doctest::Approx(1.0).epsilon(1e-9));
    // Sampling every slot collects the steady mean of the previous slot's AoI
    // under the branch means, which is the steady expected AoI.
    CHECK(r.r_bar == doctest::Approx(aoi::steady_expected_aoi(c)).epsilon(1e-9));
  }
  const auto r0 = aoi::solve_rates(system_at(ChainParams(1e-9, 10), 1000.0));
  CHECK(r0.r_bar == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("iterate_recurrence base cases") {
  const ChainParams c(0.7, 12);
  const auto sys = system_at(c, eta_between(c, 0.3));
  const int gmin = *std::min_element(sys.gamma.begin(), sys.gamma.end());
  if (gmin > 1) {
    for (double v : aoi::iterate_recurrence(sys, gmin - 1, aoi::RecurrenceKind::count)) CHECK(v == 0.0);
  }
  for (int k = 1; k <= 12; ++k) {
    const int g = sys.gamma[k - 1];
    const auto d = aoi::iterate_recurrence(sys, g, aoi::RecurrenceKind::count);
    const auto r = aoi::iterate_recurrence(sys, g, aoi::RecurrenceKind::reward);
    CHECK(d[k - 1] == doctest::Approx(1.0));
    CHECK(r[k - 1] == doctest::Approx(sys.rewards(k - 1)));
  }
  CHECK_THROWS(aoi::iterate_recurrence(sys, 0, aoi::RecurrenceKind::count));
}

TEST_CASE("iterate_recurrence matches the dynamic-programming oracle") {
  const ChainParams c(0.6, 8);
  const auto sys = system_at(c, eta_between(c, 0.5));
  oracle::Mat rows(8, oracle::Vec(8));
  oracle::Vec ones(8, 1.0), rewards(8);
  for (int k = 0; k < 8; ++k) {
    rows[k] = oracle::belief(0.6, 8, k + 1, sys.gamma[k]);
    rewards[k] = oracle::mean_aoi(rows[k]);
  }
  const auto d = aoi::iterate_recurrence(sys, 500, aoi::RecurrenceKind::count);
  const auto r = aoi::iterate_recurrence(sys, 500, aoi::RecurrenceKind::reward);
  const auto d_want = oracle::recurrence(rows, sys.gamma, ones, 500);
  const auto r_want = oracle::recurrence(rows, sys.gamma, rewards, 500);
  for (int k = 0; k < 8; ++k) {
    CHECK(d[k] == doctest::Approx(d_want[k]).epsilon(1e-12));
    CHECK(r[k] == doctest::Approx(r_want[k]).epsilon(1e-12));
  }
}

TEST_CASE("linear-solve rates converge with the recurrence like c/T") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int n = 0; n < 10; ++n) {
    const ChainParams c(0.05 + 0.9 * unit(gen), 3 + static_cast<int>(unit(gen) * 40));
    const auto sys = system_at(c, eta_between(c, 0.05 + 0.9 * unit(gen)));
    const auto rates = aoi::solve_rates(sys);
    CHECK(rates.d_bar >= 0.0);
    CHECK(rates.d_bar <= 1.0);
    CHECK(rates.r_bar >= rates.d_bar - 1e-12);
    double spread_prev = 0.0;
    for (int horizon : {1000, 10000, 100000}) {
      const auto d = aoi::iterate_recurrence(sys, horizon, aoi::RecurrenceKind::count);
      const auto r = aoi::iterate_recurrence(sys, horizon, aoi::RecurrenceKind::reward);
      double err = 0.0;
      for (std::size_t k = 0; k < d.size(); ++k) {
        err = std::max(err, std::abs(d[k] / horizon - rates.d_bar));
        err = std::max(err, std::abs(r[k] / horizon - rates.r_bar));
      }
      CHECK(err * horizon < 3.0 * c.m());
      const auto [lo, hi] = std::minmax_element(d.begin(), d.end());
      const double spread = *hi - *lo;
      if (horizon > 1000) CHECK(spread < spread_prev + 2.0);
      spread_prev = spread;
    }
  }
}

TEST_CASE("rates are bounded by the per-sample AoI range") {
  for (double p : {0.2, 0.5, 0.8}) {
    const ChainParams c(p, 30);
    for (double frac : {0.01, 0.3, 0.7, 0.99}) {
      const double eta = eta_between(c, frac);
      const auto r = aoi::sensor_rates(c, eta);
      CHECK(r.r_bar >= r.d_bar - 1e-12);
      CHECK(r.r_bar <= eta * r.d_bar + 1e-12);
    }
    const auto off = aoi::sensor_rates(c, aoi::steady_expected_aoi(c));
    CHECK(off.d_bar == 0.0);
  }
}

TEST_CASE("rates equal the determinant ratio on small systems") {
  for (double p : {0.3, 0.6, 0.85}) {
    for (int m : {3, 4, 5, 6}) {
      const ChainParams c(p, m);
      for (double frac : {0.1, 0.5, 0.9}) {
        const auto sys = system_at(c, eta_between(c, frac));
        // B: columns 1..M-1 of (rows - I), gamma in column M. B_M: column M
        // replaced by the right-hand side. Cramer gives -alpha = det(B_M)/det(B).
        oracle::Mat b(m, oracle::Vec(m)), bm, bstar;
        for (int k = 0; k < m; ++k) {
          for (int j = 0; j < m - 1; ++j) b[k][j] = sys.rows(k, j) - (k == j ? 1.0 : 0.0);
          b[k][m - 1] = sys.gamma[k];
        }
        bm = bstar = b;
        for (int k = 0; k < m; ++k) {
          bm[k][m - 1] = -1.0;
          bstar[k][m - 1] = -oracle::mean_aoi(oracle::belief(p, m, k + 1, sys.gamma[k]));
        }
        const double det = oracle::determinant(b);
        const auto rates = aoi::solve_rates(sys);
        CHECK(std::abs(rates.d_bar + oracle::determinant(bm) / det) < 1e-9);
        CHECK(std::abs(rates.r_bar + oracle::determinant(bstar) / det) < 1e-9);
      }
    }
  }
}

TEST_CASE("rates agree with a Bayesian-filter simulation") {
  const ChainParams c(0.5, 5);
  const double eta = eta_between(c, 0.4);
  const auto rates = aoi::sensor_rates(c, eta);
  const auto sim = oracle::simulate_threshold(0.5, 5, eta, 1'000'000, 17);
  CHECK(sim.d == doctest::Approx(rates.d_bar).epsilon(0.01));
  CHECK(sim.r == doctest::Approx(rates.r_bar).epsilon(0.01));
}

TEST_CASE("solve_eta basics") {
  CHECK_THROWS(aoi::solve_eta({}));

  const std::vector<ChainParams> perfect{ChainParams(0.0, 10)};
  const auto s0 = aoi::solve_eta(perfect);
  CHECK(s0.d_hat == 1.0);
  CHECK(s0.j_value == 1.0);

  const std::vector<ChainParams> sym(4, ChainParams(0.8, 100));
  const auto s = aoi::solve_eta(sym);
  CHECK(s.monotone);
  CHECK(s.active.size() == 4);
  const auto agg = aoi::aggregate_rates(sym, s.eta_star);
  CHECK(s.d_hat == agg.d_hat);
  CHECK(s.j_value == doctest::Approx(agg.r_total / agg.d_hat));
  CHECK(s.j_value == doctest::Approx(aoi::relaxed_performance(sym, s.eta_star)));
  const auto one = aoi::sensor_rates(sym[0], s.eta_star);
  CHECK(s.j_value == doctest::Approx(one.r_bar * 4 / s.d_hat));

  const auto sim = aoi::run_relaxed(sym, s.eta_star, 1'000'000, 9);
  CHECK(sim.j_expected == doctest::Approx(s.j_value).epsilon(0.02));
  CHECK(sim.samples_per_slot == doctest::Approx(s.d_hat).epsilon(0.01));

  CHECK_THROWS_AS(aoi::relaxed_performance(sym, 1.0), aoi::NumericalError);
}

TEST_CASE("solve_eta picks the best grid candidate") {
  std::mt19937_64 gen(23);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 6; ++trial) {
    std::vector<ChainParams> sensors;
    const int n = 2 + trial % 3;
    for (int i = 0; i < n; ++i) sensors.emplace_back(0.2 + 0.7 * unit(gen), 15);
    const auto sol = aoi::solve_eta(sensors);
    // Exhaustive check over every attainable value and the midpoints between them.
    std::vector<double> values;
    for (const auto& c : sensors) {
      const aoi::ExpectedAoiTable t(c);
      values.insert(values.end(), t.values().begin(), t.values().end());
      values.push_back(aoi::steady_expected_aoi(c));
    }
    std::sort(values.begin(), values.end());
    double best_err = std::abs(sol.d_hat - 1.0);
    for (std::size_t j = 0; j + 1 < values.size(); ++j) {
      const double eta = 0.5 * (values[j] + values[j + 1]);
      if (!(eta > values[j])) continue;
      const double d = aoi::aggregate_rates(sensors, eta).d_hat;
      CHECK(std::abs(d - 1.0) >= best_err - 1e-12);
    }
  }
}

TEST_CASE("a decrease of the sampling rate in eta is detected") {
  // Lowering gamma_4 from 3 to 2 makes the slow branch 6 likelier than branch 7.
  const ChainParams c(0.7491, 15);
  const auto before = aoi::sensor_rates(c, 3.9927);
  const auto after = aoi::sensor_rates(c, 4.0192);
  CHECK(aoi::gamma_analytic(c, 3.9927).at(4) == aoi::Threshold::after(3));
  CHECK(aoi::gamma_analytic(c, 4.0192).at(4) == aoi::Threshold::after(1));
  CHECK(after.d_bar < before.d_bar - 0.01);
  // The same ordering from the dynamic-programming oracle.
  auto dp_rate = [&](double eta) {
    const auto sys = aoi::build_system(c, aoi::gamma_analytic(c, eta));
    oracle::Mat rows(15);
    for (int k = 0; k < 15; ++k) rows[k] = oracle::belief(0.7491, 15, k + 1, sys.gamma[k]);
    return oracle::recurrence(rows, sys.gamma, oracle::Vec(15, 1.0), 20000)[0] / 20000;
  };
  CHECK(dp_rate(4.0192) < dp_rate(3.9927) - 0.01);

  const std::vector<ChainParams> one{c};
  CHECK(!aoi::solve_eta(one).monotone);
}

}
