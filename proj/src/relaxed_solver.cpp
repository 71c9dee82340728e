#include "aoi/relaxed_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

#include "aoi/belief.hpp"
#include "aoi/errors.hpp"

namespace aoi {
namespace {

// The offsets of rarely visited branches are badly conditioned (their
// sensitivity grows like p^-M) while the rate itself is not, so the solve is
// accepted on its residual rather than on a condition estimate.
constexpr double kMaxResidual = 1e-8;

struct SparseRow {
  std::vector<int> cols;
  std::vector<double> vals;
};

std::vector<SparseRow> sparse_rows(const Eigen::MatrixXd& rows) {
  std::vector<SparseRow> out(static_cast<std::size_t>(rows.rows()));
  for (Eigen::Index k = 0; k < rows.rows(); ++k) {
    for (Eigen::Index j = 0; j < rows.cols(); ++j) {
      if (rows(k, j) != 0.0) {
        out[k].cols.push_back(static_cast<int>(j));
        out[k].vals.push_back(rows(k, j));
      }
    }
  }
  return out;
}

}  // namespace

RecurrenceSystem build_system(const ChainParams& params, const ThresholdTable& table) {
  const int m = params.m();
  if (table.gamma.size() != static_cast<std::size_t>(m)) {
    throw std::invalid_argument("threshold table size does not match M");
  }
  RecurrenceSystem sys{params, std::vector<int>(m), Eigen::MatrixXd::Zero(m, m),
                       Eigen::VectorXd::Zero(m)};
  for (int k = 1; k <= m; ++k) {
    const Threshold g = table.at(k);
    if (!g.finite()) {
      throw NumericalError("branch " + std::to_string(k) +
                           " is never sampled; the sensor's long-run rate is zero");
    }
    sys.gamma[k - 1] = g.slots();
    const auto pi = branch_belief(params, {k, g.slots()});
    for (int j = 0; j < m; ++j) sys.rows(k - 1, j) = pi[j];
    sys.rewards(k - 1) = expected_aoi(params, {k, g.slots()});
  }
  return sys;
}

Eigen::MatrixXd affine_system_matrix(const RecurrenceSystem& sys) {
  const Eigen::Index m = sys.rows.rows();
  Eigen::MatrixXd a = sys.rows;
  a.diagonal().array() -= 1.0;
  for (Eigen::Index k = 0; k < m; ++k) a(k, m - 1) = sys.gamma[k];
  return a;
}

PerSensorRates solve_rates(const RecurrenceSystem& sys) {
  const Eigen::Index m = sys.rows.rows();
  const Eigen::MatrixXd a = affine_system_matrix(sys);
  // Partial pivoting suffers exponential element growth on this pattern (a
  // unit column against a banded body), so use an orthogonal factorization.
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  const auto diag = qr.matrixQR().diagonal().cwiseAbs();
  if (!(diag.minCoeff() > 1e-13 * diag.maxCoeff())) {
    throw NumericalError("recurrence system is singular");
  }
  Eigen::MatrixXd rhs(m, 2);
  rhs.col(0).setConstant(-1.0);
  rhs.col(1) = -sys.rewards;
  const Eigen::MatrixXd x = qr.solve(rhs);
  const double residual = (a * x - rhs).cwiseAbs().maxCoeff() / rhs.cwiseAbs().maxCoeff();
  if (!(residual < kMaxResidual)) {
    throw NumericalError("recurrence system solve is inaccurate (residual " +
                         std::to_string(residual) + ")");
  }
  const PerSensorRates r{-x(m - 1, 0), -x(m - 1, 1)};
  if (!std::isfinite(r.d_bar) || !std::isfinite(r.r_bar) || r.d_bar < -1e-9 ||
      r.d_bar > 1.0 + 1e-9) {
    throw NumericalError("recurrence system produced an invalid rate");
  }
  return r;
}

double sampling_rate(const RecurrenceSystem& sys) { return solve_rates(sys).d_bar; }
double aoi_rate(const RecurrenceSystem& sys) { return solve_rates(sys).r_bar; }

std::vector<double> iterate_recurrence(const RecurrenceSystem& sys, std::int64_t horizon,
                                       RecurrenceKind kind) {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  const int m = static_cast<int>(sys.rows.rows());
  const auto rows = sparse_rows(sys.rows);
  const int span = *std::max_element(sys.gamma.begin(), sys.gamma.end()) + 1;

  // history[t % span] holds the vector at horizon t; horizon 0 is all zeros.
  std::vector<std::vector<double>> history(static_cast<std::size_t>(span),
                                           std::vector<double>(m, 0.0));
  for (std::int64_t t = 1; t <= horizon; ++t) {
    auto& cur = history[static_cast<std::size_t>(t % span)];
    for (int k = 0; k < m; ++k) {
      const int g = sys.gamma[k];
      if (t < g) {
        cur[k] = 0.0;
        continue;
      }
      const auto& prev = history[static_cast<std::size_t>((t - g) % span)];
      double acc = 0.0;
      const auto& row = rows[k];
      for (std::size_t e = 0; e < row.cols.size(); ++e) acc += row.vals[e] * prev[row.cols[e]];
      cur[k] = (kind == RecurrenceKind::count ? 1.0 : sys.rewards(k)) + acc;
    }
  }
  return history[static_cast<std::size_t>(horizon % span)];
}

PerSensorRates sensor_rates(const ChainParams& params, double eta) {
  if (!(steady_expected_aoi(params) < eta)) return {};
  return solve_rates(build_system(params, gamma_analytic(params, eta)));
}

namespace {

std::vector<std::size_t> order_by_steady(std::span<const ChainParams> sensors) {
  std::vector<std::size_t> idx(sensors.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return steady_expected_aoi(sensors[a]) < steady_expected_aoi(sensors[b]);
  });
  return idx;
}

}  // namespace

namespace {

// Rates depend on eta only through the threshold table, which is constant
// between consecutive attainable expected-AoI values of that sensor.
using RateCache = std::vector<std::map<std::vector<int>, PerSensorRates>>;

AggregateRates aggregate_cached(std::span<const ChainParams> sensors, double eta,
                                RateCache* cache) {
  AggregateRates out;
  for (std::size_t n : order_by_steady(sensors)) {
    if (!(steady_expected_aoi(sensors[n]) < eta)) continue;
    PerSensorRates r;
    if (cache == nullptr) {
      r = sensor_rates(sensors[n], eta);
    } else {
      const ThresholdTable table = gamma_analytic(sensors[n], eta);
      std::vector<int> key;
      key.reserve(table.gamma.size());
      for (const Threshold& g : table.gamma) key.push_back(g.finite() ? g.slots() : -1);
      auto& slot = (*cache)[n];
      auto it = slot.find(key);
      if (it == slot.end()) {
        it = slot.emplace(std::move(key), solve_rates(build_system(sensors[n], table))).first;
      }
      r = it->second;
    }
    out.d_hat += r.d_bar;
    out.r_total += r.r_bar;
    out.active.push_back(n);
  }
  return out;
}

}  // namespace

AggregateRates aggregate_rates(std::span<const ChainParams> sensors, double eta) {
  return aggregate_cached(sensors, eta, nullptr);
}

namespace {

// Candidate eta values: one representative for each interval (v_j, v_j+1]
// between consecutive attainable expected-AoI values, plus one above them all.
std::vector<double> candidate_etas(std::span<const ChainParams> sensors) {
  std::vector<double> values;
  for (const auto& s : sensors) {
    const ExpectedAoiTable table(s);
    const double floor = steady_expected_aoi(s);
    for (double v : table.values()) {
      if (v >= floor) values.push_back(v);
    }
    values.push_back(floor);
  }
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());

  std::vector<double> etas;
  etas.reserve(values.size());
  for (std::size_t j = 0; j + 1 < values.size(); ++j) {
    const double mid = 0.5 * (values[j] + values[j + 1]);
    etas.push_back(mid > values[j] && mid < values[j + 1] ? mid : values[j + 1]);
  }
  etas.push_back(values.back() + 1.0);
  return etas;
}

bool better(double eta_a, double d_a, double eta_b, double d_b) {
  const double ea = std::abs(d_a - 1.0);
  const double eb = std::abs(d_b - 1.0);
  if (ea != eb) return ea < eb;
  const bool a_under = d_a <= 1.0;
  const bool b_under = d_b <= 1.0;
  if (a_under != b_under) return a_under;
  if (a_under) return eta_a > eta_b;
  return eta_a < eta_b;
}

}  // namespace

EtaSolution solve_eta(std::span<const ChainParams> sensors, const SearchConfig& search) {
  if (sensors.empty()) throw std::invalid_argument("solve_eta needs at least one sensor");
  const std::vector<double> etas = candidate_etas(sensors);
  const std::size_t count = etas.size();

  std::map<std::size_t, double> evaluated;
  RateCache cache(sensors.size());
  auto d_at = [&](std::size_t j) {
    auto it = evaluated.find(j);
    if (it != evaluated.end()) return it->second;
    const double d = aggregate_cached(sensors, etas[j], &cache).d_hat;
    evaluated.emplace(j, d);
    return d;
  };
  // First index whose d_hat satisfies pred, assuming d_hat non-decreasing.
  auto first_index = [&](auto pred) {
    std::size_t lo = 0;
    std::size_t hi = count;
    while (lo < hi) {
      const std::size_t mid = lo + (hi - lo) / 2;
      if (pred(d_at(mid))) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }
    return lo;
  };

  if (count <= search.full_scan_limit) {
    for (std::size_t j = 0; j < count; ++j) d_at(j);
  } else {
    // Bisection finds where d_hat first reaches and first exceeds one; the
    // windows around both catch small local decreases near the crossing.
    const std::size_t reach = first_index([](double d) { return d >= 1.0; });
    const std::size_t exceed = first_index([](double d) { return d > 1.0; });
    const std::size_t w = search.local_window;
    for (std::size_t centre : {reach, exceed}) {
      const std::size_t lo = centre > w ? centre - w - 1 : 0;
      for (std::size_t j = lo; j < std::min(count, centre + w + 1); ++j) d_at(j);
    }
    const int probes = std::max(search.monotonicity_probes, 0);
    for (int s = 0; s < probes && count > 1; ++s) {
      d_at(static_cast<std::size_t>(s) * (count - 1) /
           static_cast<std::size_t>(std::max(probes - 1, 1)));
    }
  }

  bool monotone = true;
  double prev = -std::numeric_limits<double>::infinity();
  for (const auto& [j, d] : evaluated) {
    if (d < prev - 1e-12) monotone = false;
    prev = d;
  }

  std::size_t best = count;
  for (const auto& [j, d] : evaluated) {
    if (best == count || better(etas[j], d, etas[best], evaluated.at(best))) best = j;
  }

  EtaSolution sol;
  sol.eta_star = etas[best];
  const AggregateRates agg = aggregate_cached(sensors, sol.eta_star, &cache);
  sol.d_hat = agg.d_hat;
  sol.active = agg.active;
  sol.monotone = monotone;
  sol.evaluations = evaluated.size();
  if (!(agg.d_hat > 0.0)) throw NumericalError("no sensor is active at the selected eta");
  sol.j_value = agg.r_total / agg.d_hat;
  return sol;
}

double relaxed_performance(std::span<const ChainParams> sensors, double eta_star) {
  const AggregateRates agg = aggregate_rates(sensors, eta_star);
  if (!(agg.d_hat > 0.0)) {
    throw NumericalError("no sensor is active at eta=" + std::to_string(eta_star));
  }
  return agg.r_total / agg.d_hat;
}

}  // namespace aoi
