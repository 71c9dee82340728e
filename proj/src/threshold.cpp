#include "aoi/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "aoi/lambert_w.hpp"

namespace aoi {
namespace {

constexpr double kCeilNudge = 1e-9;

double phase1_crossing(double p, int k, double eta) {
  // (1-p^x)/(1-p) + k p^x = eta
  const double ratio = (1.0 - eta * (1.0 - p)) / (1.0 - k * (1.0 - p));
  return std::log(ratio) / std::log(p);
}

double phase2_crossing(double p, int m, double eta) {
  // (1-p^x)/(1-p) - p^x x + p^x M = eta
  const double psi_eta = 1.0 / (1.0 - p) - eta;
  const double psi_m = 1.0 / (1.0 - p) - m;
  const double lnp = std::log(p);
  const double z = psi_eta * std::exp(psi_m * lnp) * lnp;
  if (!std::isfinite(z)) return std::numeric_limits<double>::quiet_NaN();
  return lambert_w0(z) / lnp - psi_m;
}

// First i in 1..M-1 with expected_aoi(k, i) < eta.
Threshold scan_branch(const ChainParams& params, int k, double eta) {
  for (int i = 1; i <= params.m() - 1; ++i) {
    if (expected_aoi(params, {k, i}) < eta) return Threshold::after(i);
  }
  return Threshold::never();
}

// Moves a candidate onto the first crossing: A(k, g) < eta and
// (g == 1 or A(k, g-1) >= eta).
Threshold settle(const ChainParams& params, int k, double eta, int g) {
  const int last = params.m() - 1;
  g = std::clamp(g, 1, last);
  while (g > 1 && expected_aoi(params, {k, g - 1}) < eta) --g;
  while (expected_aoi(params, {k, g}) >= eta) {
    if (g == last) return scan_branch(params, k, eta);
    ++g;
  }
  return Threshold::after(g);
}

}  // namespace

Threshold Threshold::after(int slots) {
  if (slots < 1) throw std::invalid_argument("threshold must be >= 1, got " + std::to_string(slots));
  return Threshold(slots);
}

int Threshold::slots() const {
  if (!finite()) throw std::logic_error("threshold is never");
  return slots_;
}

bool ThresholdTable::all_finite() const noexcept {
  return std::all_of(gamma.begin(), gamma.end(), [](Threshold t) { return t.finite(); });
}

namespace detail {

double analytic_crossing(const ChainParams& params, int k, double eta) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  const int m = params.m();
  const double p = params.p();
  if (p == 0.0) return nan;
  const double initial = expected_aoi(params, {k, 1});
  if (initial < eta) return nan;
  if (eta <= steady_expected_aoi(params)) return nan;
  if (k <= 1.0 / (1.0 - p)) return phase2_crossing(p, m, eta);
  if (m - k - 1 < 1) return nan;
  if (expected_aoi(params, {k, m - k - 1}) > eta) return phase2_crossing(p, m, eta);
  return phase1_crossing(p, k, eta);
}

}  // namespace detail

ThresholdTable gamma_analytic(const ChainParams& params, double eta) {
  const int m = params.m();
  const double p = params.p();
  ThresholdTable table{eta, std::vector<Threshold>(static_cast<std::size_t>(m), Threshold::never())};

  // Expected AoI never exceeds A(M, 1) = q + Mp and never drops below 1.
  if (eta > params.q() + m * p) {
    std::fill(table.gamma.begin(), table.gamma.end(), Threshold::after(1));
    return table;
  }
  const bool steady_below = steady_expected_aoi(params) < eta;
  for (int k = 1; k <= m; ++k) {
    Threshold& out = table.gamma[static_cast<std::size_t>(k - 1)];
    if (expected_aoi(params, {k, 1}) < eta) {
      out = Threshold::after(1);
      continue;
    }
    if (!steady_below) continue;  // stays never
    if (p == 0.0) continue;       // unreachable: steady value is 1 = A(k, 1)
    if (k > 1.0 / (1.0 - p) && m - k - 1 < 1) {
      out = scan_branch(params, k, eta);
      continue;
    }
    double x = std::numeric_limits<double>::quiet_NaN();
    try {
      x = detail::analytic_crossing(params, k, eta);
    } catch (const std::domain_error&) {
    }
    if (!std::isfinite(x)) {
      out = scan_branch(params, k, eta);
      continue;
    }
    const double g = std::ceil(x - kCeilNudge);
    const int guess = g < 1.0 ? 1 : (g > m ? m : static_cast<int>(g));
    out = settle(params, k, eta, guess);
  }
  return table;
}

ThresholdTable gamma_scan(const ChainParams& params, double eta) {
  ThresholdTable table{eta, {}};
  table.gamma.reserve(static_cast<std::size_t>(params.m()));
  for (int k = 1; k <= params.m(); ++k) table.gamma.push_back(scan_branch(params, k, eta));
  return table;
}

ThresholdTable gamma_scan(const ExpectedAoiTable& values, double eta) {
  const int m = values.params().m();
  ThresholdTable table{eta, std::vector<Threshold>(static_cast<std::size_t>(m), Threshold::never())};
  for (int k = 1; k <= m; ++k) {
    for (int i = 1; i <= m - 1; ++i) {
      if (values(k, i) < eta) {
        table.gamma[static_cast<std::size_t>(k - 1)] = Threshold::after(i);
        break;
      }
    }
  }
  return table;
}

}  // namespace aoi
