#include "aoi/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "aoi/belief.hpp"
#include "aoi/errors.hpp"

namespace aoi {
namespace {

// Untruncated single-sensor rates; shared by proactive_rates and the bound.
ProactiveRates cycle_rates(double p, int l, double omega) {
  const double q = 1.0 - p;
  const double pl = std::pow(p, l);
  const double pl1 = std::pow(p, l - 1);
  return {1.0 - omega * pl - (1.0 - omega) * pl1,
          ((l - 1) * pl - l * pl1 + 1.0) / q + omega * l * q * pl1};
}

double transmissions(std::span<const ChainParams> sensors, int l, double omega) {
  double sum = 0.0;
  for (const auto& s : sensors) sum += cycle_rates(s.p(), l, omega).tx_per_slot;
  return sum;
}

constexpr int kMaxThreshold = 1 << 24;

}  // namespace

ProactiveRates proactive_rates(const ChainParams& params, int threshold, double omega) {
  if (threshold < 1 || threshold > params.m()) {
    throw std::invalid_argument("proactive threshold L must lie in 1..M, got " +
                                std::to_string(threshold));
  }
  if (!(omega > 0.0 && omega <= 1.0)) {
    throw std::invalid_argument("proactive omega must lie in (0, 1], got " + std::to_string(omega));
  }
  return cycle_rates(params.p(), threshold, omega);
}

LowerBoundResult lower_bound(std::span<const ChainParams> sensors) {
  if (sensors.empty()) throw std::invalid_argument("lower_bound needs at least one sensor");

  LowerBoundResult out;
  if (sensors.size() == 1 && sensors[0].p() > 0.0) {
    // A lone sensor must transmit every slot, which no finite L achieves.
    out.l_b = 1.0 / sensors[0].q();
    return out;
  }
  int l = 1;
  while (transmissions(sensors, l, 1.0) < 1.0) {
    if (++l > kMaxThreshold) throw NumericalError("proactive threshold search did not terminate");
  }

  // sum_n [1 - p^(L-1)] + omega sum_n [p^(L-1) - p^L] = 1
  double base = 0.0;
  double slope = 0.0;
  for (const auto& s : sensors) {
    const double pl1 = std::pow(s.p(), l - 1);
    base += 1.0 - pl1;
    slope += pl1 - std::pow(s.p(), l);
  }
  out.l_star = l;
  out.omega_star = slope > 0.0 ? std::min(1.0, (1.0 - base) / slope) : 1.0;
  for (const auto& s : sensors) out.l_b += cycle_rates(s.p(), l, out.omega_star).aoi_per_slot;
  return out;
}

SymmetricBound lower_bound_symmetric(double p, int n) {
  if (!(p >= 0.0 && p < 1.0)) throw std::invalid_argument("p must lie in [0, 1)");
  if (n < 1) throw std::invalid_argument("sensor count must be >= 1");
  if (p == 0.0) return {1, 1.0};
  if (n == 1) return {std::nullopt, 1.0};

  const double target = 1.0 - 1.0 / n;
  int l = static_cast<int>(std::ceil(std::log(target) / std::log(p) - 1e-9));
  l = std::max(l, 1);
  // Guard the ceiling against rounding: N(1 - p^(L-1)) < 1 <= N(1 - p^L).
  while (l > 1 && n * (1.0 - std::pow(p, l - 1)) >= 1.0) --l;
  while (n * (1.0 - std::pow(p, l)) < 1.0) ++l;
  const double pl1 = std::pow(p, l - 1);
  return {l, (pl1 + 1.0 / n - 1.0) / (pl1 - std::pow(p, l))};
}

double random_policy_value(std::span<const ChainParams> sensors) {
  if (sensors.empty()) throw std::invalid_argument("random_policy_value needs at least one sensor");
  double sum = 0.0;
  for (const auto& s : sensors) sum += steady_expected_aoi(s);
  return sum / static_cast<double>(sensors.size());
}

double random_policy_value_uniform(double width) {
  if (!(width > 0.0 && width < 1.0)) {
    throw std::invalid_argument("interval width must lie in (0, 1), got " + std::to_string(width));
  }
  return std::log((1.0 + width) / (1.0 - width)) / width;
}

}  // namespace aoi
