#pragma once

#include <optional>
#include <span>

#include "aoi/chain.hpp"

namespace aoi {

/// Per-slot rates of one sensor under the proactive transmission policy:
/// transmit when AoI < L, with probability omega when AoI == L, never above.
struct ProactiveRates {
  double tx_per_slot = 0.0;
  double aoi_per_slot = 0.0;
};

/// Requires 1 <= L <= M and 0 < omega <= 1; throws std::invalid_argument.
ProactiveRates proactive_rates(const ChainParams& params, int threshold, double omega);

/// Proactive-policy lower bound on the sampled AoI of any policy.
struct LowerBoundResult {
  /// Empty when no finite L reaches one transmission per slot (a single
  /// sensor with p > 0); the bound is then the L -> infinity limit, 1/q.
  std::optional<int> l_star;
  double omega_star = 1.0;
  double l_b = 0.0;
};

LowerBoundResult lower_bound(std::span<const ChainParams> sensors);

struct SymmetricBound {
  std::optional<int> l_star;
  double omega_star = 1.0;
};

/// Closed-form L* and omega* for N sensors sharing failure probability p.
SymmetricBound lower_bound_symmetric(double p, int n);

/// Random sampling: (1/N) sum_n (1 - p_n^M) / (1 - p_n).
double random_policy_value(std::span<const ChainParams> sensors);

/// Random sampling averaged over failure probabilities drawn uniformly from
/// [1/2 - w/2, 1/2 + w/2], in the untruncated limit: (1/w) ln((1+w)/(1-w)).
double random_policy_value_uniform(double width);

}  // namespace aoi
