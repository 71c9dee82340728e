#pragma once

#include <compare>
#include <limits>
#include <vector>

#include "aoi/belief.hpp"
#include "aoi/chain.hpp"

namespace aoi {

/// Elapsed-slot count at which an evolution branch is sampled, or never.
/// Never orders after every finite threshold.
class Threshold {
 public:
  static constexpr Threshold never() noexcept { return Threshold(kNever); }
  static Threshold after(int slots);

  constexpr bool finite() const noexcept { return slots_ != kNever; }
  /// Throws std::logic_error for never.
  int slots() const;

  friend constexpr auto operator<=>(Threshold, Threshold) = default;

 private:
  static constexpr int kNever = std::numeric_limits<int>::max();
  constexpr explicit Threshold(int slots) noexcept : slots_(slots) {}
  int slots_;
};

/// Sampling thresholds gamma_k for k = 1..M at a given eta.
struct ThresholdTable {
  double eta = 0.0;
  std::vector<Threshold> gamma;  // gamma[k-1]

  Threshold at(int k) const { return gamma.at(static_cast<std::size_t>(k - 1)); }
  bool all_finite() const noexcept;
  friend bool operator==(const ThresholdTable&, const ThresholdTable&) = default;
};

/// Closed-form thresholds by eta regime, with the phase-2 crossing obtained
/// through Lambert W0 and the phase-1 crossing through a logarithm.
ThresholdTable gamma_analytic(const ChainParams& params, double eta);

/// First i in 1..M-1 with expected AoI below eta, by direct evaluation.
ThresholdTable gamma_scan(const ChainParams& params, double eta);

/// Scan against a precomputed table (same result as gamma_scan).
ThresholdTable gamma_scan(const ExpectedAoiTable& table, double eta);

namespace detail {

/// Unrounded crossing point of the threshold formulas for branch k, or NaN
/// when the formulas do not place the crossing (gamma = 1, never, or a
/// degenerate branch).
double analytic_crossing(const ChainParams& params, int k, double eta);

}  // namespace detail
}  // namespace aoi
