#pragma once

#include <optional>
#include <vector>

#include "aoi/chain.hpp"

namespace aoi {

/// Belief of one sensor summarized by its evolution branch: `k` is the AoI
/// observed at the last sample, `i` the slots elapsed since that sample.
/// From i = M-1 on the belief equals the steady state, so `i` saturates there.
struct BranchState {
  int k = 1;
  int i = 1;

  friend bool operator==(const BranchState&, const BranchState&) = default;
};

/// Belief held before any observation: the steady state.
BranchState initial_branch(const ChainParams& params);

/// pi_{k,i} = e_k T^i as a length-M vector (index a-1 holds Pr{AoI = a}).
std::vector<double> branch_belief(const ChainParams& params, BranchState s);

/// Expected AoI delivered if the sensor is sampled in branch state `s`:
/// (1-p^i)/(1-p) - p^i i + p^i min(i+k, M).
double expected_aoi(const ChainParams& params, BranchState s);

/// (1 - p^M) / (1 - p).
double steady_expected_aoi(const ChainParams& params);

enum class Action { rest, sample };

/// Belief transition after one slot. `observed` carries the sampled AoI and
/// must be present exactly when `action` is sample.
BranchState evolve(const ChainParams& params, BranchState s, Action action,
                   std::optional<int> observed = std::nullopt);

/// Precomputed expected AoI for every (k, i) with 1 <= k <= M, 1 <= i <= M-1.
class ExpectedAoiTable {
 public:
  explicit ExpectedAoiTable(const ChainParams& params);

  const ChainParams& params() const noexcept { return params_; }

  /// `i` beyond M-1 reads the steady value.
  double operator()(int k, int i) const noexcept {
    const int cols = params_.m() - 1;
    return values_[static_cast<std::size_t>(k - 1) * cols + (i < cols ? i : cols) - 1];
  }
  double operator()(BranchState s) const noexcept { return (*this)(s.k, s.i); }

  /// Every tabulated value, row-major by k.
  const std::vector<double>& values() const noexcept { return values_; }

 private:
  ChainParams params_;
  std::vector<double> values_;
};

}  // namespace aoi
