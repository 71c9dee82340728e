#pragma once

#include <Eigen/Dense>

namespace aoi {

/// Model of one sensor: per-slot sensing failure probability p and the
/// number of AoI states M kept after truncation (ages >= M share state M).
class ChainParams {
 public:
  /// Throws std::invalid_argument unless 0 <= p < 1 and m >= 2.
  ChainParams(double p, int m);

  double p() const noexcept { return p_; }
  double q() const noexcept { return 1.0 - p_; }
  int m() const noexcept { return m_; }

  friend bool operator==(const ChainParams&, const ChainParams&) = default;

 private:
  double p_;
  int m_;
};

/// Dense M x M transition matrix; entry (r, c) is the probability of moving
/// from AoI r+1 to AoI c+1.
using TransitionMatrix = Eigen::MatrixXd;

TransitionMatrix build_transition(const ChainParams& params);

/// Stationary distribution [q, qp, ..., qp^(M-2), p^(M-1)], 0-indexed by AoI-1.
Eigen::VectorXd steady_state(const ChainParams& params);

/// Advances the hidden AoI by one slot. `u` is a uniform draw in [0, 1):
/// sensing succeeds when u < q.
int step_aoi(const ChainParams& params, int aoi, double u);

}  // namespace aoi
