#include "aoi/chain.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace aoi {

ChainParams::ChainParams(double p, int m) : p_(p), m_(m) {
  if (!(p >= 0.0 && p < 1.0)) {
    throw std::invalid_argument("failure probability must lie in [0, 1), got " +
                                std::to_string(p));
  }
  if (m < 2) {
    throw std::invalid_argument("truncation size M must be >= 2, got " + std::to_string(m));
  }
}

TransitionMatrix build_transition(const ChainParams& params) {
  const int m = params.m();
  TransitionMatrix t = TransitionMatrix::Zero(m, m);
  for (int r = 0; r < m; ++r) {
    t(r, 0) = params.q();
    t(r, std::min(r + 1, m - 1)) += params.p();
  }
  return t;
}

Eigen::VectorXd steady_state(const ChainParams& params) {
  const int m = params.m();
  Eigen::VectorXd h(m);
  double pk = 1.0;
  for (int a = 0; a < m - 1; ++a) {
    h(a) = params.q() * pk;
    pk *= params.p();
  }
  h(m - 1) = pk;
  return h;
}

int step_aoi(const ChainParams& params, int aoi, double u) {
  if (aoi < 1 || aoi > params.m()) {
    throw std::out_of_range("AoI state " + std::to_string(aoi) + " outside 1.." +
                            std::to_string(params.m()));
  }
  if (u < params.q()) return 1;
  return std::min(aoi + 1, params.m());
}

}  // namespace aoi
