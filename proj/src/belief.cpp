#include "aoi/belief.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace aoi {
namespace {

void check_branch(const ChainParams& params, BranchState s) {
  if (s.k < 1 || s.k > params.m() || s.i < 1) {
    throw std::out_of_range("branch state (k=" + std::to_string(s.k) + ", i=" +
                            std::to_string(s.i) + ") invalid for M=" +
                            std::to_string(params.m()));
  }
}

}  // namespace

BranchState initial_branch(const ChainParams& params) { return {1, params.m() - 1}; }

std::vector<double> branch_belief(const ChainParams& params, BranchState s) {
  check_branch(params, s);
  const int m = params.m();
  const int i = std::min(s.i, m - 1);
  std::vector<double> pi(m, 0.0);
  double pk = 1.0;
  for (int a = 0; a < i; ++a) {
    pi[a] = params.q() * pk;
    pk *= params.p();
  }
  pi[std::min(i + s.k, m) - 1] += pk;
  return pi;
}

double expected_aoi(const ChainParams& params, BranchState s) {
  check_branch(params, s);
  const int m = params.m();
  if (s.i >= m - 1) return steady_expected_aoi(params);
  const int i = s.i;
  const double p = params.p();
  const double pi = std::pow(p, i);
  return (1.0 - pi) / (1.0 - p) - pi * i + pi * std::min(i + s.k, m);
}

double steady_expected_aoi(const ChainParams& params) {
  const double p = params.p();
  return (1.0 - std::pow(p, params.m())) / (1.0 - p);
}

BranchState evolve(const ChainParams& params, BranchState s, Action action,
                   std::optional<int> observed) {
  check_branch(params, s);
  if (action == Action::sample) {
    if (!observed) throw std::logic_error("sample action requires an observed AoI");
    if (*observed < 1 || *observed > params.m()) {
      throw std::out_of_range("observed AoI " + std::to_string(*observed) + " outside 1..M");
    }
    return {*observed, 1};
  }
  if (observed) throw std::logic_error("rest action cannot carry an observation");
  return {s.k, std::min(s.i + 1, params.m() - 1)};
}

ExpectedAoiTable::ExpectedAoiTable(const ChainParams& params) : params_(params) {
  const int m = params.m();
  values_.reserve(static_cast<std::size_t>(m) * (m - 1));
  for (int k = 1; k <= m; ++k) {
    for (int i = 1; i <= m - 1; ++i) values_.push_back(expected_aoi(params, {k, i}));
  }
}

}  // namespace aoi
