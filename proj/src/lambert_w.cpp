#include "aoi/lambert_w.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace aoi {
namespace {

constexpr double kBranchSlack = 1e-12;
constexpr double kTolerance = 1e-12;
constexpr int kMaxIterations = 100;

double initial_guess(double z) {
  if (z < -0.25) {
    // Series around the branch point in r = sqrt(2(ez + 1)).
    const double r = std::sqrt(std::max(0.0, 2.0 * (std::numbers::e * z + 1.0)));
    return -1.0 + r * (1.0 + r * (-1.0 / 3.0 + r * (11.0 / 72.0)));
  }
  if (z < 3.0) return std::log1p(z) * (1.0 - std::log1p(std::log1p(z)) / (2.0 + std::log1p(z)));
  const double l = std::log(z);
  const double ll = std::log(l);
  return l - ll + ll / l;
}

// For very large z, iterate on w + ln w = ln z to keep e^w out of the picture.
double large_argument(double z) {
  const double lz = std::log(z);
  double w = initial_guess(z);
  for (int it = 0; it < kMaxIterations; ++it) {
    const double step = (w + std::log(w) - lz) * w / (w + 1.0);
    w -= step;
    if (std::abs(step) <= kTolerance * (1.0 + std::abs(w))) break;
  }
  return w;
}

}  // namespace

double lambert_w0(double z) {
  constexpr double kInvE = 1.0 / std::numbers::e;
  if (std::isnan(z) || z < -kInvE - kBranchSlack) {
    throw std::domain_error("lambert_w0 argument below -1/e: " + std::to_string(z));
  }
  if (z <= -kInvE) return -1.0;
  if (z == 0.0) return 0.0;
  if (std::isinf(z)) return z;
  if (z > 1e100) return large_argument(z);

  double w = initial_guess(z);
  for (int it = 0; it < kMaxIterations; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - z;
    const double wp1 = w + 1.0;
    if (wp1 == 0.0) break;
    const double step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
    w = std::max(w - step, -1.0);
    if (std::abs(step) <= kTolerance * (1.0 + std::abs(w))) break;
  }
  return w;
}

}  // namespace aoi
