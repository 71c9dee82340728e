#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace aoi {

/// Seed for an independent stream identified by `path` under `master`
/// (SplitMix64 mixing of each path component).
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform integer in [0, n).
  std::size_t below(std::size_t n);
  double normal(double mean, double sd);

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace aoi
