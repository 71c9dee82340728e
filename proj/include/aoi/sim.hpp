#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "aoi/belief.hpp"
#include "aoi/chain.hpp"

namespace aoi {

/// One delivery seen by the access point.
struct SampleEvent {
  std::uint64_t slot = 0;
  std::size_t sensor = 0;
  BranchState belief;    // belief the decision was based on
  double expected = 0;   // expected AoI under that belief
  int observed = 0;      // AoI held by the sensor at the end of the previous slot
};

struct SimOptions {
  /// Slots simulated before measurement starts; negative means 10 * max M.
  std::int64_t burn_in = -1;
  /// Called for every sample, including those during burn-in.
  std::function<void(const SampleEvent&)> on_sample;
};

/// Averages over the measured horizon. The ratio estimators are per
/// delivery; for one-sample-per-slot policies they equal per-slot averages.
struct SimResult {
  double j_realized = 0.0;        // observed AoI per delivery
  double j_expected = 0.0;        // expected AoI at the decision per delivery
  double samples_per_slot = 0.0;
  double aoi_per_slot = 0.0;      // observed AoI summed over deliveries, per slot
  double ci_realized = 0.0;       // 95% batch-means half-width of j_realized
  double ci_expected = 0.0;       // same for j_expected
  std::vector<std::uint64_t> per_sensor_samples;
  std::uint64_t slots = 0;
  std::uint64_t seed = 0;
};

/// Samples one uniformly chosen sensor per slot.
SimResult run_random(std::span<const ChainParams> sensors, std::uint64_t slots,
                     std::uint64_t seed, const SimOptions& options = {});

/// Samples the sensor with the smallest expected AoI; ties go to the lowest index.
SimResult run_greedy(std::span<const ChainParams> sensors, std::uint64_t slots,
                     std::uint64_t seed, const SimOptions& options = {});

/// Samples every sensor whose expected AoI is below eta (zero or more per slot).
SimResult run_relaxed(std::span<const ChainParams> sensors, double eta, std::uint64_t slots,
                      std::uint64_t seed, const SimOptions& options = {});

}  // namespace aoi
