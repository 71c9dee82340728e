#include "aoi/sim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "aoi/rng.hpp"

namespace aoi {
namespace {

constexpr int kBatches = 20;
constexpr double kStudentT19 = 2.093;  // two-sided 95%, 19 degrees of freedom

// Hidden AoI, beliefs and RNG streams of all sensors.
class SensorWorld {
 public:
  SensorWorld(std::span<const ChainParams> sensors, std::uint64_t seed) : sensors_(sensors) {
    const std::size_t n = sensors.size();
    tables_.reserve(n);
    streams_.reserve(n);
    for (std::size_t s = 0; s < n; ++s) {
      tables_.emplace_back(sensors[s]);
      streams_.emplace_back(derive_seed(seed, {1, s}));
      aoi_.push_back(draw_steady(sensors[s], streams_.back()));
      beliefs_.push_back(initial_branch(sensors[s]));
    }
    expected_.resize(n);
    sampled_.assign(n, 0);
  }

  std::size_t size() const noexcept { return sensors_.size(); }
  const std::vector<double>& expected() {
    for (std::size_t s = 0; s < sensors_.size(); ++s) expected_[s] = tables_[s](beliefs_[s]);
    return expected_;
  }

  // Delivers the AoI held at the end of the previous slot and resets the belief.
  SampleEvent sample(std::size_t s, std::uint64_t slot) {
    SampleEvent ev{slot, s, beliefs_[s], expected_[s], aoi_[s]};
    beliefs_[s] = {aoi_[s], 1};
    sampled_[s] = 1;
    return ev;
  }

  // Ages unsampled beliefs and advances every hidden AoI by one slot.
  void finish_slot() {
    for (std::size_t s = 0; s < sensors_.size(); ++s) {
      const int m = sensors_[s].m();
      if (sampled_[s]) {
        sampled_[s] = 0;
      } else if (beliefs_[s].i < m - 1) {
        ++beliefs_[s].i;
      }
      aoi_[s] = streams_[s].uniform() < sensors_[s].q() ? 1 : std::min(aoi_[s] + 1, m);
    }
  }

 private:
  static int draw_steady(const ChainParams& params, Rng& rng) {
    const double u = rng.uniform();
    double cdf = 0.0;
    double pk = 1.0;
    for (int a = 1; a < params.m(); ++a) {
      cdf += params.q() * pk;
      if (u < cdf) return a;
      pk *= params.p();
    }
    return params.m();
  }

  std::span<const ChainParams> sensors_;
  std::vector<ExpectedAoiTable> tables_;
  std::vector<Rng> streams_;
  std::vector<int> aoi_;
  std::vector<BranchState> beliefs_;
  std::vector<double> expected_;
  std::vector<char> sampled_;
};

struct Batch {
  double observed = 0.0;
  double expected = 0.0;
  double count = 0.0;
};

double half_width(const std::array<Batch, kBatches>& batches, double Batch::*field) {
  std::array<double, kBatches> ratios{};
  int used = 0;
  for (const auto& b : batches) {
    if (b.count > 0) ratios[used++] = b.*field / b.count;
  }
  if (used < 2) return 0.0;
  double mean = 0.0;
  for (int b = 0; b < used; ++b) mean += ratios[b];
  mean /= used;
  double var = 0.0;
  for (int b = 0; b < used; ++b) var += (ratios[b] - mean) * (ratios[b] - mean);
  var /= used - 1;
  return kStudentT19 * std::sqrt(var / used);
}

template <class Decide>
SimResult simulate(std::span<const ChainParams> sensors, std::uint64_t slots, std::uint64_t seed,
                   const SimOptions& options, Decide decide) {
  if (sensors.empty()) throw std::invalid_argument("simulation needs at least one sensor");
  if (slots < 1) throw std::invalid_argument("simulation horizon must be >= 1");

  int max_m = 0;
  for (const auto& s : sensors) max_m = std::max(max_m, s.m());
  const std::uint64_t burn_in =
      options.burn_in < 0 ? static_cast<std::uint64_t>(10 * max_m)
                          : static_cast<std::uint64_t>(options.burn_in);

  SensorWorld world(sensors, seed);
  Rng policy(derive_seed(seed, {0}));
  std::vector<std::size_t> picks;
  picks.reserve(sensors.size());

  SimResult r;
  r.per_sensor_samples.assign(sensors.size(), 0);
  r.slots = slots;
  r.seed = seed;
  std::array<Batch, kBatches> batches{};
  double sum_obs = 0.0;
  double sum_exp = 0.0;
  std::uint64_t count = 0;

  const std::uint64_t total = burn_in + slots;
  for (std::uint64_t t = 0; t < total; ++t) {
    picks.clear();
    decide(world.expected(), picks, policy);
    const bool measured = t >= burn_in;
    Batch* batch = measured ? &batches[(t - burn_in) * kBatches / slots] : nullptr;
    for (std::size_t s : picks) {
      const SampleEvent ev = world.sample(s, t);
      if (options.on_sample) options.on_sample(ev);
      if (!measured) continue;
      sum_obs += ev.observed;
      sum_exp += ev.expected;
      ++count;
      ++r.per_sensor_samples[s];
      batch->observed += ev.observed;
      batch->expected += ev.expected;
      batch->count += 1.0;
    }
    world.finish_slot();
  }

  const double n = static_cast<double>(count);
  r.samples_per_slot = n / static_cast<double>(slots);
  r.aoi_per_slot = sum_obs / static_cast<double>(slots);
  r.j_realized = count ? sum_obs / n : 0.0;
  r.j_expected = count ? sum_exp / n : 0.0;
  r.ci_realized = half_width(batches, &Batch::observed);
  r.ci_expected = half_width(batches, &Batch::expected);
  return r;
}

}  // namespace

SimResult run_random(std::span<const ChainParams> sensors, std::uint64_t slots, std::uint64_t seed,
                     const SimOptions& options) {
  return simulate(sensors, slots, seed, options,
                  [](const std::vector<double>& expected, std::vector<std::size_t>& picks,
                     Rng& rng) { picks.push_back(rng.below(expected.size())); });
}

SimResult run_greedy(std::span<const ChainParams> sensors, std::uint64_t slots, std::uint64_t seed,
                     const SimOptions& options) {
  return simulate(sensors, slots, seed, options,
                  [](const std::vector<double>& expected, std::vector<std::size_t>& picks, Rng&) {
                    const auto it = std::min_element(expected.begin(), expected.end());
                    picks.push_back(static_cast<std::size_t>(it - expected.begin()));
                  });
}

SimResult run_relaxed(std::span<const ChainParams> sensors, double eta, std::uint64_t slots,
                      std::uint64_t seed, const SimOptions& options) {
  if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
  return simulate(sensors, slots, seed, options,
                  [eta](const std::vector<double>& expected, std::vector<std::size_t>& picks,
                        Rng&) {
                    for (std::size_t s = 0; s < expected.size(); ++s) {
                      if (expected[s] < eta) picks.push_back(s);
                    }
                  });
}

}  // namespace aoi
