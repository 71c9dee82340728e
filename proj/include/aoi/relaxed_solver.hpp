#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "aoi/chain.hpp"
#include "aoi/threshold.hpp"

namespace aoi {

/// The renewal structure of one sensor under a fixed threshold table: after
/// observing AoI k the sensor is next sampled gamma_k slots later, observing
/// j with probability rows(k-1, j-1) and collecting expected AoI rewards(k-1).
struct RecurrenceSystem {
  ChainParams params;
  std::vector<int> gamma;   // gamma[k-1], all finite
  Eigen::MatrixXd rows;     // row k-1 = pi_{k, gamma_k}
  Eigen::VectorXd rewards;  // A(k, gamma_k)
};

/// Throws NumericalError when some branch has a never threshold: such a
/// branch is absorbing and the sensor's long-run sampling rate is zero.
RecurrenceSystem build_system(const ChainParams& params, const ThresholdTable& table);

/// Long-run samples per slot (d) and expected AoI collected per slot (R).
struct PerSensorRates {
  double d_bar = 0.0;
  double r_bar = 0.0;
};

/// Both rates from one factorization of the affine-solution system.
PerSensorRates solve_rates(const RecurrenceSystem& sys);
double sampling_rate(const RecurrenceSystem& sys);
double aoi_rate(const RecurrenceSystem& sys);

/// The coefficient matrix whose solution is [b(1) .. b(M-1), -alpha]:
/// columns 1..M-1 of (rows - I) followed by the gamma column.
Eigen::MatrixXd affine_system_matrix(const RecurrenceSystem& sys);

enum class RecurrenceKind { count, reward };

/// Exact evaluation of d(k, T) (count) or R(k, T) (reward) for every start k.
std::vector<double> iterate_recurrence(const RecurrenceSystem& sys, std::int64_t horizon,
                                       RecurrenceKind kind);

/// Rates of one sensor at a given eta; zero when the steady expected AoI is
/// not below eta (the sensor eventually stops being sampled).
PerSensorRates sensor_rates(const ChainParams& params, double eta);

/// Sum of per-sensor rates over the sensors active at eta.
struct AggregateRates {
  double d_hat = 0.0;
  double r_total = 0.0;
  std::vector<std::size_t> active;  // ordered by steady expected AoI, then index
};
AggregateRates aggregate_rates(std::span<const ChainParams> sensors, double eta);

/// d_hat is usually but not always non-decreasing in eta: lowering one
/// branch's threshold can make a slow branch likelier to be observed next.
struct SearchConfig {
  // Candidate sets up to this size are evaluated in full.
  std::size_t full_scan_limit = 512;
  // Beyond that, neighbours evaluated on each side of the bisection results.
  std::size_t local_window = 2;
  // Extra evenly spaced candidates evaluated to look for decreases of d_hat.
  int monotonicity_probes = 4;
};

struct EtaSolution {
  double eta_star = 0.0;
  double d_hat = 0.0;
  std::vector<std::size_t> active;
  double j_value = 0.0;
  bool monotone = true;         // no decrease of d_hat seen among evaluated candidates
  std::size_t evaluations = 0;  // distinct candidates evaluated
};

/// Picks eta minimizing |d_hat(eta) - 1| among the evaluated candidates. d_hat
/// is piecewise constant between consecutive attainable expected-AoI values,
/// so one representative per interval covers the search space. Ties prefer
/// the largest eta with d_hat <= 1, otherwise the smallest eta.
EtaSolution solve_eta(std::span<const ChainParams> sensors, const SearchConfig& search = {});

/// (1 / d_hat) times the summed collection rate of the active sensors.
/// Throws NumericalError when no sensor is active at eta_star.
double relaxed_performance(std::span<const ChainParams> sensors, double eta_star);

}  // namespace aoi
