// SPDX-License-Identifier: Apache-2.0
//
// Seeded Monte Carlo drops comparing the robust precoder against the
// non-robust and perfect-CSI baselines, plus the single-satellite reference.

#pragma once

#include "satmimo/channel.hpp"
#include "satmimo/geometry.hpp"
#include "satmimo/precoder.hpp"
#include "satmimo/scenario.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace satmimo {

enum class Method { perfect, robust, nonrobust };

const char* to_string(Method method);

/// splitmix64 finalizer; basis of all seed derivation.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);
/// Seed of drop `index` under `master`. Independent of execution order.
std::uint64_t drop_seed(std::uint64_t master, int index);

/// Frequency-independent part of a drop: epoch, users, and the selected
/// cluster with the per-satellite states in cluster order.
struct DropScene {
    double epoch_s = 0.0;
    std::vector<GroundUser> users;
    Cluster cluster;
    std::vector<SatelliteState> cluster_states;  // cluster order, nearest first
    EcefVector boresight_target_m = EcefVector::Zero();  // region center, array pointing target
};

/// Draws epoch and users until the requested cluster is feasible (bounded
/// retries). Deterministic in (config, seed).
DropScene make_drop_scene(const ScenarioConfig& config, std::uint64_t seed);

/// Scene plus the sampled channel realization of one drop.
struct DropChannel {
    DropScene scene;
    int n_delay = 0;
    int n_eval = 0;  // evaluation sample index, 2*n_delay + moment window
    ChannelHistory<double> history;
};

/// Builds the channel history exactly as run_drop consumes it; exposed for
/// debugging dumps and inspection.
DropChannel build_drop_channel(const ScenarioConfig& config, double frequency_hz,
                               std::uint64_t seed);

struct CellResult {
    Method method = Method::perfect;
    int cluster_size = 0;
    double rate_bits = 0.0;  // sum rate on the true channel at the evaluation instant
    int iterations = 0;
    bool converged = false;
    double mse = 0.0;        // objective value at the solution, gain-normalized units
};

struct DropResult {
    int drop_index = 0;
    std::uint64_t seed = 0;
    double frequency_hz = 0.0;
    double delay_s = 0.0;  // d_max / c of the full cluster
    int n_delay = 0;
    std::vector<CellResult> cells;
};

/// One Monte Carlo drop at one carrier frequency: synthesizes the channel
/// history for the largest requested cluster, then for every cluster size
/// solves the three methods on the nearest-first prefix and rates them on the
/// true channel.
DropResult run_drop(const ScenarioConfig& config, double frequency_hz, std::uint64_t seed,
                    int drop_index = 0);

/// Perfect-CSI rate of the nearest satellite carrying `total_antennas`
/// elements (most-square planar layout) under the per-satellite power budget.
/// Shares the drop scene and link draws with run_drop, so with
/// total_antennas == antennas_per_satellite it reproduces the cluster-size-1
/// perfect-CSI cell exactly.
double single_satellite_baseline(const ScenarioConfig& config, double frequency_hz,
                                 std::uint64_t seed, int total_antennas);

struct ResultsRow {
    double frequency_hz = 0.0;
    int cluster_size = 0;
    std::string method;
    double mean_rate_bits = 0.0;
    double std_rate_bits = 0.0;
    int n_drops = 0;
    std::uint64_t seed = 0;
};

struct ResultsTable {
    std::vector<ResultsRow> rows;
};

/// Full campaign: drops x frequencies x cluster sizes x methods, aggregated
/// in drop-index order. Drop seeds are shared across frequencies (common
/// random numbers). Appends one single-satellite row per frequency when the
/// config requests it.
ResultsTable sweep(const ScenarioConfig& config);

}  // namespace satmimo
