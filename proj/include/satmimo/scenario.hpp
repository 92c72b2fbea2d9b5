// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "satmimo/geometry.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace satmimo {

/// Full description of one simulation campaign. Defaults reproduce the
/// reference scenario: a 4236-satellite constellation serving ten users
/// scattered over a 50 km region in the Lake District, three carrier
/// frequencies with 2% fractional bandwidth, and a 1.9 ms CSI delay sampled
/// at 10 us.
struct ScenarioConfig {
    std::vector<double> frequencies_hz{1e8, 5e8, 1e9};
    double temperature_k = 280.0;
    int num_users = 10;
    double region_latitude_deg = 54.526;
    double region_longitude_deg = -3.300;
    double region_radius_m = 50e3;
    int array_x = 3;
    int array_y = 3;
    std::vector<int> cluster_sizes{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    double power_budget = 10.0;
    double sample_period_s = 1e-5;
    int n_delay = 190;
    bool geometric_delay = false;  // derive n_delay from the drop's d_max instead
    int moment_window = 100;
    int drops = 50;
    std::uint64_t seed = 1;
    double min_elevation_deg = 30.0;
    double cone_half_width_deg = 10.0;
    double max_excess_delay_s = 1e-6;
    double user_doppler_bound_hz = 0.0;
    double doppler_scale = 1.0;
    int solver_max_iterations = 100;
    bool with_single_satellite = false;
    int max_epoch_retries = 20;
    double epoch_range_s = 86400.0;
    ConstellationConfig constellation = default_constellation();

    int antennas_per_satellite() const { return array_x * array_y; }
    double min_elevation_rad() const;
    GroundUser region_center() const;
};

/// 2% fractional bandwidth.
double bandwidth_hz(double frequency_hz);

/// Thermal noise power K_B * T * BW in watts.
double noise_power_w(double frequency_hz, double temperature_k);

/// Throws std::invalid_argument naming the offending field.
void validate(const ScenarioConfig& config);

/// Strict JSON loader: every key must be known, unknown keys are rejected.
ScenarioConfig load_scenario(const std::filesystem::path& path);
void save_scenario(const ScenarioConfig& config, const std::filesystem::path& path);

}  // namespace satmimo
