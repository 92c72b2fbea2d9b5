// SPDX-License-Identifier: Apache-2.0

#include "satmimo/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <unordered_map>

namespace satmimo {

namespace {

constexpr double kPi = std::numbers::pi;

void validate_shell(const OrbitalShell& shell) {
    if (shell.num_planes < 1 || shell.sats_per_plane < 1)
        throw std::invalid_argument("orbital shell: plane and per-plane counts must be >= 1");
    if (shell.altitude_m < 400e3 || shell.altitude_m > 2000e3)
        throw std::invalid_argument("orbital shell: altitude must lie in [400 km, 2000 km], got " +
                                    std::to_string(shell.altitude_m) + " m");
    if (shell.inclination_rad < 0.0 || shell.inclination_rad > kPi)
        throw std::invalid_argument("orbital shell: inclination must lie in [0, pi]");
}

}  // namespace

int ConstellationConfig::total_satellites() const {
    int total = 0;
    for (const auto& shell : shells) total += shell.num_planes * shell.sats_per_plane;
    return total;
}

ConstellationConfig default_constellation() {
    auto deg = [](double d) { return d * kPi / 180.0; };
    ConstellationConfig config;
    config.shells = {
        {72, 22, 550e3, deg(53.0)},
        {36, 20, 570e3, deg(70.0)},
        {6, 58, 560e3, deg(97.6)},
        {72, 22, 540e3, deg(53.2)},
    };
    return config;
}

GroundUser make_ground_user(int id, double latitude_rad, double longitude_rad) {
    const double r = constants::earth_radius_m;
    GroundUser user;
    user.id = id;
    user.latitude_rad = latitude_rad;
    user.longitude_rad = longitude_rad;
    user.position_m = r * EcefVector(std::cos(latitude_rad) * std::cos(longitude_rad),
                                     std::cos(latitude_rad) * std::sin(longitude_rad),
                                     std::sin(latitude_rad));
    return user;
}

GroundUser displace_ground_user(int id, const GroundUser& origin, double bearing_rad, double arc_m) {
    const double sigma = arc_m / constants::earth_radius_m;  // central angle
    const double lat0 = origin.latitude_rad;
    const double lat = std::asin(std::sin(lat0) * std::cos(sigma) +
                                 std::cos(lat0) * std::sin(sigma) * std::cos(bearing_rad));
    const double lon = origin.longitude_rad +
                       std::atan2(std::sin(bearing_rad) * std::sin(sigma) * std::cos(lat0),
                                  std::cos(sigma) - std::sin(lat0) * std::sin(lat));
    return make_ground_user(id, lat, lon);
}

double orbital_speed(double altitude_m) {
    if (altitude_m < 0.0) throw std::domain_error("orbital_speed: altitude must be non-negative");
    const double mu = constants::gravitational_constant * constants::earth_mass_kg;
    return std::sqrt(mu / (constants::earth_radius_m + altitude_m));
}

std::vector<SatelliteState> propagate_constellation(const ConstellationConfig& config, double t_s) {
    for (const auto& shell : config.shells) validate_shell(shell);

    std::vector<SatelliteState> states;
    states.reserve(static_cast<std::size_t>(config.total_satellites()));

    const double absolute_time = config.epoch_s + t_s;
    const Eigen::Matrix3d earth_rotation =
        Eigen::AngleAxisd(-constants::earth_rotation_radps * absolute_time,
                          Eigen::Vector3d::UnitZ())
            .toRotationMatrix();

    int id = 0;
    for (const auto& shell : config.shells) {
        const double radius = constants::earth_radius_m + shell.altitude_m;
        const double speed = orbital_speed(shell.altitude_m);
        const double mean_motion = speed / radius;  // rad/s, circular orbit

        for (int plane = 0; plane < shell.num_planes; ++plane) {
            const double raan = shell.raan_offset_rad + 2.0 * kPi * plane / shell.num_planes;
            const Eigen::Matrix3d plane_to_eci =
                (Eigen::AngleAxisd(raan, Eigen::Vector3d::UnitZ()) *
                 Eigen::AngleAxisd(shell.inclination_rad, Eigen::Vector3d::UnitX()))
                    .toRotationMatrix();

            for (int slot = 0; slot < shell.sats_per_plane; ++slot) {
                const double anomaly = shell.phase_offset_rad +
                                       2.0 * kPi * slot / shell.sats_per_plane +
                                       plane * shell.interplane_phasing_rad +
                                       mean_motion * absolute_time;
                const Eigen::Vector3d pos_plane(radius * std::cos(anomaly),
                                                radius * std::sin(anomaly), 0.0);
                const Eigen::Vector3d vel_plane(-speed * std::sin(anomaly),
                                                speed * std::cos(anomaly), 0.0);

                SatelliteState state;
                state.id = id++;
                state.position_m = earth_rotation * (plane_to_eci * pos_plane);
                state.velocity_mps = earth_rotation * (plane_to_eci * vel_plane);
                state.altitude_m = shell.altitude_m;
                states.push_back(state);
            }
        }
    }
    return states;
}

double slant_range(const SatelliteState& sat, const GroundUser& user) {
    return (sat.position_m - user.position_m).norm();
}

double elevation_angle(const SatelliteState& sat, const GroundUser& user) {
    const EcefVector to_sat = sat.position_m - user.position_m;
    const double range = to_sat.norm();
    if (range == 0.0) throw std::domain_error("elevation_angle: coincident positions");
    const EcefVector up = user.position_m.normalized();
    const double s = std::clamp(up.dot(to_sat) / range, -1.0, 1.0);
    return std::asin(s);
}

std::vector<int> visible_satellites(const std::vector<SatelliteState>& states,
                                    const GroundUser& ground, double min_elevation_rad) {
    std::vector<int> ids;
    for (const auto& state : states)
        if (elevation_angle(state, ground) >= min_elevation_rad) ids.push_back(state.id);
    std::sort(ids.begin(), ids.end());
    return ids;
}

Cluster select_cluster(const std::vector<SatelliteState>& states, const GroundUser& region_center,
                       const std::vector<GroundUser>& users, int cluster_size,
                       double min_elevation_rad) {
    if (cluster_size < 1) throw std::invalid_argument("select_cluster: cluster_size must be >= 1");
    if (users.empty()) throw std::invalid_argument("select_cluster: users must be non-empty");

    std::unordered_map<int, const SatelliteState*> by_id;
    by_id.reserve(states.size());
    for (const auto& state : states) by_id.emplace(state.id, &state);

    const std::vector<int> visible = visible_satellites(states, region_center, min_elevation_rad);
    if (static_cast<int>(visible.size()) < cluster_size)
        throw InfeasibleScenarioError("select_cluster: only " + std::to_string(visible.size()) +
                                      " satellites visible, need " + std::to_string(cluster_size));

    std::vector<std::pair<double, int>> ranked;
    ranked.reserve(visible.size());
    for (int id : visible) ranked.emplace_back(slant_range(*by_id.at(id), region_center), id);
    std::sort(ranked.begin(), ranked.end());  // distance, then id

    Cluster cluster;
    cluster.satellite_ids.reserve(static_cast<std::size_t>(cluster_size));
    for (int i = 0; i < cluster_size; ++i) cluster.satellite_ids.push_back(ranked[i].second);

    double d_max = 0.0;
    for (int id : cluster.satellite_ids)
        for (const auto& user : users) d_max = std::max(d_max, slant_range(*by_id.at(id), user));
    cluster.d_max_m = d_max;
    cluster.delay_s = d_max / constants::speed_of_light_mps;
    return cluster;
}

double los_doppler_angle(const SatelliteState& sat, const GroundUser& user) {
    const double speed = sat.velocity_mps.norm();
    if (speed == 0.0) throw std::domain_error("los_doppler_angle: zero satellite velocity");
    const EcefVector boresight = user.position_m - sat.position_m;
    const double range = boresight.norm();
    if (range == 0.0) throw std::domain_error("los_doppler_angle: coincident positions");
    const double c = std::clamp(sat.velocity_mps.dot(boresight) / (speed * range), -1.0, 1.0);
    return std::acos(c);
}

}  // namespace satmimo
