// SPDX-License-Identifier: Apache-2.0
//
// Multi-shell circular-orbit constellation propagation, visibility and
// nearest-cluster selection for a ground region.

#pragma once

#include "satmimo/types.hpp"

#include <vector>

namespace satmimo {

using EcefVector = Eigen::Vector3d;

/// One circular-orbit shell: `num_planes` equally spaced planes (RAAN spread
/// over 2*pi) with `sats_per_plane` equally phased satellites each.
struct OrbitalShell {
    int num_planes = 1;
    int sats_per_plane = 1;
    double altitude_m = 550e3;           // must lie in [400 km, 2000 km]
    double inclination_rad = 0.0;        // [0, pi]
    double raan_offset_rad = 0.0;        // RAAN of plane 0
    double phase_offset_rad = 0.0;       // anomaly of slot 0 in plane 0
    double interplane_phasing_rad = 0.0; // extra anomaly per plane index
};

struct ConstellationConfig {
    std::vector<OrbitalShell> shells;
    double epoch_s = 0.0;  // absolute-time offset applied to both orbit phase and Earth rotation

    int total_satellites() const;
};

/// Four-shell constellation used as the default scenario
/// (72x22 @550km/53deg, 36x20 @570km/70deg, 6x58 @560km/97.6deg, 72x22 @540km/53.2deg).
ConstellationConfig default_constellation();

struct SatelliteState {
    int id = 0;
    EcefVector position_m = EcefVector::Zero();
    // Orbital (inertial) velocity expressed in ECEF axes. The Earth-rotation
    // frame velocity is deliberately excluded so that |velocity_mps| equals
    // orbital_speed(altitude_m) exactly.
    EcefVector velocity_mps = EcefVector::Zero();
    double altitude_m = 0.0;
};

struct GroundUser {
    int id = 0;
    double latitude_rad = 0.0;
    double longitude_rad = 0.0;
    EcefVector position_m = EcefVector::Zero();
};

/// User on the spherical Earth surface at the given geodetic coordinates.
GroundUser make_ground_user(int id, double latitude_rad, double longitude_rad);

/// Great-circle displacement of `origin` by `arc_m` meters along `bearing_rad`
/// (clockwise from north). Used to scatter users inside a region.
GroundUser displace_ground_user(int id, const GroundUser& origin, double bearing_rad, double arc_m);

/// Nearest-first satellite cluster serving a ground region.
struct Cluster {
    std::vector<int> satellite_ids;  // non-decreasing distance to the region center
    double d_max_m = 0.0;            // max slant range over (cluster satellite, user) pairs
    double delay_s = 0.0;            // d_max_m / c
};

/// Circular-orbit speed sqrt(G*M_e / (R + altitude)). Altitude must be >= 0.
double orbital_speed(double altitude_m);

/// States of every satellite at simulation time `t_s` (absolute time is
/// epoch_s + t_s). Ids are assigned sequentially shell-by-shell.
std::vector<SatelliteState> propagate_constellation(const ConstellationConfig& config, double t_s);

/// Euclidean satellite-user distance.
double slant_range(const SatelliteState& sat, const GroundUser& user);

/// Angle between the local horizon plane at the user and the line of sight to
/// the satellite, in [-pi/2, pi/2].
double elevation_angle(const SatelliteState& sat, const GroundUser& user);

/// Ids (ascending) of satellites whose elevation is >= min_elevation_rad.
std::vector<int> visible_satellites(const std::vector<SatelliteState>& states,
                                    const GroundUser& ground, double min_elevation_rad);

/// The `cluster_size` visible satellites nearest to the region center,
/// nearest-first, ties broken by lower id. Throws InfeasibleScenarioError if
/// fewer are visible.
Cluster select_cluster(const std::vector<SatelliteState>& states, const GroundUser& region_center,
                       const std::vector<GroundUser>& users, int cluster_size,
                       double min_elevation_rad);

/// Angle in [0, pi] between the satellite velocity and the satellite-to-user
/// boresight; its cosine scales the line-of-sight Doppler shift.
double los_doppler_angle(const SatelliteState& sat, const GroundUser& user);

}  // namespace satmimo
