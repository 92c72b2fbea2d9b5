// SPDX-License-Identifier: Apache-2.0

#include "satmimo/geometry.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace satmimo;

namespace {

constexpr double kPi = std::numbers::pi;

// Independent evaluation of sqrt(G*M_e/(R+h)) with the fixed constants.
double orbital_speed_oracle(double altitude_m) {
    return std::sqrt(6.674e-11 * 5.972e24 / (6.371e6 + altitude_m));
}

SatelliteState satellite_above(const GroundUser& user, double altitude_m) {
    SatelliteState sat;
    sat.id = 0;
    sat.position_m = user.position_m * (1.0 + altitude_m / user.position_m.norm());
    sat.altitude_m = altitude_m;
    const EcefVector up = user.position_m.normalized();
    sat.velocity_mps = orbital_speed(altitude_m) * up.unitOrthogonal();
    return sat;
}

}  // namespace

TEST_CASE("orbital speed matches the closed-form oracle") {
    CHECK(orbital_speed(0.0) == doctest::Approx(orbital_speed_oracle(0.0)).epsilon(1e-12));
    CHECK(orbital_speed(0.0) == doctest::Approx(7.91e3).epsilon(1e-3));
    CHECK(orbital_speed(550e3) == doctest::Approx(orbital_speed_oracle(550e3)).epsilon(1e-12));
    CHECK(orbital_speed(550e3) == doctest::Approx(7.589e3).epsilon(1e-3));
    CHECK_THROWS_AS(orbital_speed(-1.0), std::domain_error);
}

TEST_CASE("orbital speed strictly decreases with altitude") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> alt(0.0, 2.0 * 6.371e6);
    for (int i = 0; i < 200; ++i) {
        double a1 = alt(rng), a2 = alt(rng);
        if (a1 == a2) continue;
        if (a1 > a2) std::swap(a1, a2);
        CHECK(orbital_speed(a1) > orbital_speed(a2));
    }
}

TEST_CASE("constellation propagation produces 4236 valid states") {
    const auto config = default_constellation();
    CHECK(config.total_satellites() == 4236);
    const auto states = propagate_constellation(config, 123.0);
    REQUIRE(states.size() == 4236);

    for (std::size_t i = 0; i < states.size(); i += 97) {
        const auto& s = states[i];
        const double radius = 6.371e6 + s.altitude_m;
        CHECK(std::abs(s.position_m.norm() - radius) / radius < 1e-6);
        const double speed = orbital_speed(s.altitude_m);
        CHECK(std::abs(s.velocity_mps.norm() - speed) / speed < 1e-6);
        // Circular-orbit orthogonality; preserved by the frame rotation.
        CHECK(std::abs(s.position_m.dot(s.velocity_mps)) /
                  (s.position_m.norm() * s.velocity_mps.norm()) <
              1e-9);
    }
}

TEST_CASE("one orbital period returns a shell to its inertial position") {
    ConstellationConfig config;
    config.shells = {{3, 4, 550e3, 53.0 * kPi / 180.0}};
    const double radius = 6.371e6 + 550e3;
    const double period = 2.0 * kPi * radius / orbital_speed(550e3);

    const auto before = propagate_constellation(config, 10.0);
    const auto after = propagate_constellation(config, 10.0 + period);
    REQUIRE(before.size() == after.size());

    // Undo Earth rotation to compare inertial positions.
    const Eigen::Matrix3d unrotate =
        Eigen::AngleAxisd(constants::earth_rotation_radps * period, Eigen::Vector3d::UnitZ())
            .toRotationMatrix();
    for (std::size_t i = 0; i < before.size(); ++i) {
        const EcefVector recovered = unrotate * after[i].position_m;
        CHECK((recovered - before[i].position_m).norm() < 1e-3 * radius);
        CHECK((after[i].position_m - before[i].position_m).norm() > 1.0);  // ECEF differs
    }
}

TEST_CASE("elevation angle covers zenith, horizon and a generic oracle") {
    const GroundUser user = make_ground_user(0, 0.4, -1.1);

    SUBCASE("zenith satellite") {
        const auto sat = satellite_above(user, 550e3);
        CHECK(elevation_angle(sat, user) == doctest::Approx(kPi / 2).epsilon(1e-6));
    }
    SUBCASE("satellite in the horizon plane") {
        SatelliteState sat;
        sat.position_m = user.position_m + 700e3 * user.position_m.normalized().unitOrthogonal();
        CHECK(elevation_angle(sat, user) == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("generic geometry against a dot-product oracle") {
        const GroundUser origin = make_ground_user(0, 0.0, 0.0);
        SatelliteState sat;
        sat.position_m = (6.371e6 + 550e3) *
                         EcefVector(std::cos(5.0 * kPi / 180.0), std::sin(5.0 * kPi / 180.0), 0.0);
        const EcefVector d = sat.position_m - origin.position_m;
        const double expected = std::asin(origin.position_m.normalized().dot(d.normalized()));
        CHECK(elevation_angle(sat, origin) == doctest::Approx(expected).epsilon(1e-12));
    }
    SUBCASE("coincident positions are a domain error") {
        SatelliteState sat;
        sat.position_m = user.position_m;
        CHECK_THROWS_AS(elevation_angle(sat, user), std::domain_error);
    }
}

TEST_CASE("visible satellites: subset semantics and order invariance") {
    const GroundUser user = make_ground_user(0, 54.526 * kPi / 180.0, -3.3 * kPi / 180.0);

    SUBCASE("empty constellation") {
        CHECK(visible_satellites({}, user, 0.5).empty());
    }
    SUBCASE("zenith satellite survives a near-90-degree threshold") {
        std::vector<SatelliteState> states{satellite_above(user, 550e3)};
        SatelliteState low;
        low.id = 1;
        low.position_m = user.position_m + 900e3 * user.position_m.normalized().unitOrthogonal();
        states.push_back(low);
        const auto ids = visible_satellites(states, user, kPi / 2 - 1e-6);
        REQUIRE(ids.size() == 1);
        CHECK(ids[0] == 0);
    }
    SUBCASE("input ordering does not matter") {
        auto states = propagate_constellation(default_constellation(), 3600.0);
        const auto ids = visible_satellites(states, user, 30.0 * kPi / 180.0);
        std::mt19937_64 rng(3);
        std::shuffle(states.begin(), states.end(), rng);
        CHECK(visible_satellites(states, user, 30.0 * kPi / 180.0) == ids);
        for (int id : ids) CHECK(id < 4236);
    }
}

TEST_CASE("cluster selection orders by distance and computes the delay") {
    const GroundUser center = make_ground_user(0, 0.9, 0.2);

    SUBCASE("single zenith satellite") {
        const std::vector<SatelliteState> states{satellite_above(center, 550e3)};
        const Cluster cluster = select_cluster(states, center, {center}, 1, 0.0);
        CHECK(cluster.d_max_m == doctest::Approx(550e3).epsilon(1e-9));
        CHECK(cluster.delay_s == doctest::Approx(550e3 / 299792458.0).epsilon(1e-12));
        CHECK(cluster.delay_s == doctest::Approx(1.83e-3).epsilon(1e-2));
    }
    SUBCASE("nearest-first ordering over the full constellation") {
        const auto states = propagate_constellation(default_constellation(), 7200.0);
        const GroundUser lake = make_ground_user(0, 54.526 * kPi / 180.0, -3.3 * kPi / 180.0);
        const Cluster cluster = select_cluster(states, lake, {lake}, 10, 30.0 * kPi / 180.0);
        REQUIRE(cluster.satellite_ids.size() == 10);
        double previous = 0.0;
        for (int id : cluster.satellite_ids) {
            const double d = slant_range(states[static_cast<std::size_t>(id)], lake);
            CHECK(d >= previous);
            previous = d;
        }
        CHECK(cluster.delay_s == doctest::Approx(cluster.d_max_m / 299792458.0).epsilon(1e-15));
    }
    SUBCASE("insufficient visibility raises the infeasibility error") {
        const std::vector<SatelliteState> states{satellite_above(center, 550e3)};
        CHECK_THROWS_AS(select_cluster(states, center, {center}, 2, 0.0), InfeasibleScenarioError);
    }
    SUBCASE("equidistant ties break toward the lower id") {
        auto a = satellite_above(center, 550e3);
        auto b = a;
        a.id = 4;
        b.id = 2;
        const Cluster cluster = select_cluster({a, b}, center, {center}, 2, 0.0);
        CHECK(cluster.satellite_ids == std::vector<int>{2, 4});
    }
}

TEST_CASE("slant range matches the Euclidean oracle") {
    const GroundUser user = make_ground_user(0, -0.3, 2.2);
    SatelliteState sat = satellite_above(user, 550e3);
    CHECK(slant_range(sat, user) == doctest::Approx(550e3).epsilon(1e-9));

    sat.position_m = EcefVector(1.0e6, -2.0e6, 3.5e6);
    const EcefVector d = sat.position_m - user.position_m;
    const double expected = std::sqrt(d.x() * d.x() + d.y() * d.y() + d.z() * d.z());
    CHECK(slant_range(sat, user) == doctest::Approx(expected).epsilon(1e-14));

    SatelliteState coincident;
    coincident.position_m = user.position_m;
    CHECK(slant_range(coincident, user) == 0.0);
}

TEST_CASE("line-of-sight Doppler angle") {
    const GroundUser user = make_ground_user(0, 0.1, 0.1);
    SatelliteState sat = satellite_above(user, 550e3);

    // Velocity orthogonal to the boresight by construction of satellite_above.
    CHECK(los_doppler_angle(sat, user) == doctest::Approx(kPi / 2).epsilon(1e-9));

    sat.velocity_mps = (user.position_m - sat.position_m).normalized() * 7.5e3;
    CHECK(los_doppler_angle(sat, user) == doctest::Approx(0.0).epsilon(1e-9));

    std::mt19937_64 rng(11);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int i = 0; i < 20; ++i) {
        sat.velocity_mps = EcefVector(gauss(rng), gauss(rng), gauss(rng)) * 7.5e3;
        const EcefVector b = user.position_m - sat.position_m;
        const double expected =
            std::acos(sat.velocity_mps.dot(b) / (sat.velocity_mps.norm() * b.norm()));
        CHECK(los_doppler_angle(sat, user) == doctest::Approx(expected).epsilon(1e-12));
        CHECK(los_doppler_angle(sat, user) >= 0.0);
        CHECK(los_doppler_angle(sat, user) <= kPi);
    }

    sat.velocity_mps.setZero();
    CHECK_THROWS_AS(los_doppler_angle(sat, user), std::domain_error);
}

TEST_CASE("visibility over the service region is of order tens of satellites") {
    const GroundUser lake = make_ground_user(0, 54.526 * kPi / 180.0, -3.3 * kPi / 180.0);
    const auto config = default_constellation();
    int max_count = 0;
    for (int i = 0; i < 12; ++i) {
        const auto states = propagate_constellation(config, 600.0 * i);
        const auto ids = visible_satellites(states, lake, 30.0 * kPi / 180.0);
        max_count = std::max(max_count, static_cast<int>(ids.size()));
    }
    CHECK(max_count >= 15);
    CHECK(max_count <= 150);
}
