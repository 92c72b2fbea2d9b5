// SPDX-License-Identifier: Apache-2.0
//
// Shared scalar-templated dense types and physical constants.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>

namespace satmimo {

template <typename T>
using ComplexMatrix = Eigen::Matrix<std::complex<T>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename T>
using ComplexVector = Eigen::Matrix<std::complex<T>, Eigen::Dynamic, 1>;

template <typename T>
using RealVector = Eigen::Matrix<T, Eigen::Dynamic, 1>;

namespace constants {

inline constexpr double gravitational_constant = 6.674e-11;  // m^3 kg^-1 s^-2
inline constexpr double earth_mass_kg = 5.972e24;
inline constexpr double earth_radius_m = 6.371e6;
inline constexpr double speed_of_light_mps = 299792458.0;
inline constexpr double boltzmann_jpk = 1.380649e-23;
inline constexpr double earth_rotation_radps = 7.2921150e-5;  // sidereal rate

}  // namespace constants

/// A requested scenario cannot be realized (e.g. not enough visible satellites).
struct InfeasibleScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Requested sample precedes the causal warm-up horizon of a channel history.
struct WarmupError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace satmimo
