// SPDX-License-Identifier: Apache-2.0
//
// Time-varying Rician satellite-to-ground MIMO channel synthesis: uniform
// planar array responses, per-link parameter randomization, sampled channel
// histories, delayed CSI estimates and delay-error moment statistics.

#pragma once

#include "satmimo/geometry.hpp"
#include "satmimo/types.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace satmimo {

/// Uniform planar array of m_x * m_y elements. Spacing defaults to half the
/// carrier wavelength.
template <typename T>
struct ArrayGeometry {
    int m_x = 1;
    int m_y = 1;
    T wavelength_m = T(1);
    T spacing_m = T(0.5);

    int size() const { return m_x * m_y; }
    T spacing_ratio() const { return spacing_m / wavelength_m; }
};

template <typename T>
ArrayGeometry<T> make_half_wavelength_array(int m_x, int m_y, T frequency_hz) {
    if (m_x < 1 || m_y < 1) throw std::invalid_argument("array geometry: element counts must be >= 1");
    if (frequency_hz <= T(0)) throw std::domain_error("array geometry: frequency must be positive");
    ArrayGeometry<T> geometry;
    geometry.m_x = m_x;
    geometry.m_y = m_y;
    geometry.wavelength_m = static_cast<T>(constants::speed_of_light_mps) / frequency_hz;
    geometry.spacing_m = geometry.wavelength_m / T(2);
    return geometry;
}

/// All per-link random parameters, frozen for the duration of one Monte Carlo
/// drop. Time enters the channel only through the Doppler exponentials.
template <typename T>
struct LinkParams {
    T rician_factor = T(85);           // linear ratio, drawn uniform in (80, 90]
    int num_nlos_paths = 2;            // drawn uniform in {2, ..., 7}
    T los_theta_rad = T(0);            // horizontal-direction angle of the LOS path
    T los_psi_rad = T(0);              // vertical-direction angle of the LOS path
    std::vector<T> nlos_theta_rad;
    std::vector<T> nlos_psi_rad;
    std::vector<std::complex<T>> nlos_gains;  // g_p ~ CN(0, 1)
    T los_delay_s = T(0);              // slant range / c
    std::vector<T> nlos_delays_s;      // >= los_delay_s
    T sat_doppler_hz = T(0);           // LOS satellite Doppler; shared by every NLOS path
    T user_doppler_hz = T(0);
    std::vector<T> nlos_user_doppler_hz;
    T distance_m = T(1);
};

/// Knobs for the randomized link-parameter draw.
template <typename T>
struct LinkRandomization {
    T cone_half_width_rad = static_cast<T>(10.0 * std::numbers::pi / 180.0);  // NLOS scatter cone
    T max_excess_delay_s = static_cast<T>(1e-6);                              // NLOS delay spread
    T user_doppler_bound_hz = T(0);                                           // 0 = static users
    T doppler_scale = T(1);                                                   // 0 forces a static channel
};

/// Free-space amplitude factor 4*pi*d*f/c; channel vectors are divided by it.
template <typename T>
T path_loss(T distance_m, T frequency_hz) {
    if (distance_m <= T(0) || frequency_hz <= T(0))
        throw std::domain_error("path_loss: distance and frequency must be positive");
    return T(4) * static_cast<T>(std::numbers::pi) * distance_m * frequency_hz /
           static_cast<T>(constants::speed_of_light_mps);
}

/// Unit-norm steering vector: entry k is exp(-j*2*pi*spacing_ratio*k*phi)/sqrt(n).
template <typename T>
ComplexVector<T> steering_vector(T phi, int n, T spacing_ratio = T(0.5)) {
    if (n < 1) throw std::invalid_argument("steering_vector: n must be >= 1");
    ComplexVector<T> a(n);
    const T scale = T(1) / std::sqrt(static_cast<T>(n));
    const T step = T(-2) * static_cast<T>(std::numbers::pi) * spacing_ratio * phi;
    for (int k = 0; k < n; ++k)
        a(k) = std::polar(scale, step * static_cast<T>(k));
    return a;
}

/// Planar-array response u(theta, psi) = a(cos(theta)sin(psi), m_x) (x) a(cos(psi), m_y).
/// The entry ordering is x-major: u[ix*m_y + iy].
template <typename T>
ComplexVector<T> array_response(T theta_rad, T psi_rad, const ArrayGeometry<T>& geometry) {
    const ComplexVector<T> ax =
        steering_vector<T>(std::cos(theta_rad) * std::sin(psi_rad), geometry.m_x, geometry.spacing_ratio());
    const ComplexVector<T> ay =
        steering_vector<T>(std::cos(psi_rad), geometry.m_y, geometry.spacing_ratio());
    ComplexVector<T> u(geometry.size());
    for (int ix = 0; ix < geometry.m_x; ++ix)
        u.segment(ix * geometry.m_y, geometry.m_y) = ax(ix) * ay;
    return u;
}

/// Line-of-sight component
///   sqrt(k/(1+k)) * exp(j*2*pi*t*(v_sat+v_user)) * exp(-j*2*pi*f*tau) * u(theta, psi).
template <typename T>
ComplexVector<T> los_component(const LinkParams<T>& link, const ArrayGeometry<T>& geometry,
                               T frequency_hz, T t_s) {
    const T kappa = link.rician_factor;
    const T amplitude = std::sqrt(kappa / (T(1) + kappa));
    const T phase = T(2) * static_cast<T>(std::numbers::pi) *
                        (t_s * (link.sat_doppler_hz + link.user_doppler_hz) -
                         frequency_hz * link.los_delay_s);
    return std::polar(amplitude, phase) *
           array_response<T>(link.los_theta_rad, link.los_psi_rad, geometry);
}

/// Scattered component: sqrt(1/(P(1+k))) * sum over paths of
///   g_p * exp(j*2*pi*t*(v_sat+v_user_p)) * exp(-j*2*pi*f*tau_p) * u(theta_p, psi_p).
/// Every path shares the LOS satellite Doppler.
template <typename T>
ComplexVector<T> nlos_component(const LinkParams<T>& link, const ArrayGeometry<T>& geometry,
                                T frequency_hz, T t_s) {
    const int paths = link.num_nlos_paths;
    if (paths < 1) throw std::invalid_argument("nlos_component: need at least one path");
    const T amplitude = std::sqrt(T(1) / (static_cast<T>(paths) * (T(1) + link.rician_factor)));
    ComplexVector<T> h = ComplexVector<T>::Zero(geometry.size());
    for (int p = 0; p < paths; ++p) {
        const T phase = T(2) * static_cast<T>(std::numbers::pi) *
                            (t_s * (link.sat_doppler_hz + link.nlos_user_doppler_hz[p]) -
                             frequency_hz * link.nlos_delays_s[p]);
        h += (link.nlos_gains[p] * std::polar(T(1), phase)) *
             array_response<T>(link.nlos_theta_rad[p], link.nlos_psi_rad[p], geometry);
    }
    return amplitude * h;
}

/// Full link vector (los + nlos) / path_loss(d, f).
template <typename T>
ComplexVector<T> channel_vector(const LinkParams<T>& link, const ArrayGeometry<T>& geometry,
                                T distance_m, T frequency_hz, T t_s) {
    return (los_component(link, geometry, frequency_hz, t_s) +
            nlos_component(link, geometry, frequency_hz, t_s)) /
           path_loss(distance_m, frequency_hz);
}

namespace detail {

/// Orthonormal array frame for a satellite whose boresight tracks a ground
/// target: returns (e1, e2, b) with b the unit satellite-to-target direction
/// and e1 aligned with the along-track component of the velocity.
inline std::array<Eigen::Vector3d, 3> array_frame(const SatelliteState& sat,
                                                  const EcefVector& target_m) {
    Eigen::Vector3d b = (target_m - sat.position_m).normalized();
    Eigen::Vector3d e1 = sat.velocity_mps - sat.velocity_mps.dot(b) * b;
    if (e1.norm() < 1e-9)  // velocity parallel to boresight; pick any transverse axis
        e1 = b.unitOrthogonal();
    else
        e1.normalize();
    const Eigen::Vector3d e2 = b.cross(e1);
    return {e1, e2, b};
}

/// Angles (theta, psi) such that the array direction cosines reproduce the
/// given unit direction in the array frame: cos(psi) = d.e2 and
/// cos(theta)sin(psi) = d.e1. Boresight maps to theta = psi = pi/2.
template <typename T>
std::pair<T, T> direction_to_array_angles(const Eigen::Vector3d& direction,
                                          const std::array<Eigen::Vector3d, 3>& frame) {
    const double d1 = direction.dot(frame[0]);
    const double d2 = direction.dot(frame[1]);
    const double psi = std::acos(std::clamp(d2, -1.0, 1.0));
    const double sin_psi = std::sqrt(std::max(0.0, 1.0 - d2 * d2));
    double theta = std::numbers::pi / 2.0;
    if (sin_psi > 1e-12) theta = std::acos(std::clamp(d1 / sin_psi, -1.0, 1.0));
    return {static_cast<T>(theta), static_cast<T>(psi)};
}

/// Uniform draw on the spherical cap of half-angle `half_width` around `axis`.
inline Eigen::Vector3d draw_cone_direction(std::mt19937_64& rng, const Eigen::Vector3d& axis,
                                           double half_width_rad) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double cos_gamma = 1.0 - unit(rng) * (1.0 - std::cos(half_width_rad));
    const double sin_gamma = std::sqrt(std::max(0.0, 1.0 - cos_gamma * cos_gamma));
    const double beta = 2.0 * std::numbers::pi * unit(rng);
    const Eigen::Vector3d t1 = axis.unitOrthogonal();
    const Eigen::Vector3d t2 = axis.cross(t1);
    return (cos_gamma * axis + sin_gamma * (std::cos(beta) * t1 + std::sin(beta) * t2)).normalized();
}

}  // namespace detail

/// Draws the full per-link parameter set for one satellite-user pair. The
/// array boresight points at `boresight_target_m` (the region center); LOS
/// angles are the satellite-to-user direction expressed in that frame, NLOS
/// angles are drawn in a cone around the LOS direction.
template <typename T>
LinkParams<T> draw_link_params(std::mt19937_64& rng, const SatelliteState& sat,
                               const GroundUser& user, const EcefVector& boresight_target_m,
                               T frequency_hz, const LinkRandomization<T>& knobs = {}) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    LinkParams<T> link;
    link.rician_factor = static_cast<T>(80.0 + 10.0 * unit(rng));
    link.num_nlos_paths = 2 + static_cast<int>(std::uniform_int_distribution<int>(0, 5)(rng));

    const auto frame = detail::array_frame(sat, boresight_target_m);
    const Eigen::Vector3d to_user = (user.position_m - sat.position_m).normalized();
    std::tie(link.los_theta_rad, link.los_psi_rad) =
        detail::direction_to_array_angles<T>(to_user, frame);

    link.distance_m = static_cast<T>(slant_range(sat, user));
    link.los_delay_s = link.distance_m / static_cast<T>(constants::speed_of_light_mps);

    const double omega = los_doppler_angle(sat, user);
    const double q = sat.velocity_mps.norm();
    link.sat_doppler_hz = static_cast<T>(knobs.doppler_scale * (q / constants::speed_of_light_mps) *
                                         static_cast<double>(frequency_hz) * std::cos(omega));
    link.user_doppler_hz =
        static_cast<T>(knobs.doppler_scale * knobs.user_doppler_bound_hz * (2.0 * unit(rng) - 1.0));

    const int paths = link.num_nlos_paths;
    link.nlos_theta_rad.resize(paths);
    link.nlos_psi_rad.resize(paths);
    link.nlos_gains.resize(paths);
    link.nlos_delays_s.resize(paths);
    link.nlos_user_doppler_hz.resize(paths);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int p = 0; p < paths; ++p) {
        const Eigen::Vector3d dir = detail::draw_cone_direction(
            rng, to_user, static_cast<double>(knobs.cone_half_width_rad));
        std::tie(link.nlos_theta_rad[p], link.nlos_psi_rad[p]) =
            detail::direction_to_array_angles<T>(dir, frame);
        link.nlos_gains[p] =
            std::complex<T>(static_cast<T>(gauss(rng) * inv_sqrt2), static_cast<T>(gauss(rng) * inv_sqrt2));
        link.nlos_delays_s[p] =
            link.los_delay_s + static_cast<T>(unit(rng)) * knobs.max_excess_delay_s;
        link.nlos_user_doppler_hz[p] =
            static_cast<T>(knobs.doppler_scale * knobs.user_doppler_bound_hz * (2.0 * unit(rng) - 1.0));
    }
    return link;
}

/// Time-ordered buffer of channel matrices sampled at a fixed period,
/// starting at sample index 0.
template <typename T>
struct ChannelHistory {
    std::vector<ComplexMatrix<T>> samples;
    T sample_period_s = static_cast<T>(1e-5);

    int size() const { return static_cast<int>(samples.size()); }
    const ComplexMatrix<T>& at(int n) const {
        if (n < 0 || n >= size())
            throw std::out_of_range("ChannelHistory: sample " + std::to_string(n) +
                                    " outside [0, " + std::to_string(size()) + ")");
        return samples[static_cast<std::size_t>(n)];
    }
};

template <typename T>
struct CsiEstimate {
    ComplexMatrix<T> matrix;  // equals the history entry n - n_delay
    int n_delay = 0;
};

/// First and second moments of the delay-induced CSI error. The second moment
/// is the full (num_sats*M) x (num_sats*M) matrix so cross-satellite blocks
/// are available to the robust precoder.
template <typename T>
struct UncertaintyStats {
    ComplexMatrix<T> mean;           // ML x K
    ComplexMatrix<T> second_moment;  // ML x ML, Hermitian
    int block_size = 1;              // M

    static UncertaintyStats zero(int rows, int cols, int block) {
        return {ComplexMatrix<T>::Zero(rows, cols), ComplexMatrix<T>::Zero(rows, rows), block};
    }

    auto mean_block(int l) const { return mean.middleRows(l * block_size, block_size); }
    auto second_moment_block(int l, int i) const {
        return second_moment.block(l * block_size, i * block_size, block_size, block_size);
    }

    UncertaintyStats scaled(T factor) const {
        return {mean * factor, second_moment * factor * factor, block_size};
    }
};

/// Assembles the sampled history G(n), n = 0..n_samples-1, by stacking the
/// per-satellite M x K blocks row-wise. `links` is satellite-major:
/// links[l * num_users + k] is the (satellite l, user k) parameter set.
template <typename T>
ChannelHistory<T> build_history(const std::vector<LinkParams<T>>& links, int num_sats,
                                int num_users, const ArrayGeometry<T>& geometry, T frequency_hz,
                                T sample_period_s, int n_samples) {
    if (num_sats < 1 || num_users < 1)
        throw std::invalid_argument("build_history: need at least one satellite and one user");
    if (static_cast<int>(links.size()) != num_sats * num_users)
        throw std::invalid_argument("build_history: links size must be num_sats * num_users");
    if (n_samples < 1) throw std::invalid_argument("build_history: n_samples must be >= 1");

    const int m = geometry.size();
    ChannelHistory<T> history;
    history.sample_period_s = sample_period_s;
    history.samples.reserve(static_cast<std::size_t>(n_samples));
    for (int n = 0; n < n_samples; ++n) {
        const T t = static_cast<T>(n) * sample_period_s;
        ComplexMatrix<T> g(num_sats * m, num_users);
        for (int l = 0; l < num_sats; ++l)
            for (int k = 0; k < num_users; ++k) {
                const auto& link = links[static_cast<std::size_t>(l * num_users + k)];
                g.block(l * m, k, m, 1) =
                    channel_vector(link, geometry, link.distance_m, frequency_hz, t);
            }
        history.samples.push_back(std::move(g));
    }
    return history;
}

/// Delayed CSI estimate: the channel as it was n_delay samples ago.
template <typename T>
CsiEstimate<T> delayed_estimate(const ChannelHistory<T>& history, int n, int n_delay) {
    if (n_delay < 0) throw std::invalid_argument("delayed_estimate: n_delay must be >= 0");
    if (n < n_delay)
        throw WarmupError("delayed_estimate: sample " + std::to_string(n) +
                          " precedes the delay horizon " + std::to_string(n_delay));
    return {history.at(n - n_delay), n_delay};
}

/// Sample mean and second moment of the delay error over the window of the
/// most recent W errors that are fully observable at time n. Error sample m
/// compares the delayed estimate of m with the channel at m, so causality
/// requires n >= 2*n_delay + window.
template <typename T>
UncertaintyStats<T> uncertainty_moments(const ChannelHistory<T>& history, int n, int n_delay,
                                        int window, int block_size) {
    if (window < 1) throw std::invalid_argument("uncertainty_moments: window must be >= 1");
    if (n_delay < 0) throw std::invalid_argument("uncertainty_moments: n_delay must be >= 0");
    if (n < 2 * n_delay + window)
        throw WarmupError("uncertainty_moments: need n >= 2*n_delay + window, got n = " +
                          std::to_string(n));

    const int rows = static_cast<int>(history.at(0).rows());
    const int cols = static_cast<int>(history.at(0).cols());
    UncertaintyStats<T> stats = UncertaintyStats<T>::zero(rows, cols, block_size);
    const T inv_w = T(1) / static_cast<T>(window);
    for (int m = n - n_delay - window + 1; m <= n - n_delay; ++m) {
        const ComplexMatrix<T> error = history.at(m - n_delay) - history.at(m);
        stats.mean += error;
        stats.second_moment.noalias() += error * error.adjoint();
    }
    stats.mean *= inv_w;
    stats.second_moment *= inv_w;
    return stats;
}

}  // namespace satmimo
