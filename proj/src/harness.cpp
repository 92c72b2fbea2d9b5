// SPDX-License-Identifier: Apache-2.0

#include "satmimo/harness.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>
#include <random>

namespace satmimo {

namespace {

/// Channel gain scale used to express the solver inputs in normalized units:
/// the root-mean per-satellite block energy, so the solver sees
/// ||Ghat_l||_F ~= 1 per satellite. The precoder then minimizes the symbol
/// error as seen behind a receiver gain of 1/gamma; SINRs and rates are
/// invariant under this re-parameterization, while the dual variables start
/// on the scale the unit initialization assumes.
double block_gain(const Eigen::MatrixXcd& g, int num_blocks) {
    const double gamma = std::sqrt(g.squaredNorm() / static_cast<double>(num_blocks));
    return gamma > 0.0 ? gamma : 1.0;
}

struct MethodInputs {
    Eigen::MatrixXcd g_hat;
    UncertaintyStats<double> stats;
};

CellResult solve_cell(Method method, int cluster_size, const MethodInputs& inputs,
                      const Eigen::MatrixXcd& g_true, double noise_power, double budget,
                      int max_iterations) {
    const double gamma = block_gain(inputs.g_hat, cluster_size);
    const Eigen::MatrixXcd g_hat = inputs.g_hat / gamma;
    const UncertaintyStats<double> stats = inputs.stats.scaled(1.0 / gamma);
    const double sigma2 = noise_power / (gamma * gamma);

    SolveOptions options;
    options.max_iterations = max_iterations;
    const auto budgets = PowerBudget<double>::uniform(cluster_size, budget);
    auto [v, report] = robust_precode<double>(g_hat, stats, budgets, sigma2, {}, options);

    CellResult cell;
    cell.method = method;
    cell.cluster_size = cluster_size;
    cell.rate_bits = sum_rate<double>(g_true / gamma, v.v, sigma2);
    cell.iterations = report.iterations;
    cell.converged = report.converged;
    cell.mse = mse_objective<double>(v.v, g_hat, stats, sigma2, static_cast<int>(g_hat.cols()));
    return cell;
}

std::uint64_t link_seed(std::uint64_t scene_seed, int satellite_id, int user_index) {
    return mix_seed(mix_seed(scene_seed, 0x6c696e6bULL + static_cast<std::uint64_t>(satellite_id)),
                    static_cast<std::uint64_t>(user_index) + 1);
}

LinkRandomization<double> link_knobs(const ScenarioConfig& config) {
    LinkRandomization<double> knobs;
    knobs.cone_half_width_rad = config.cone_half_width_deg * std::numbers::pi / 180.0;
    knobs.max_excess_delay_s = config.max_excess_delay_s;
    knobs.user_doppler_bound_hz = config.user_doppler_bound_hz;
    knobs.doppler_scale = config.doppler_scale;
    return knobs;
}

/// One parameter set per (cluster satellite, user), satellite-major, each
/// drawn from its own seed so prefixes and subsets are draw-for-draw stable.
std::vector<LinkParams<double>> draw_scene_links(const DropScene& scene,
                                                 const ScenarioConfig& config,
                                                 std::uint64_t scene_seed, double frequency_hz,
                                                 int num_sats) {
    const EcefVector& target = scene.boresight_target_m;
    std::vector<LinkParams<double>> links;
    links.reserve(static_cast<std::size_t>(num_sats) * scene.users.size());
    const auto knobs = link_knobs(config);
    for (int l = 0; l < num_sats; ++l) {
        const auto& sat = scene.cluster_states[static_cast<std::size_t>(l)];
        for (std::size_t k = 0; k < scene.users.size(); ++k) {
            std::mt19937_64 rng(link_seed(scene_seed, sat.id, static_cast<int>(k)));
            links.push_back(draw_link_params<double>(rng, sat, scene.users[k], target,
                                                     frequency_hz, knobs));
        }
    }
    return links;
}

}  // namespace

const char* to_string(Method method) {
    switch (method) {
        case Method::perfect: return "perfect";
        case Method::robust: return "robust";
        case Method::nonrobust: return "nonrobust";
    }
    return "unknown";
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) { return splitmix64(a ^ splitmix64(b)); }

std::uint64_t drop_seed(std::uint64_t master, int index) {
    return mix_seed(master, static_cast<std::uint64_t>(index) + 0x64726f70ULL);
}

DropScene make_drop_scene(const ScenarioConfig& config, std::uint64_t seed) {
    validate(config);
    std::mt19937_64 rng(mix_seed(seed, 0x7363656eULL));
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const GroundUser center = config.region_center();
    const int max_cluster = *std::max_element(config.cluster_sizes.begin(), config.cluster_sizes.end());

    for (int attempt = 0; attempt < config.max_epoch_retries; ++attempt) {
        DropScene scene;
        scene.epoch_s = unit(rng) * config.epoch_range_s;
        scene.boresight_target_m = center.position_m;
        scene.users.reserve(static_cast<std::size_t>(config.num_users));
        for (int k = 0; k < config.num_users; ++k) {
            const double arc = config.region_radius_m * std::sqrt(unit(rng));
            const double bearing = 2.0 * std::numbers::pi * unit(rng);
            scene.users.push_back(displace_ground_user(k, center, bearing, arc));
        }

        const auto states = propagate_constellation(config.constellation, scene.epoch_s);
        try {
            scene.cluster = select_cluster(states, center, scene.users, max_cluster,
                                           config.min_elevation_rad());
        } catch (const InfeasibleScenarioError& e) {
            std::cerr << "warning: drop resampled (attempt " << attempt + 1 << "): " << e.what()
                      << '\n';
            continue;
        }
        scene.cluster_states.reserve(scene.cluster.satellite_ids.size());
        for (int id : scene.cluster.satellite_ids)
            scene.cluster_states.push_back(states[static_cast<std::size_t>(id)]);
        return scene;
    }
    throw InfeasibleScenarioError("make_drop_scene: no feasible epoch after " +
                                  std::to_string(config.max_epoch_retries) + " attempts");
}

DropChannel build_drop_channel(const ScenarioConfig& config, double frequency_hz,
                               std::uint64_t seed) {
    DropChannel drop;
    drop.scene = make_drop_scene(config, seed);
    drop.n_delay =
        config.geometric_delay
            ? static_cast<int>(std::lround(drop.scene.cluster.delay_s / config.sample_period_s))
            : config.n_delay;
    drop.n_eval = 2 * drop.n_delay + config.moment_window;

    const int max_cluster = static_cast<int>(drop.scene.cluster_states.size());
    const auto geometry = make_half_wavelength_array<double>(config.array_x, config.array_y,
                                                             frequency_hz);
    const auto links = draw_scene_links(drop.scene, config, seed, frequency_hz, max_cluster);
    drop.history = build_history<double>(links, max_cluster, config.num_users, geometry,
                                         frequency_hz, config.sample_period_s, drop.n_eval + 1);
    return drop;
}

DropResult run_drop(const ScenarioConfig& config, double frequency_hz, std::uint64_t seed,
                    int drop_index) {
    const DropChannel drop = build_drop_channel(config, frequency_hz, seed);
    const int num_users = config.num_users;
    const int m = config.antennas_per_satellite();

    DropResult result;
    result.drop_index = drop_index;
    result.seed = seed;
    result.frequency_hz = frequency_hz;
    result.delay_s = drop.scene.cluster.delay_s;
    result.n_delay = drop.n_delay;

    const int n_eval = drop.n_eval;
    const auto& history = drop.history;
    const Eigen::MatrixXcd& g_now = history.at(n_eval);
    const Eigen::MatrixXcd g_delayed = delayed_estimate(history, n_eval, result.n_delay).matrix;
    const UncertaintyStats<double> stats =
        uncertainty_moments(history, n_eval, result.n_delay, config.moment_window, m);

    const double noise = noise_power_w(frequency_hz, config.temperature_k);
    const int max_cluster = static_cast<int>(drop.scene.cluster_states.size());
    for (int cluster_size : config.cluster_sizes) {
        if (cluster_size > max_cluster) continue;
        const int rows = cluster_size * m;
        const Eigen::MatrixXcd g_true = g_now.topRows(rows);
        const Eigen::MatrixXcd g_stale = g_delayed.topRows(rows);
        const UncertaintyStats<double> stats_sub{stats.mean.topRows(rows),
                                                 stats.second_moment.topLeftCorner(rows, rows), m};
        const auto zero = UncertaintyStats<double>::zero(rows, num_users, m);

        result.cells.push_back(solve_cell(Method::perfect, cluster_size, {g_true, zero}, g_true,
                                          noise, config.power_budget,
                                          config.solver_max_iterations));
        result.cells.push_back(solve_cell(Method::robust, cluster_size, {g_stale, stats_sub},
                                          g_true, noise, config.power_budget,
                                          config.solver_max_iterations));
        result.cells.push_back(solve_cell(Method::nonrobust, cluster_size, {g_stale, zero}, g_true,
                                          noise, config.power_budget,
                                          config.solver_max_iterations));
    }
    return result;
}

double single_satellite_baseline(const ScenarioConfig& config, double frequency_hz,
                                 std::uint64_t seed, int total_antennas) {
    if (total_antennas < 1)
        throw std::invalid_argument("single_satellite_baseline: total_antennas must be >= 1");
    // Most-square planar factorization m_x <= m_y.
    int m_x = static_cast<int>(std::sqrt(static_cast<double>(total_antennas)));
    while (total_antennas % m_x != 0) --m_x;
    const int m_y = total_antennas / m_x;

    const DropScene scene = make_drop_scene(config, seed);
    const auto geometry = make_half_wavelength_array<double>(m_x, m_y, frequency_hz);
    const auto& sat = scene.cluster_states.front();

    const int n_delay = config.geometric_delay
                            ? static_cast<int>(std::lround(scene.cluster.delay_s / config.sample_period_s))
                            : config.n_delay;
    const double t_eval = static_cast<double>(2 * n_delay + config.moment_window) *
                          config.sample_period_s;

    const EcefVector& target = scene.boresight_target_m;
    const auto knobs = link_knobs(config);
    Eigen::MatrixXcd g(total_antennas, config.num_users);
    for (int k = 0; k < config.num_users; ++k) {
        std::mt19937_64 rng(link_seed(seed, sat.id, k));
        const auto link = draw_link_params<double>(rng, sat, scene.users[static_cast<std::size_t>(k)],
                                                   target, frequency_hz, knobs);
        g.col(k) = channel_vector(link, geometry, link.distance_m, frequency_hz, t_eval);
    }

    const auto zero = UncertaintyStats<double>::zero(total_antennas, config.num_users, total_antennas);
    const CellResult cell = solve_cell(Method::perfect, 1, {g, zero}, g,
                                       noise_power_w(frequency_hz, config.temperature_k),
                                       config.power_budget, config.solver_max_iterations);
    return cell.rate_bits;
}

ResultsTable sweep(const ScenarioConfig& config) {
    validate(config);
    const int num_methods = 3;
    const Method methods[num_methods] = {Method::perfect, Method::robust, Method::nonrobust};

    ResultsTable table;
    for (double frequency : config.frequencies_hz) {
        // rates[L index][method] accumulated in drop order
        std::vector<std::vector<std::vector<double>>> rates(
            config.cluster_sizes.size(),
            std::vector<std::vector<double>>(num_methods));
        std::vector<double> single_rates;

        for (int d = 0; d < config.drops; ++d) {
            const std::uint64_t seed = drop_seed(config.seed, d);
            const DropResult drop = run_drop(config, frequency, seed, d);
            for (const auto& cell : drop.cells) {
                const auto it = std::find(config.cluster_sizes.begin(), config.cluster_sizes.end(),
                                          cell.cluster_size);
                const auto li = static_cast<std::size_t>(it - config.cluster_sizes.begin());
                rates[li][static_cast<int>(cell.method)].push_back(cell.rate_bits);
            }
            if (config.with_single_satellite) {
                const int total = config.antennas_per_satellite() *
                                  *std::max_element(config.cluster_sizes.begin(),
                                                    config.cluster_sizes.end());
                single_rates.push_back(single_satellite_baseline(config, frequency, seed, total));
            }
        }

        auto aggregate = [&](const std::vector<double>& samples) {
            double mean = 0.0;
            for (double r : samples) mean += r;
            mean /= static_cast<double>(samples.size());
            double var = 0.0;
            for (double r : samples) var += (r - mean) * (r - mean);
            const double stddev =
                samples.size() > 1 ? std::sqrt(var / static_cast<double>(samples.size() - 1)) : 0.0;
            return std::pair{mean, stddev};
        };

        for (std::size_t li = 0; li < config.cluster_sizes.size(); ++li)
            for (int mi = 0; mi < num_methods; ++mi) {
                if (rates[li][mi].empty()) continue;
                const auto [mean, stddev] = aggregate(rates[li][mi]);
                table.rows.push_back({frequency, config.cluster_sizes[li], to_string(methods[mi]),
                                      mean, stddev, static_cast<int>(rates[li][mi].size()),
                                      config.seed});
            }
        if (!single_rates.empty()) {
            const auto [mean, stddev] = aggregate(single_rates);
            table.rows.push_back({frequency,
                                  *std::max_element(config.cluster_sizes.begin(),
                                                    config.cluster_sizes.end()),
                                  "single_sat", mean, stddev, static_cast<int>(single_rates.size()),
                                  config.seed});
        }
    }
    return table;
}

}  // namespace satmimo
