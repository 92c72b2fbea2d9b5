// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: scenario sweeps, single drops, operation probes and
// the three-frequency reproduction preset.

#include "satmimo/harness.hpp"
#include "satmimo/results.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct Overrides {
    std::optional<std::string> config_path;
    std::optional<double> frequency_hz;
    std::optional<int> cluster_size;
    std::optional<int> num_users;
    std::optional<int> drops;
    std::optional<std::uint64_t> seed;
};

void add_override_options(CLI::App* cmd, Overrides& overrides) {
    cmd->add_option("--config", overrides.config_path, "Scenario JSON file (defaults built in)");
    cmd->add_option("--f", overrides.frequency_hz, "Restrict to a single carrier frequency [Hz]");
    cmd->add_option("--L", overrides.cluster_size, "Restrict to a single cluster size");
    cmd->add_option("--K", overrides.num_users, "Number of ground users");
    cmd->add_option("--drops", overrides.drops, "Monte Carlo drops per frequency");
    cmd->add_option("--seed", overrides.seed, "Master seed");
}

satmimo::ScenarioConfig resolve_config(const Overrides& overrides) {
    satmimo::ScenarioConfig config;
    if (overrides.config_path) config = satmimo::load_scenario(*overrides.config_path);
    if (overrides.frequency_hz) config.frequencies_hz = {*overrides.frequency_hz};
    if (overrides.cluster_size) config.cluster_sizes = {*overrides.cluster_size};
    if (overrides.num_users) config.num_users = *overrides.num_users;
    if (overrides.drops) config.drops = *overrides.drops;
    if (overrides.seed) config.seed = *overrides.seed;
    satmimo::validate(config);
    return config;
}

std::complex<double> json_complex(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 2)
        throw std::invalid_argument("complex entries must be [re, im] pairs");
    return {j[0].get<double>(), j[1].get<double>()};
}

Eigen::MatrixXcd json_matrix(const nlohmann::json& j, const std::string& name) {
    if (!j.is_array() || j.empty()) throw std::invalid_argument("'" + name + "' must be a matrix");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    Eigen::MatrixXcd matrix(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        if (static_cast<Eigen::Index>(j[r].size()) != cols)
            throw std::invalid_argument("'" + name + "' has ragged rows");
        for (Eigen::Index c = 0; c < cols; ++c) matrix(r, c) = json_complex(j[r][c]);
    }
    return matrix;
}

int run_sweep_command(const Overrides& overrides, const std::string& out_path,
                      bool with_single_satellite) {
    satmimo::ScenarioConfig config = resolve_config(overrides);
    if (with_single_satellite) config.with_single_satellite = true;
    const satmimo::ResultsTable table = satmimo::sweep(config);
    satmimo::emit_results(table, out_path);
    std::cout << "wrote " << out_path << " (" << table.rows.size() << " rows)\n";
    return 0;
}

int run_single_drop(const Overrides& overrides, int drop_index, const std::string& dump_path) {
    const satmimo::ScenarioConfig config = resolve_config(overrides);
    const std::uint64_t seed = satmimo::drop_seed(config.seed, drop_index);
    if (!dump_path.empty()) {
        const auto drop = satmimo::build_drop_channel(config, config.frequencies_hz.front(), seed);
        satmimo::dump_history(drop.history, dump_path);
        std::cout << "wrote " << dump_path << " (" << drop.history.size() << " samples)\n";
    }
    for (double frequency : config.frequencies_hz) {
        const satmimo::DropResult drop = satmimo::run_drop(config, frequency, seed, drop_index);
        std::printf("drop %d  f = %.3g Hz  T_d = %.4g ms  n_delay = %d\n", drop.drop_index,
                    frequency, drop.delay_s * 1e3, drop.n_delay);
        std::printf("%4s %-10s %12s %6s %10s %12s\n", "L", "method", "rate[bits]", "iters",
                    "converged", "mse");
        for (const auto& cell : drop.cells)
            std::printf("%4d %-10s %12.4f %6d %10s %12.4g\n", cell.cluster_size,
                        satmimo::to_string(cell.method), cell.rate_bits, cell.iterations,
                        cell.converged ? "yes" : "no", cell.mse);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distributed multi-satellite MIMO downlink precoding simulator"};
    app.require_subcommand(1);

    Overrides run_overrides;
    int drop_index = 0;
    std::string dump_path;
    auto* run_cmd = app.add_subcommand("run", "Simulate one Monte Carlo drop and print the cells");
    add_override_options(run_cmd, run_overrides);
    run_cmd->add_option("--drop", drop_index, "Drop index to simulate");
    run_cmd->add_option("--dump-history", dump_path,
                        "Also write the drop's sampled channel history as CSV");

    Overrides sweep_overrides;
    std::string sweep_out = "results.csv";
    bool sweep_single = false;
    auto* sweep_cmd = app.add_subcommand("sweep", "Run the drops x frequencies x cluster sweep");
    add_override_options(sweep_cmd, sweep_overrides);
    sweep_cmd->add_option("--out", sweep_out, "Output CSV path");
    sweep_cmd->add_flag("--single-satellite", sweep_single,
                        "Also evaluate the combined-array single-satellite baseline");

    auto* probe_cmd = app.add_subcommand("probe", "Evaluate one model quantity and print it");
    probe_cmd->require_subcommand(1);
    double probe_altitude = 550e3;
    auto* speed_cmd = probe_cmd->add_subcommand("orbital-speed", "Circular-orbit speed [m/s]");
    speed_cmd->add_option("--altitude", probe_altitude, "Altitude above the surface [m]")->required();
    double probe_distance = 550e3, probe_frequency = 1e9;
    auto* loss_cmd = probe_cmd->add_subcommand("path-loss", "Free-space amplitude factor");
    loss_cmd->add_option("--distance", probe_distance, "Distance [m]")->required();
    loss_cmd->add_option("--frequency", probe_frequency, "Carrier frequency [Hz]")->required();
    std::string probe_input;
    double probe_noise = 1.0;
    auto* rate_cmd = probe_cmd->add_subcommand(
        "sum-rate", "Sum rate of a channel/precoder pair given as JSON {channel, precoder}");
    rate_cmd->add_option("--input", probe_input, "JSON file with complex matrices")->required();
    rate_cmd->add_option("--noise", probe_noise, "Noise power");

    Overrides fig2_overrides;
    std::string fig2_out = "fig2_results.csv";
    auto* fig2_cmd = app.add_subcommand(
        "reproduce-fig2", "Three-frequency sweep with every default pinned; emits CSV + plot script");
    fig2_cmd->add_option("--seed", fig2_overrides.seed, "Master seed");
    fig2_cmd->add_option("--drops", fig2_overrides.drops, "Monte Carlo drops per frequency");
    fig2_cmd->add_option("--out", fig2_out, "Output CSV path");

    try {
        app.parse(argc, argv);

        if (*run_cmd) return run_single_drop(run_overrides, drop_index, dump_path);
        if (*sweep_cmd) return run_sweep_command(sweep_overrides, sweep_out, sweep_single);
        if (*fig2_cmd) return run_sweep_command(fig2_overrides, fig2_out, true);

        if (*speed_cmd) {
            std::printf("%.10g\n", satmimo::orbital_speed(probe_altitude));
            return 0;
        }
        if (*loss_cmd) {
            std::printf("%.10g\n", satmimo::path_loss(probe_distance, probe_frequency));
            return 0;
        }
        if (*rate_cmd) {
            std::ifstream in(probe_input);
            if (!in) throw std::runtime_error("cannot open " + probe_input);
            nlohmann::json j;
            in >> j;
            const Eigen::MatrixXcd g = json_matrix(j.at("channel"), "channel");
            const Eigen::MatrixXcd v = json_matrix(j.at("precoder"), "precoder");
            if (j.contains("noise_power")) probe_noise = j["noise_power"].get<double>();
            std::printf("%.10g\n", satmimo::sum_rate<double>(g, v, probe_noise));
            return 0;
        }
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return 0;
}
