// SPDX-License-Identifier: Apache-2.0

#include "satmimo/scenario.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

namespace satmimo {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

void reject_unknown_keys(const nlohmann::json& object, const std::set<std::string>& known,
                         const std::string& context) {
    for (const auto& item : object.items())
        if (!known.contains(item.key()))
            throw std::invalid_argument("scenario: unknown key '" + item.key() + "' in " + context);
}

OrbitalShell shell_from_json(const nlohmann::json& j) {
    reject_unknown_keys(j,
                        {"num_planes", "sats_per_plane", "altitude_m", "inclination_deg",
                         "raan_offset_deg", "phase_offset_deg", "interplane_phasing_deg"},
                        "constellation shell");
    OrbitalShell shell;
    shell.num_planes = j.at("num_planes").get<int>();
    shell.sats_per_plane = j.at("sats_per_plane").get<int>();
    shell.altitude_m = j.at("altitude_m").get<double>();
    shell.inclination_rad = j.at("inclination_deg").get<double>() * kDegToRad;
    if (j.contains("raan_offset_deg")) shell.raan_offset_rad = j["raan_offset_deg"].get<double>() * kDegToRad;
    if (j.contains("phase_offset_deg")) shell.phase_offset_rad = j["phase_offset_deg"].get<double>() * kDegToRad;
    if (j.contains("interplane_phasing_deg"))
        shell.interplane_phasing_rad = j["interplane_phasing_deg"].get<double>() * kDegToRad;
    return shell;
}

nlohmann::json shell_to_json(const OrbitalShell& shell) {
    return {{"num_planes", shell.num_planes},
            {"sats_per_plane", shell.sats_per_plane},
            {"altitude_m", shell.altitude_m},
            {"inclination_deg", shell.inclination_rad / kDegToRad},
            {"raan_offset_deg", shell.raan_offset_rad / kDegToRad},
            {"phase_offset_deg", shell.phase_offset_rad / kDegToRad},
            {"interplane_phasing_deg", shell.interplane_phasing_rad / kDegToRad}};
}

}  // namespace

double ScenarioConfig::min_elevation_rad() const { return min_elevation_deg * kDegToRad; }

GroundUser ScenarioConfig::region_center() const {
    return make_ground_user(-1, region_latitude_deg * kDegToRad, region_longitude_deg * kDegToRad);
}

double bandwidth_hz(double frequency_hz) { return 0.02 * frequency_hz; }

double noise_power_w(double frequency_hz, double temperature_k) {
    return constants::boltzmann_jpk * temperature_k * bandwidth_hz(frequency_hz);
}

void validate(const ScenarioConfig& config) {
    auto fail = [](const std::string& field, const std::string& reason) {
        throw std::invalid_argument("invalid value for '" + field + "': " + reason);
    };
    if (config.frequencies_hz.empty()) fail("frequencies_hz", "must list at least one frequency");
    for (double f : config.frequencies_hz)
        if (!(f > 0.0)) fail("frequencies_hz", "frequencies must be positive");
    if (!(config.temperature_k > 0.0)) fail("temperature_k", "must be positive");
    if (config.num_users < 1) fail("num_users", "must be >= 1");
    if (!(config.region_radius_m > 0.0)) fail("region_radius_m", "must be positive");
    if (config.array_x < 1 || config.array_y < 1) fail("array_x/array_y", "must be >= 1");
    if (config.cluster_sizes.empty()) fail("cluster_sizes", "must list at least one size");
    for (int l : config.cluster_sizes)
        if (l < 1) fail("cluster_sizes", "sizes must be >= 1");
    if (!(config.power_budget > 0.0)) fail("power_budget", "must be positive");
    if (!(config.sample_period_s > 0.0)) fail("sample_period_s", "must be positive");
    if (config.n_delay < 0) fail("n_delay", "must be >= 0");
    if (config.moment_window < 1) fail("moment_window", "must be >= 1");
    if (config.drops < 1) fail("drops", "must be >= 1");
    if (config.min_elevation_deg < 0.0 || config.min_elevation_deg >= 90.0)
        fail("min_elevation_deg", "must lie in [0, 90)");
    if (config.cone_half_width_deg < 0.0) fail("cone_half_width_deg", "must be >= 0");
    if (config.max_excess_delay_s < 0.0) fail("max_excess_delay_s", "must be >= 0");
    if (config.user_doppler_bound_hz < 0.0) fail("user_doppler_bound_hz", "must be >= 0");
    if (config.doppler_scale < 0.0) fail("doppler_scale", "must be >= 0");
    if (config.solver_max_iterations < 1) fail("solver_max_iterations", "must be >= 1");
    if (config.max_epoch_retries < 1) fail("max_epoch_retries", "must be >= 1");
    if (!(config.epoch_range_s > 0.0)) fail("epoch_range_s", "must be positive");
    if (config.constellation.shells.empty()) fail("constellation", "must contain at least one shell");
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument("scenario: " + path.string() + " is not valid JSON: " + e.what());
    }

    static const std::set<std::string> known = {
        "frequencies_hz",      "temperature_k",        "num_users",
        "region_latitude_deg", "region_longitude_deg", "region_radius_m",
        "array_x",             "array_y",              "cluster_sizes",
        "power_budget",        "sample_period_s",      "n_delay",
        "geometric_delay",     "moment_window",        "drops",
        "seed",                "min_elevation_deg",    "cone_half_width_deg",
        "max_excess_delay_s",  "user_doppler_bound_hz", "doppler_scale",
        "solver_max_iterations", "with_single_satellite", "max_epoch_retries",
        "epoch_range_s",       "constellation_epoch_s", "constellation_shells"};
    reject_unknown_keys(j, known, "scenario");

    ScenarioConfig config;
    auto get = [&j](const char* key, auto& field) {
        if (j.contains(key)) field = j[key].template get<std::decay_t<decltype(field)>>();
    };
    get("frequencies_hz", config.frequencies_hz);
    get("temperature_k", config.temperature_k);
    get("num_users", config.num_users);
    get("region_latitude_deg", config.region_latitude_deg);
    get("region_longitude_deg", config.region_longitude_deg);
    get("region_radius_m", config.region_radius_m);
    get("array_x", config.array_x);
    get("array_y", config.array_y);
    get("cluster_sizes", config.cluster_sizes);
    get("power_budget", config.power_budget);
    get("sample_period_s", config.sample_period_s);
    get("n_delay", config.n_delay);
    get("geometric_delay", config.geometric_delay);
    get("moment_window", config.moment_window);
    get("drops", config.drops);
    get("seed", config.seed);
    get("min_elevation_deg", config.min_elevation_deg);
    get("cone_half_width_deg", config.cone_half_width_deg);
    get("max_excess_delay_s", config.max_excess_delay_s);
    get("user_doppler_bound_hz", config.user_doppler_bound_hz);
    get("doppler_scale", config.doppler_scale);
    get("solver_max_iterations", config.solver_max_iterations);
    get("with_single_satellite", config.with_single_satellite);
    get("max_epoch_retries", config.max_epoch_retries);
    get("epoch_range_s", config.epoch_range_s);
    get("constellation_epoch_s", config.constellation.epoch_s);
    if (j.contains("constellation_shells")) {
        config.constellation.shells.clear();
        for (const auto& shell : j["constellation_shells"])
            config.constellation.shells.push_back(shell_from_json(shell));
    }
    validate(config);
    return config;
}

void save_scenario(const ScenarioConfig& config, const std::filesystem::path& path) {
    nlohmann::json j;
    j["frequencies_hz"] = config.frequencies_hz;
    j["temperature_k"] = config.temperature_k;
    j["num_users"] = config.num_users;
    j["region_latitude_deg"] = config.region_latitude_deg;
    j["region_longitude_deg"] = config.region_longitude_deg;
    j["region_radius_m"] = config.region_radius_m;
    j["array_x"] = config.array_x;
    j["array_y"] = config.array_y;
    j["cluster_sizes"] = config.cluster_sizes;
    j["power_budget"] = config.power_budget;
    j["sample_period_s"] = config.sample_period_s;
    j["n_delay"] = config.n_delay;
    j["geometric_delay"] = config.geometric_delay;
    j["moment_window"] = config.moment_window;
    j["drops"] = config.drops;
    j["seed"] = config.seed;
    j["min_elevation_deg"] = config.min_elevation_deg;
    j["cone_half_width_deg"] = config.cone_half_width_deg;
    j["max_excess_delay_s"] = config.max_excess_delay_s;
    j["user_doppler_bound_hz"] = config.user_doppler_bound_hz;
    j["doppler_scale"] = config.doppler_scale;
    j["solver_max_iterations"] = config.solver_max_iterations;
    j["with_single_satellite"] = config.with_single_satellite;
    j["max_epoch_retries"] = config.max_epoch_retries;
    j["epoch_range_s"] = config.epoch_range_s;
    j["constellation_epoch_s"] = config.constellation.epoch_s;
    j["constellation_shells"] = nlohmann::json::array();
    for (const auto& shell : config.constellation.shells)
        j["constellation_shells"].push_back(shell_to_json(shell));

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write scenario file: " + path.string());
    out << j.dump(2) << '\n';
}

}  // namespace satmimo
