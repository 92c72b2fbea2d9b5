// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>

namespace {

namespace fs = std::filesystem;

struct CommandResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("satmimo_cli_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

CommandResult run_cli(const TempDir& dir, const std::string& args) {
    const fs::path out = dir.path / "stdout.txt";
    const fs::path err = dir.path / "stderr.txt";
    const std::string command = std::string(SATMIMO_CLI_PATH) + " " + args + " >" + out.string() +
                                " 2>" + err.string();
    const int status = std::system(command.c_str());
    CommandResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = slurp(out);
    result.err = slurp(err);
    return result;
}

}  // namespace

TEST_CASE("probe orbital-speed prints the formula value") {
    TempDir dir;
    const auto result = run_cli(dir, "probe orbital-speed --altitude 550e3");
    REQUIRE(result.exit_code == 0);
    const double value = std::stod(result.out);
    CHECK(std::abs(value - 7.589e3) / 7.589e3 < 1e-3);
}

TEST_CASE("probe path-loss prints the amplitude factor") {
    TempDir dir;
    const auto result = run_cli(dir, "probe path-loss --distance 550e3 --frequency 1e9");
    REQUIRE(result.exit_code == 0);
    CHECK(std::abs(std::stod(result.out) - 2.305e7) / 2.305e7 < 1e-3);
}

TEST_CASE("probe sum-rate reads a JSON instance") {
    TempDir dir;
    const fs::path input = dir.path / "instance.json";
    // K = 1, |g^H v|^2 = noise -> exactly one bit.
    std::ofstream(input) << R"({"channel": [[[1.0, 0.0]], [[0.0, 0.0]]],
                               "precoder": [[[0.5, 0.0]], [[0.0, 0.0]]],
                               "noise_power": 0.25})";
    const auto result = run_cli(dir, "probe sum-rate --input " + input.string());
    REQUIRE(result.exit_code == 0);
    CHECK(std::abs(std::stod(result.out) - 1.0) < 1e-9);
}

TEST_CASE("invalid sweep options are usage errors naming the field") {
    TempDir dir;
    const auto result = run_cli(dir, "sweep --drops 0");
    CHECK(result.exit_code == 2);
    CHECK(result.err.find("drops") != std::string::npos);
}

TEST_CASE("unknown flags are usage errors") {
    TempDir dir;
    const auto result = run_cli(dir, "sweep --no-such-flag");
    CHECK(result.exit_code == 2);
}

TEST_CASE("reproduction preset is byte-reproducible and leaves configs untouched") {
    TempDir dir;
    const fs::path csv_a = dir.path / "a.csv";
    const fs::path csv_b = dir.path / "b.csv";

    // Two drops keep the test quick; determinism must hold regardless.
    const auto a = run_cli(dir, "reproduce-fig2 --seed 42 --drops 2 --out " + csv_a.string());
    REQUIRE(a.exit_code == 0);
    const auto b = run_cli(dir, "reproduce-fig2 --seed 42 --drops 2 --out " + csv_b.string());
    REQUIRE(b.exit_code == 0);
    CHECK(slurp(csv_a) == slurp(csv_b));
    CHECK(!slurp(csv_a).empty());
    CHECK(fs::exists(dir.path / "a_plot.py"));

    const auto c = run_cli(dir, "reproduce-fig2 --seed 43 --drops 2 --out " + csv_b.string());
    REQUIRE(c.exit_code == 0);
    CHECK(slurp(csv_a) != slurp(csv_b));
}

TEST_CASE("run subcommand prints per-cell lines and does not modify the config") {
    TempDir dir;
    const fs::path config_path = dir.path / "scenario.json";
    std::ofstream(config_path) << R"({
        "frequencies_hz": [1e8],
        "num_users": 3,
        "array_x": 2,
        "array_y": 2,
        "cluster_sizes": [2],
        "n_delay": 50,
        "moment_window": 20,
        "drops": 1,
        "seed": 5
    })";
    const std::string before = slurp(config_path);

    const auto result = run_cli(dir, "run --config " + config_path.string());
    REQUIRE(result.exit_code == 0);
    CHECK(result.out.find("perfect") != std::string::npos);
    CHECK(result.out.find("robust") != std::string::npos);
    CHECK(result.out.find("nonrobust") != std::string::npos);
    CHECK(slurp(config_path) == before);
}

TEST_CASE("missing config files are runtime errors") {
    TempDir dir;
    const auto result = run_cli(dir, "run --config /nonexistent/scenario.json");
    CHECK(result.exit_code == 1);
}
