// SPDX-License-Identifier: Apache-2.0

#include "satmimo/results.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

namespace satmimo {

namespace {

constexpr const char* kHeader = "f_hz,L,method,mean_rate_bits,std_rate_bits,n_drops,seed";

std::string format_double(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

constexpr const char* kPlotScript = R"PY(#!/usr/bin/env python3
"""Renders sum-rate vs cluster size, one panel per carrier frequency.

Reads the CSV written next to this script (or the path given as the first
argument) and saves a PNG alongside it.
"""
import csv
import os
import sys
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

csv_path = sys.argv[1] if len(sys.argv) > 1 else os.path.join(
    os.path.dirname(os.path.abspath(__file__)), "@CSV_NAME@")

rows = []
with open(csv_path, newline="") as fh:
    for row in csv.DictReader(fh):
        rows.append({
            "f": float(row["f_hz"]),
            "L": int(row["L"]),
            "method": row["method"],
            "mean": float(row["mean_rate_bits"]),
            "std": float(row["std_rate_bits"]),
            "n": int(row["n_drops"]),
        })

frequencies = sorted({r["f"] for r in rows})
methods = ["perfect", "robust", "nonrobust"]
styles = {"perfect": "o-", "robust": "s-", "nonrobust": "^-"}

fig, axes = plt.subplots(1, len(frequencies), figsize=(5 * len(frequencies), 4), squeeze=False)
for ax, f in zip(axes[0], frequencies):
    panel = [r for r in rows if r["f"] == f]
    for method in methods:
        pts = sorted((r["L"], r) for r in panel if r["method"] == method)
        if not pts:
            continue
        ls = [L for L, _ in pts]
        means = [r["mean"] for _, r in pts]
        errs = [r["std"] / max(r["n"], 1) ** 0.5 for _, r in pts]
        ax.errorbar(ls, means, yerr=errs, fmt=styles[method], capsize=3, label=method)
    single = [r for r in panel if r["method"] == "single_sat"]
    if single:
        ax.axhline(single[0]["mean"], color="gray", linestyle="--",
                   label="single satellite (perfect CSI)")
    ax.set_title(f"f = {f / 1e6:g} MHz")
    ax.set_xlabel("satellites in cluster")
    ax.set_ylabel("sum rate (bits per channel use)")
    ax.grid(True, alpha=0.3)
    ax.legend()

fig.tight_layout()
out = os.path.splitext(csv_path)[0] + ".png"
fig.savefig(out, dpi=150)
print(f"wrote {out}")
)PY";

}  // namespace

void emit_results(const ResultsTable& table, const std::filesystem::path& csv_path) {
    std::ofstream out(csv_path);
    if (!out) throw std::runtime_error("emit_results: cannot write " + csv_path.string());
    out << kHeader << '\n';
    for (const auto& row : table.rows)
        out << format_double(row.frequency_hz) << ',' << row.cluster_size << ',' << row.method
            << ',' << format_double(row.mean_rate_bits) << ',' << format_double(row.std_rate_bits)
            << ',' << row.n_drops << ',' << row.seed << '\n';
    if (!out) throw std::runtime_error("emit_results: write failed for " + csv_path.string());

    std::filesystem::path script_path = csv_path;
    script_path.replace_filename(csv_path.stem().string() + "_plot.py");
    std::ofstream script(script_path);
    if (!script) throw std::runtime_error("emit_results: cannot write " + script_path.string());
    std::string body = kPlotScript;
    const std::string placeholder = "@CSV_NAME@";
    body.replace(body.find(placeholder), placeholder.size(), csv_path.filename().string());
    script << body;
}

void dump_history(const ChannelHistory<double>& history, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("dump_history: cannot write " + path.string());
    const auto rows = history.at(0).rows();
    const auto cols = history.at(0).cols();
    out << "# " << rows << ' ' << cols << ' ' << history.size() << ' '
        << format_double(history.sample_period_s) << '\n';
    for (int n = 0; n < history.size(); ++n) {
        const auto& g = history.at(n);
        for (Eigen::Index r = 0; r < rows; ++r)
            for (Eigen::Index c = 0; c < cols; ++c) {
                if (r != 0 || c != 0) out << ',';
                out << format_double(g(r, c).real()) << ',' << format_double(g(r, c).imag());
            }
        out << '\n';
    }
    if (!out) throw std::runtime_error("dump_history: write failed for " + path.string());
}

ResultsTable load_results(const std::filesystem::path& csv_path) {
    std::ifstream in(csv_path);
    if (!in) throw std::runtime_error("load_results: cannot open " + csv_path.string());
    std::string line;
    if (!std::getline(in, line) || line != kHeader)
        throw std::runtime_error("load_results: unexpected header in " + csv_path.string());

    ResultsTable table;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        ResultsRow row;
        std::getline(ss, field, ',');
        row.frequency_hz = std::stod(field);
        std::getline(ss, field, ',');
        row.cluster_size = std::stoi(field);
        std::getline(ss, row.method, ',');
        std::getline(ss, field, ',');
        row.mean_rate_bits = std::stod(field);
        std::getline(ss, field, ',');
        row.std_rate_bits = std::stod(field);
        std::getline(ss, field, ',');
        row.n_drops = std::stoi(field);
        std::getline(ss, field, ',');
        row.seed = std::stoull(field);
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace satmimo
