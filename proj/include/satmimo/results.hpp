// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "satmimo/harness.hpp"

#include <filesystem>

namespace satmimo {

/// Writes the table as CSV with the header
/// `f_hz,L,method,mean_rate_bits,std_rate_bits,n_drops,seed` and drops a
/// self-contained plotting script next to it (same stem, `_plot.py` suffix).
/// Numbers use round-trip precision, so equal tables emit identical bytes.
void emit_results(const ResultsTable& table, const std::filesystem::path& csv_path);

/// Parses a CSV produced by emit_results.
ResultsTable load_results(const std::filesystem::path& csv_path);

/// Debug dump of a sampled channel history. First line is the header
/// `# rows cols samples sample_period_s`; each following line is one sample,
/// row-major, entries as `re,im` pairs.
void dump_history(const ChannelHistory<double>& history, const std::filesystem::path& path);

}  // namespace satmimo
