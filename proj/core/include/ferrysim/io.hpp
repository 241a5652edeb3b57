#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ferrysim/config.hpp"
#include "ferrysim/engine.hpp"
#include "ferrysim/sweep.hpp"

// Configuration schema and the delimiter-separated output formats.
namespace ferry::io {

inline constexpr std::uint32_t kConfigVersion = 1;

struct SweepSettings {
    double log_min = -20.0;
    double log_max = -2.0;
    std::uint32_t resolution = 19;
    std::uint32_t replicates = 24;
    bool paired = true;
    friend bool operator==(const SweepSettings&, const SweepSettings&) = default;
};

struct OutputSettings {
    std::string dir = "out";
    bool write_series = false;
    friend bool operator==(const OutputSettings&, const OutputSettings&) = default;
};

/// In-memory form of a configuration document. Sections: model, dmp, init,
/// landscape, sweep, output; top-level keys: version, master_seed.
struct ConfigFile {
    std::uint32_t version = kConfigVersion;
    SimConfig sim;
    SweepSettings sweep;
    OutputSettings output;
    friend bool operator==(const ConfigFile&, const ConfigFile&) = default;
};

/// Filesystem failure (unreadable input, unwritable output).
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parses and validates a JSON config document. Missing keys take defaults;
/// unknown keys, wrong types and out-of-range values throw ConfigError.
[[nodiscard]] ConfigFile parse_config(std::string_view text);

/// Fully resolved JSON document with every key present.
[[nodiscard]] std::string serialize_config(const ConfigFile& config);

/// Throws IoError when unreadable, ConfigError when invalid.
[[nodiscard]] ConfigFile load_config(const std::filesystem::path& path);

/// Shortest decimal text that parses back to the identical double.
[[nodiscard]] std::string format_number(double v);
[[nodiscard]] std::string format_number(std::uint64_t v);
/// Strict full-string parse; throws std::invalid_argument.
[[nodiscard]] double parse_double(std::string_view text);
[[nodiscard]] std::uint64_t parse_uint(std::string_view text);

/// A header row plus data rows, comma-delimited, '\n' line endings.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of a header column; throws std::out_of_range naming it.
    [[nodiscard]] std::size_t column(std::string_view name) const;
};

void write_table(std::ostream& out, const Table& table);
[[nodiscard]] Table read_table(std::istream& in);
/// Throws IoError on failure.
void write_table(const std::filesystem::path& path, const Table& table);
[[nodiscard]] Table read_table(const std::filesystem::path& path);

inline const std::vector<std::string> kMetricsHeader{"run_id", "t", "e_p_o", "e_p_s", "n_clusters",
                                                     "messenger_ratio", "z_col", "s_col"};
inline const std::vector<std::string> kSnapshotHeader{"run_id", "t", "agent_id", "x", "y", "opinion", "state"};

void append_metrics_rows(Table& table, std::string_view run_id, std::span<const TickMetrics> series);
void append_snapshot_rows(Table& table, std::string_view run_id, std::uint64_t t, std::span<const Agent> agents);

[[nodiscard]] Table metrics_table(std::string_view run_id, const RunResult& result);
/// Every snapshot tick plus the final population (t = t_final), deduplicated.
[[nodiscard]] Table snapshot_table(std::string_view run_id, const RunResult& result, std::uint64_t t_final);

/// One row per cell; the baseline ensemble first with cell_id "baseline".
[[nodiscard]] Table aggregate_table(const SweepOutput& sweep);
/// Final metrics of every run, baseline included.
[[nodiscard]] Table runs_table(const SweepOutput& sweep);
/// Medians at each snapshot tick per cell.
[[nodiscard]] Table temporal_table(const SweepOutput& sweep);
/// Failed runs and degenerate-baseline notes.
[[nodiscard]] Table failures_table(const SweepOutput& sweep);
/// Metric series of every run (requires keep_series).
[[nodiscard]] Table sweep_series_table(const SweepOutput& sweep);

[[nodiscard]] Table connectivity_table(std::span<const ConnectivityPoint> points);

/// Run identifiers used across the sweep files.
[[nodiscard]] std::string cell_id(std::size_t cell_index);
[[nodiscard]] std::string run_id(std::string_view cell, std::uint32_t replicate);
inline constexpr std::string_view kBaselineCellId = "baseline";

} // namespace ferry::io
