#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ferrysim/config.hpp"
#include "ferrysim/engine.hpp"

namespace ferry {

/// Summary statistics over replicates.
struct Stats {
    std::size_t count = 0;
    double mean = 0.0;
    double median = 0.0;
    double stddev = 0.0; // sample standard deviation (divisor n-1; 0 when n < 2)
    double min = 0.0;
    double max = 0.0;

    /// NaN-free input expected; an empty span yields count 0 and zeros.
    static Stats of(std::span<const double> values);
};

/// What remains of a run once it has been reduced for aggregation.
struct RunSummary {
    std::uint32_t replicate = 0;
    std::uint32_t run_index = 0;
    bool ok = false;
    std::string error;
    TickMetrics initial;
    TickMetrics final;
    std::vector<TickMetrics> snapshot_metrics;
    double mean_messenger_ratio = 0.0;
    std::uint64_t trajectory_digest = 0;
    std::vector<TickMetrics> series; // only filled when series are kept
};

struct SweepCell {
    double p_e = 0.0;
    double p_m = 0.0;
    friend bool operator==(const SweepCell&, const SweepCell&) = default;
};

struct SweepSpec {
    std::vector<SweepCell> grid;
    std::uint32_t replicates = 24;
    /// Paired: replicate r of every cell and of the baseline shares run index r,
    /// hence the same initial population. Unpaired: every run gets its own index.
    bool paired = true;
    bool keep_series = false;

    /// resolution x resolution cells with p_e and p_m at exp(log_min) ... exp(log_max),
    /// evenly spaced in log. Cells are ordered by p_e first, then p_m.
    static SweepSpec log_grid(double log_min, double log_max, std::uint32_t resolution, std::uint32_t replicates);
};

/// A final metric over replicates, raw and relative to the baseline ensemble.
struct MetricAggregate {
    Stats raw;
    Stats normalized;
    bool normalized_valid = false;
};

struct TemporalPoint {
    std::uint64_t t = 0;
    double e_p_o_median = 0.0;
    double e_p_s_median = 0.0;
    double n_clusters_median = 0.0;
    std::optional<double> e_p_o_norm_median;
    std::optional<double> e_p_s_norm_median;
};

struct SweepResult {
    SweepCell cell;
    std::vector<RunSummary> runs;
    std::size_t failed = 0;
    MetricAggregate e_p_o;
    MetricAggregate e_p_s;
    MetricAggregate n_clusters;
    Stats messenger_ratio; // time-averaged ratio per run
    std::vector<TemporalPoint> temporal;
    std::vector<std::string> notes; // e.g. degenerate-baseline reports
};

struct SweepOutput {
    SweepResult baseline;
    std::vector<SweepResult> cells;
};

/// Runs every (cell, replicate) plus the baseline ensemble on up to
/// `parallelism` threads. The output does not depend on `parallelism` or on
/// scheduling: each job writes only its own slot and aggregation is sequential.
/// A failing run is recorded in its cell and does not stop the sweep.
[[nodiscard]] SweepOutput run_sweep(const SweepSpec& spec, const SimConfig& base, unsigned parallelism = 1);

struct ConnectivityPoint {
    double r_comm = 0.0;
    std::vector<RunSummary> runs;
    Stats initial_clusters;
    Stats final_clusters;
    Stats initial_e_p_o;
    Stats final_e_p_o;
    Stats initial_e_p_s;
    Stats final_e_p_s;
};

/// Baseline (no Messenger) ensembles across communication ranges, sorted by
/// ascending r_comm. Throws std::invalid_argument for a non-positive range.
[[nodiscard]] std::vector<ConnectivityPoint> connectivity_sweep(std::span<const double> r_values,
                                                                const SimConfig& base, std::uint32_t replicates,
                                                                unsigned parallelism = 1);

/// Runs one configuration and reduces it to a RunSummary, capturing failures.
[[nodiscard]] RunSummary summarize_run(const SimConfig& config, std::uint32_t replicate, std::uint32_t run_index,
                                       bool keep_series);

/// Executes `jobs` on a pool of `parallelism` threads (inline when 1).
void parallel_for(std::size_t jobs, unsigned parallelism, const std::function<void(std::size_t)>& body);

} // namespace ferry
