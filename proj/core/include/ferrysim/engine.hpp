#pragma once

#include <cstdint>
#include <vector>

#include "ferrysim/agent.hpp"
#include "ferrysim/config.hpp"
#include "ferrysim/metrics.hpp"

namespace ferry {

struct Snapshot {
    std::uint64_t t = 0;
    std::vector<Agent> agents;
    TickMetrics metrics;
};

struct RunResult {
    std::uint32_t run_index = 0;
    std::uint64_t config_digest = 0;
    /// Hash of everything observable about the trajectory: the metric series,
    /// every snapshot and the final population. Excludes wall time.
    std::uint64_t trajectory_digest = 0;
    std::vector<TickMetrics> series; // t = 0, stride, 2*stride, ...
    std::vector<Snapshot> snapshots; // at the configured snapshot ticks <= t_final
    std::vector<Agent> final_snapshot;
    double mean_messenger_ratio = 0.0; // over ticks 1..t_final (initial ratio if t_final = 0)
    double wall_time = 0.0;            // seconds
};

struct RunStreams {
    std::vector<AgentStreams> agents;
    RngStream run;
};

/// Derives every stream of one run from (master_seed, run_index, agent id,
/// purpose); see StreamKey for the exact Philox layout.
[[nodiscard]] RunStreams seed_streams(std::uint64_t master_seed, std::uint32_t run_index, std::uint32_t agent_count);

/// Order-sensitive hash of every SimConfig field.
[[nodiscard]] std::uint64_t config_digest(const SimConfig& config);

/// Initial population: uniform positions, opinion = one noisy sample there,
/// role from the initial-state policy.
[[nodiscard]] std::vector<Agent> initialize_agents(const SimConfig& config, const Landscape& landscape,
                                                   std::uint32_t run_index);

/// Runs t_final synchronous ticks. Each tick: role switching, neighbor query,
/// snapshot-based motion and opinion updates, metric recording on the stride.
/// Throws ConfigError before doing any work if the configuration is invalid.
[[nodiscard]] RunResult run_simulation(const SimConfig& config, std::uint32_t run_index = 0);

} // namespace ferry
