#pragma once

#include <cstdint>

#include "ferrysim/agent.hpp"
#include "ferrysim/landscape.hpp"

// Two-state Dichotomous Markov Process that switches agents between the
// Exploiter and Messenger roles, with its closed-form expectations.
namespace ferry {

struct DmpParams {
    double p_e = 0.003;  // per-tick probability Messenger -> Exploiter
    double p_m = 0.0004; // per-tick probability Exploiter -> Messenger
    friend bool operator==(const DmpParams&, const DmpParams&) = default;
};

struct InitialStatePolicy {
    enum class Kind { StationaryRatio, AllExploiters, FixedCount };
    Kind kind = Kind::StationaryRatio;
    std::uint32_t count = 0; // Messengers at t=0 for FixedCount

    static constexpr InitialStatePolicy stationary_ratio() noexcept { return {Kind::StationaryRatio, 0}; }
    static constexpr InitialStatePolicy all_exploiters() noexcept { return {Kind::AllExploiters, 0}; }
    static constexpr InitialStatePolicy fixed_count(std::uint32_t k) noexcept { return {Kind::FixedCount, k}; }

    friend bool operator==(const InitialStatePolicy&, const InitialStatePolicy&) = default;
};

/// One switching decision. Always consumes exactly one uniform draw.
[[nodiscard]] AgentState dmp_step(AgentState state, const DmpParams& params, RngStream& rng) noexcept;

/// True when a call to dmp_step from `state` could change it. Callers skip the
/// draw otherwise so that p=0 runs stay stream-identical to the baseline.
[[nodiscard]] constexpr bool can_switch(AgentState state, const DmpParams& params) noexcept {
    return state == AgentState::Exploiter ? params.p_m > 0.0 : params.p_e > 0.0;
}

/// Applies a role change. E->M keeps the opinion as the carried datum. M->E
/// replaces the opinion with a fresh sample at the current position (drawn from
/// the agent's DMP stream) and restarts the gradient estimator there.
void apply_transition_side_effects(Agent& agent, AgentState old_state, AgentState new_state,
                                   const Landscape& landscape, double noise_sigma);

/// Average of the two mean sojourn times, (p_e + p_m) / (2 p_e p_m).
/// Throws std::domain_error unless both probabilities are positive.
[[nodiscard]] double expected_sojourn_time(const DmpParams& params);

/// Mean sojourn in one state: 1/p_m for Exploiter, 1/p_e for Messenger.
[[nodiscard]] double expected_state_sojourn(AgentState state, const DmpParams& params);

/// Stationary Messenger fraction p_m / (p_e + p_m). Throws std::domain_error
/// when both probabilities are zero.
[[nodiscard]] double expected_messenger_ratio(const DmpParams& params);

/// Role at t=0 of agent `index` out of `n_agents`. StationaryRatio draws one
/// uniform from `init`; the other policies draw nothing.
[[nodiscard]] AgentState initial_state(const InitialStatePolicy& policy, const DmpParams& params,
                                       std::uint32_t index, std::uint32_t n_agents, RngStream& init);

struct SojournStats {
    std::uint64_t completed = 0;
    double mean = 0.0;
};

struct EnsembleStats {
    double time_averaged_ratio = 0.0;
    SojournStats exploiter;
    SojournStats messenger;
};

/// Runs only the switching process for an ensemble of agents. Switching draws
/// come from the same per-agent DMP streams as a full simulation run. The first
/// sojourn of every agent is counted from t = 0.
[[nodiscard]] EnsembleStats simulate_ensemble(const DmpParams& params, const InitialStatePolicy& policy,
                                              std::uint32_t n_agents, std::uint64_t ticks, std::uint64_t master_seed,
                                              std::uint32_t run_index = 0);

} // namespace ferry
