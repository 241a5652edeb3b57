#include "ferrysim/dmp.hpp"

#include <stdexcept>
#include <vector>

#include "ferrysim/dynamics.hpp"

namespace ferry {

AgentState dmp_step(AgentState state, const DmpParams& params, RngStream& rng) noexcept {
    const double u = rng.uniform();
    if (state == AgentState::Exploiter) return u < params.p_m ? AgentState::Messenger : AgentState::Exploiter;
    return u < params.p_e ? AgentState::Exploiter : AgentState::Messenger;
}

void apply_transition_side_effects(Agent& agent, AgentState old_state, AgentState new_state,
                                   const Landscape& landscape, double noise_sigma) {
    if (old_state == new_state) return;
    agent.state = new_state;
    agent.heading = {};
    if (new_state == AgentState::Messenger) return;
    agent.opinion = sample_environment(landscape, agent.pos, noise_sigma, agent.rng.dmp);
    agent.grad_mem = {};
    agent.prev_pos = agent.pos;
    // The fresh opinion equals the signal, so the dissonance against it is zero.
    agent.prev_dissonance = 0.0;
}

double expected_sojourn_time(const DmpParams& params) {
    if (!(params.p_e > 0.0 && params.p_m > 0.0)) {
        throw std::domain_error("expected sojourn time is undefined when a switching probability is zero");
    }
    return 0.5 * (params.p_e + params.p_m) / (params.p_e * params.p_m);
}

double expected_state_sojourn(AgentState state, const DmpParams& params) {
    const double p = state == AgentState::Exploiter ? params.p_m : params.p_e;
    if (!(p > 0.0)) throw std::domain_error("state is absorbing: switching probability is zero");
    return 1.0 / p;
}

double expected_messenger_ratio(const DmpParams& params) {
    const double total = params.p_e + params.p_m;
    if (!(total > 0.0)) throw std::domain_error("Messenger ratio is undefined when both probabilities are zero");
    return params.p_m / total;
}

AgentState initial_state(const InitialStatePolicy& policy, const DmpParams& params, std::uint32_t index,
                         std::uint32_t n_agents, RngStream& init) {
    switch (policy.kind) {
    case InitialStatePolicy::Kind::AllExploiters: return AgentState::Exploiter;
    case InitialStatePolicy::Kind::FixedCount:
        if (policy.count > n_agents) throw std::invalid_argument("initial Messenger count exceeds agent count");
        return index < policy.count ? AgentState::Messenger : AgentState::Exploiter;
    case InitialStatePolicy::Kind::StationaryRatio:
        return init.bernoulli(expected_messenger_ratio(params)) ? AgentState::Messenger : AgentState::Exploiter;
    }
    return AgentState::Exploiter;
}

EnsembleStats simulate_ensemble(const DmpParams& params, const InitialStatePolicy& policy, std::uint32_t n_agents,
                                std::uint64_t ticks, std::uint64_t master_seed, std::uint32_t run_index) {
    std::vector<AgentState> states(n_agents);
    std::vector<RngStream> streams;
    std::vector<std::uint64_t> entered(n_agents, 0);
    streams.reserve(n_agents);
    for (std::uint32_t i = 0; i < n_agents; ++i) {
        RngStream init({master_seed, run_index, i, StreamPurpose::Init});
        states[i] = initial_state(policy, params, i, n_agents, init);
        streams.emplace_back(StreamKey{master_seed, run_index, i, StreamPurpose::Dmp});
    }

    EnsembleStats stats;
    double sum_exploiter = 0.0;
    double sum_messenger = 0.0;
    double ratio_sum = 0.0;
    for (std::uint64_t t = 1; t <= ticks; ++t) {
        std::uint32_t messengers = 0;
        for (std::uint32_t i = 0; i < n_agents; ++i) {
            if (can_switch(states[i], params)) {
                const AgentState next = dmp_step(states[i], params, streams[i]);
                if (next != states[i]) {
                    const auto length = static_cast<double>(t - entered[i]);
                    if (states[i] == AgentState::Exploiter) {
                        ++stats.exploiter.completed;
                        sum_exploiter += length;
                    } else {
                        ++stats.messenger.completed;
                        sum_messenger += length;
                    }
                    entered[i] = t;
                    states[i] = next;
                }
            }
            if (states[i] == AgentState::Messenger) ++messengers;
        }
        ratio_sum += static_cast<double>(messengers) / n_agents;
    }
    if (ticks > 0) stats.time_averaged_ratio = ratio_sum / static_cast<double>(ticks);
    if (stats.exploiter.completed > 0) stats.exploiter.mean = sum_exploiter / stats.exploiter.completed;
    if (stats.messenger.completed > 0) stats.messenger.mean = sum_messenger / stats.messenger.completed;
    return stats;
}

} // namespace ferry
