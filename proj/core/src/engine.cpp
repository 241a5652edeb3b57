#include "ferrysim/engine.hpp"

#include <algorithm>
#include <chrono>
#include <variant>

#include "ferrysim/digest.hpp"
#include "ferrysim/dynamics.hpp"
#include "ferrysim/neighbors.hpp"

namespace ferry {
namespace {

void add_agents(Digest& d, const std::vector<Agent>& agents) {
    for (const Agent& a : agents) {
        d.add(std::uint64_t{a.id}).add(a.pos.x).add(a.pos.y).add(a.opinion);
        d.add(static_cast<std::uint64_t>(a.state));
    }
}

void add_metrics(Digest& d, const TickMetrics& m) {
    d.add(m.t).add(m.e_p_o).add(m.e_p_s).add(std::uint64_t{m.n_clusters});
    d.add(m.messenger_ratio).add(m.collective_opinion).add(m.collective_signal);
}

std::uint64_t trajectory_digest(const RunResult& r) {
    Digest d;
    d.add(static_cast<std::uint64_t>(r.series.size()));
    for (const auto& m : r.series) add_metrics(d, m);
    d.add(static_cast<std::uint64_t>(r.snapshots.size()));
    for (const auto& s : r.snapshots) {
        d.add(s.t);
        add_metrics(d, s.metrics);
        add_agents(d, s.agents);
    }
    add_agents(d, r.final_snapshot);
    d.add(r.mean_messenger_ratio);
    return d.value();
}

class Population {
public:
    Population(std::vector<Agent> agents) : agents_(std::move(agents)) {
        positions_.resize(agents_.size());
        opinions_.resize(agents_.size());
    }

    std::vector<Agent>& agents() noexcept { return agents_; }

    const std::vector<Vec2>& positions() {
        std::transform(agents_.begin(), agents_.end(), positions_.begin(), [](const Agent& a) { return a.pos; });
        return positions_;
    }

    const std::vector<double>& opinions() {
        std::transform(agents_.begin(), agents_.end(), opinions_.begin(), [](const Agent& a) { return a.opinion; });
        return opinions_;
    }

    TickMetrics measure(std::uint64_t t, const Landscape& landscape, double r_comm) {
        grid_.build(positions(), r_comm, adjacency_);
        return metrics::measure(t, agents_, landscape, adjacency_);
    }

    Adjacency& adjacency() noexcept { return adjacency_; }
    NeighborGrid& grid() noexcept { return grid_; }

private:
    std::vector<Agent> agents_;
    std::vector<Vec2> positions_;
    std::vector<double> opinions_;
    NeighborGrid grid_;
    Adjacency adjacency_;
};

} // namespace

RunStreams seed_streams(std::uint64_t master_seed, std::uint32_t run_index, std::uint32_t agent_count) {
    RunStreams streams;
    streams.agents.reserve(agent_count);
    for (std::uint32_t i = 0; i < agent_count; ++i) {
        streams.agents.push_back({RngStream({master_seed, run_index, i, StreamPurpose::Init}),
                                  RngStream({master_seed, run_index, i, StreamPurpose::Dynamics}),
                                  RngStream({master_seed, run_index, i, StreamPurpose::Dmp})});
    }
    streams.run = RngStream({master_seed, run_index, kRunLevelStreamId, StreamPurpose::Run});
    return streams;
}

std::uint64_t config_digest(const SimConfig& c) {
    Digest d;
    const ModelParams& m = c.model;
    d.add(std::uint64_t{m.n_agents}).add(m.arena.width).add(m.arena.height).add(m.r_comm).add(m.alpha);
    d.add(m.beta).add(m.r_lambda).add(m.step_size).add(m.sigma).add(m.t_final);
    d.add(static_cast<std::uint64_t>(m.messenger_walk));
    d.add(c.dmp.p_e).add(c.dmp.p_m);
    d.add(static_cast<std::uint64_t>(c.init_policy.kind)).add(std::uint64_t{c.init_policy.count});
    d.add(to_string(kind_of(c.landscape)));
    std::visit(
        [&d](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, RadialConeParams>) {
                d.add(p.center.x).add(p.center.y);
            } else if constexpr (std::is_same_v<P, PlanarGradientParams>) {
                d.add(p.slope).add(p.offset);
            } else if constexpr (std::is_same_v<P, BimodalGaussianParams>) {
                for (const auto* b : {&p.first, &p.second}) {
                    d.add(b->center.x).add(b->center.y).add(b->width).add(b->amplitude);
                }
            } else {
                d.add(p.axis_x).add(p.scale);
            }
        },
        c.landscape);
    d.add(c.master_seed).add(c.metrics_stride);
    d.add(static_cast<std::uint64_t>(c.snapshot_ticks.size()));
    for (auto t : c.snapshot_ticks) d.add(t);
    return d.value();
}

std::vector<Agent> initialize_agents(const SimConfig& config, const Landscape& landscape, std::uint32_t run_index) {
    const ModelParams& m = config.model;
    RunStreams streams = seed_streams(config.master_seed, run_index, m.n_agents);
    std::vector<Agent> agents(m.n_agents);
    for (std::uint32_t i = 0; i < m.n_agents; ++i) {
        Agent& a = agents[i];
        a.id = i;
        a.rng = streams.agents[i];
        RngStream& init = a.rng.init;
        const double x = init.uniform(0.0, m.arena.width);
        const double y = init.uniform(0.0, m.arena.height);
        a.pos = {x, y};
        a.prev_pos = a.pos;
        a.opinion = sample_environment(landscape, a.pos, m.sigma, init);
        a.state = initial_state(config.init_policy, config.dmp, i, m.n_agents, init);
    }
    return agents;
}

RunResult run_simulation(const SimConfig& config, std::uint32_t run_index) {
    validate(config);
    const auto started = std::chrono::steady_clock::now();
    const ModelParams& m = config.model;
    const Landscape landscape(config.landscape, m.arena);

    RunResult result;
    result.run_index = run_index;
    result.config_digest = config_digest(config);
    result.series.reserve(m.t_final / config.metrics_stride + 1);

    Population population(initialize_agents(config, landscape, run_index));
    auto& agents = population.agents();
    auto next_snapshot = std::lower_bound(config.snapshot_ticks.begin(), config.snapshot_ticks.end(), 1);
    if (!config.snapshot_ticks.empty() && config.snapshot_ticks.front() == 0) {
        result.snapshots.push_back({0, agents, population.measure(0, landscape, m.r_comm)});
    }

    const TickMetrics initial = population.measure(0, landscape, m.r_comm);
    result.series.push_back(initial);
    double ratio_sum = 0.0;

    std::vector<double> gathered;
    gathered.reserve(m.n_agents);
    for (std::uint64_t t = 1; t <= m.t_final; ++t) {
        std::uint32_t messengers = 0;
        for (Agent& a : agents) {
            if (can_switch(a.state, config.dmp)) {
                const AgentState old_state = a.state;
                const AgentState new_state = dmp_step(old_state, config.dmp, a.rng.dmp);
                if (new_state != old_state) apply_transition_side_effects(a, old_state, new_state, landscape, m.sigma);
            }
            if (a.state == AgentState::Messenger) ++messengers;
        }
        ratio_sum += static_cast<double>(messengers) / m.n_agents;

        population.grid().build(population.positions(), m.r_comm, population.adjacency());
        const Adjacency& adjacency = population.adjacency();
        const std::vector<double>& opinions = population.opinions();
        for (std::size_t i = 0; i < agents.size(); ++i) {
            Agent& a = agents[i];
            if (a.state == AgentState::Messenger) {
                messenger_step(a, m.step_size, m.arena, m.messenger_walk);
                continue;
            }
            gathered.clear();
            for (std::uint32_t j : adjacency.neighbors(i)) gathered.push_back(opinions[j]);
            a = exploiter_tick(a, gathered, landscape, m);
        }

        const bool on_stride = t % config.metrics_stride == 0;
        const bool on_snapshot = next_snapshot != config.snapshot_ticks.end() && *next_snapshot == t;
        if (on_stride || on_snapshot) {
            const TickMetrics now = population.measure(t, landscape, m.r_comm);
            if (on_stride) result.series.push_back(now);
            if (on_snapshot) {
                result.snapshots.push_back({t, agents, now});
                ++next_snapshot;
            }
        }
    }

    result.mean_messenger_ratio = m.t_final > 0 ? ratio_sum / static_cast<double>(m.t_final) : initial.messenger_ratio;
    result.final_snapshot = agents;
    result.trajectory_digest = trajectory_digest(result);
    result.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return result;
}

} // namespace ferry
