#include "ferrysim/dynamics.hpp"

#include <cassert>
#include <cmath>
#include <numeric>

namespace ferry {
namespace {

Vec2 nonzero_random_direction(RngStream& rng) noexcept {
    Vec2 eta = random_direction(rng);
    while (eta.x == 0.0 && eta.y == 0.0) eta = random_direction(rng);
    return eta;
}

} // namespace

double sample_environment(const Landscape& landscape, Vec2 pos, double noise_sigma, RngStream& rng) {
    const double clean = landscape.at(pos);
    if (noise_sigma == 0.0) return clean;
    return clean + noise_sigma * rng.standard_normal();
}

double update_opinion(double opinion, double env_signal, std::span<const double> neighbor_opinions,
                      double alpha) noexcept {
    const double social = std::accumulate(neighbor_opinions.begin(), neighbor_opinions.end(), 0.0);
    const double n = static_cast<double>(neighbor_opinions.size());
    return alpha * opinion + (1.0 - alpha) / (1.0 + n) * (env_signal + social);
}

double local_mean_opinion(double self_opinion, std::span<const double> neighbor_opinions) noexcept {
    if (neighbor_opinions.empty()) return self_opinion;
    const double sum = std::accumulate(neighbor_opinions.begin(), neighbor_opinions.end(), 0.0);
    return sum / static_cast<double>(neighbor_opinions.size());
}

Vec2 update_gradient_estimate(Vec2 grad_mem, Vec2 pos, Vec2 prev_pos, double new_dissonance, double prev_dissonance,
                              double beta) noexcept {
    const double delta_d = new_dissonance - prev_dissonance;
    const Vec2 delta = pos - prev_pos;
    const Vec2 sample{std::fabs(delta.x) < kMinAxisDisplacement ? 0.0 : delta_d / delta.x,
                      std::fabs(delta.y) < kMinAxisDisplacement ? 0.0 : delta_d / delta.y};
    return beta * grad_mem + (1.0 - beta) * sample;
}

Vec2 random_direction(RngStream& rng) noexcept {
    const double x = rng.uniform(-1.0, 1.0);
    const double y = rng.uniform(-1.0, 1.0);
    return {x, y};
}

Vec2 movement_direction(Vec2 grad_mem, double r_lambda, RngStream& rng) noexcept {
    const Vec2 eta = random_direction(rng);
    const double g = norm(grad_mem);
    if (g == 0.0 || !std::isfinite(g)) return r_lambda * eta;
    return (1.0 - r_lambda) * (-1.0 / g) * grad_mem + r_lambda * eta;
}

Vec2 take_step(Vec2 pos, Vec2 direction, double step_size, const Arena& arena) noexcept {
    const double length = norm(direction);
    assert(length > 0.0);
    return arena.reflect(pos + (step_size / length) * direction);
}

void messenger_step(Agent& agent, double step_size, const Arena& arena, MessengerWalk walk) {
    if (walk == MessengerWalk::Uncorrelated || (agent.heading.x == 0.0 && agent.heading.y == 0.0)) {
        agent.heading = nonzero_random_direction(agent.rng.dynamics);
    }
    agent.prev_pos = agent.pos;
    const Vec2 raw = agent.pos + (step_size / norm(agent.heading)) * agent.heading;
    agent.pos = arena.reflect(raw);
    if (agent.pos != raw) agent.heading = {};
}

Agent exploiter_tick(const Agent& agent, std::span<const double> neighbor_opinions, const Landscape& landscape,
                     const ModelParams& params) {
    Agent next = agent;
    RngStream& rng = next.rng.dynamics;

    const double signal = sample_environment(landscape, agent.pos, params.sigma, rng);
    const double d = dissonance(signal, local_mean_opinion(agent.opinion, neighbor_opinions));
    next.grad_mem = update_gradient_estimate(agent.grad_mem, agent.pos, agent.prev_pos, d, agent.prev_dissonance,
                                             params.beta);

    Vec2 heading;
    if (neighbor_opinions.empty()) {
        heading = nonzero_random_direction(rng);
    } else {
        heading = movement_direction(next.grad_mem, params.r_lambda, rng);
        if (heading.x == 0.0 && heading.y == 0.0) heading = nonzero_random_direction(rng);
    }

    next.prev_pos = agent.pos;
    next.prev_dissonance = d;
    next.pos = take_step(agent.pos, heading, params.step_size, params.arena);
    next.opinion = update_opinion(agent.opinion, signal, neighbor_opinions, params.alpha);
    return next;
}

} // namespace ferry
