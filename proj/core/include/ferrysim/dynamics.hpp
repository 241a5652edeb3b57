#pragma once

#include <span>

#include "ferrysim/agent.hpp"
#include "ferrysim/landscape.hpp"

// Per-agent tick physics: sensing, opinion integration, dissonance,
// pseudo-gradient motion and the Messenger random walk.
namespace ferry {

/// f(pos) plus Normal(0, noise_sigma^2) noise drawn from `rng`. No draw is
/// consumed when noise_sigma is zero. Throws std::domain_error outside the arena.
double sample_environment(const Landscape& landscape, Vec2 pos, double noise_sigma, RngStream& rng);

/// alpha*z + (1-alpha)/(1+N) * (s + sum of neighbor opinions).
[[nodiscard]] double update_opinion(double opinion, double env_signal, std::span<const double> neighbor_opinions,
                                    double alpha) noexcept;

/// Mean neighbor opinion; falls back to the agent's own opinion when alone.
[[nodiscard]] double local_mean_opinion(double self_opinion, std::span<const double> neighbor_opinions) noexcept;

[[nodiscard]] constexpr double dissonance(double env_signal, double local_mean) noexcept {
    const double diff = env_signal - local_mean;
    return 0.5 * diff * diff;
}

/// Axis displacements smaller than this contribute no finite-difference sample.
inline constexpr double kMinAxisDisplacement = 1e-12;

/// beta*g + (1-beta)*[dd/dx, dd/dy], with dd/dx estimated from the last step.
[[nodiscard]] Vec2 update_gradient_estimate(Vec2 grad_mem, Vec2 pos, Vec2 prev_pos, double new_dissonance,
                                            double prev_dissonance, double beta) noexcept;

/// Two independent Uniform[-1,1] components.
[[nodiscard]] Vec2 random_direction(RngStream& rng) noexcept;

/// (1-r_lambda) * (-g/|g|) + r_lambda * eta. The gradient term is dropped when
/// g is zero. The result is not normalized and may be zero.
[[nodiscard]] Vec2 movement_direction(Vec2 grad_mem, double r_lambda, RngStream& rng) noexcept;

/// Moves exactly `step_size` along `direction`, then mirrors back into the arena.
/// `direction` must be non-zero.
[[nodiscard]] Vec2 take_step(Vec2 pos, Vec2 direction, double step_size, const Arena& arena) noexcept;

/// One random-walk step of exactly `step_size`. The opinion is untouched.
void messenger_step(Agent& agent, double step_size, const Arena& arena,
                    MessengerWalk walk = MessengerWalk::Persistent);

/// One Exploiter update from the snapshot opinions of its neighbors
/// (Messengers included). Returns the updated agent; `agent` is not modified.
[[nodiscard]] Agent exploiter_tick(const Agent& agent, std::span<const double> neighbor_opinions,
                                   const Landscape& landscape, const ModelParams& params);

} // namespace ferry
