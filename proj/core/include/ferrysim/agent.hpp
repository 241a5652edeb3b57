#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "ferrysim/geometry.hpp"
#include "ferrysim/rng.hpp"

namespace ferry {

enum class AgentState : std::uint8_t { Exploiter, Messenger };

[[nodiscard]] constexpr std::string_view to_string(AgentState s) noexcept {
    return s == AgentState::Exploiter ? "E" : "M";
}
[[nodiscard]] constexpr std::optional<AgentState> parse_agent_state(std::string_view s) noexcept {
    if (s == "E") return AgentState::Exploiter;
    if (s == "M") return AgentState::Messenger;
    return std::nullopt;
}

/// Per-agent random streams, one per purpose so that role switching never
/// shifts the draws seen by the motion and sensing dynamics.
struct AgentStreams {
    RngStream init;
    RngStream dynamics;
    RngStream dmp;
    friend bool operator==(const AgentStreams&, const AgentStreams&) = default;
};

/// How a Messenger picks its heading.
/// Persistent: keeps one uniform random heading and draws a new one after every
/// wall reflection. Uncorrelated: draws a new heading every tick.
enum class MessengerWalk : std::uint8_t { Persistent, Uncorrelated };

[[nodiscard]] constexpr std::string_view to_string(MessengerWalk w) noexcept {
    return w == MessengerWalk::Persistent ? "persistent" : "uncorrelated";
}
[[nodiscard]] constexpr std::optional<MessengerWalk> parse_messenger_walk(std::string_view s) noexcept {
    if (s == "persistent") return MessengerWalk::Persistent;
    if (s == "uncorrelated") return MessengerWalk::Uncorrelated;
    return std::nullopt;
}

struct Agent {
    std::uint32_t id = 0;
    Vec2 pos;
    Vec2 prev_pos;
    double opinion = 0.0;
    AgentState state = AgentState::Exploiter;
    Vec2 grad_mem;               // decaying estimate of the dissonance gradient
    double prev_dissonance = 0.0; // dissonance evaluated at prev_pos
    Vec2 heading;                 // Messenger heading; zero means draw a new one
    AgentStreams rng;
};

/// Model constants. Defaults reproduce the published baseline setup.
struct ModelParams {
    std::uint32_t n_agents = 100;
    Arena arena{2.0, 2.0};
    double r_comm = 0.15;
    double alpha = 0.99;    // weight on the agent's own opinion
    double beta = 0.5;      // decay of the gradient memory
    double r_lambda = 0.001; // weight of the random-walk term in the heading
    double step_size = 0.002;
    double sigma = 0.001;    // measurement noise standard deviation
    std::uint64_t t_final = 50000;
    MessengerWalk messenger_walk = MessengerWalk::Persistent;

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

} // namespace ferry
