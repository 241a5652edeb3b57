#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>

#include "ferrysim/agent.hpp"
#include "ferrysim/landscape.hpp"
#include "ferrysim/neighbors.hpp"

namespace ferry {

/// Collective state recorded at one tick.
struct TickMetrics {
    std::uint64_t t = 0;
    double e_p_o = 0.0;          // opinion precision error
    double e_p_s = 0.0;          // spatial precision error
    std::uint32_t n_clusters = 0;
    double messenger_ratio = 0.0;
    double collective_opinion = 0.0; // z_col
    double collective_signal = 0.0;  // s_col, mean noiseless field value

    friend bool operator==(const TickMetrics&, const TickMetrics&) = default;
};

/// Thrown when a normalization reference is not strictly positive.
class DegenerateBaseline : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

namespace metrics {

/// Population variance (divisor N). Exactly zero iff all values are equal.
/// Throws std::invalid_argument on an empty list.
[[nodiscard]] double population_variance(std::span<const double> values);

/// Variance of the opinions about their mean.
[[nodiscard]] double opinion_precision_error(std::span<const double> opinions);

/// Variance of the noiseless field values f(pos_i). Throws std::domain_error
/// for a position outside the arena.
[[nodiscard]] double spatial_precision_error(std::span<const Vec2> positions, const Landscape& landscape);

/// Connected components; isolated nodes count as components.
[[nodiscard]] std::uint32_t count_clusters(const Adjacency& adjacency);

/// value / baseline_value; throws DegenerateBaseline when baseline_value <= 0.
[[nodiscard]] double normalize_to_baseline(double value, double baseline_value);

/// All metrics for one population snapshot.
[[nodiscard]] TickMetrics measure(std::uint64_t t, std::span<const Agent> agents, const Landscape& landscape,
                                  const Adjacency& adjacency);

} // namespace metrics
} // namespace ferry
