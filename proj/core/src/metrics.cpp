#include "ferrysim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ferrysim/union_find.hpp"

namespace ferry::metrics {

double population_variance(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("precision error of an empty population");
    const double first = values.front();
    if (std::all_of(values.begin(), values.end(), [first](double v) { return v == first; })) return 0.0;
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double sum_sq = 0.0;
    for (double v : values) sum_sq += (v - mean) * (v - mean);
    return sum_sq / static_cast<double>(values.size());
}

double opinion_precision_error(std::span<const double> opinions) { return population_variance(opinions); }

double spatial_precision_error(std::span<const Vec2> positions, const Landscape& landscape) {
    std::vector<double> field(positions.size());
    std::transform(positions.begin(), positions.end(), field.begin(), [&](Vec2 p) { return landscape.at(p); });
    return population_variance(field);
}

std::uint32_t count_clusters(const Adjacency& adjacency) {
    UnionFind sets(adjacency.node_count());
    for (std::uint32_t i = 0; i < adjacency.node_count(); ++i) {
        for (std::uint32_t j : adjacency.neighbors(i)) {
            if (j > i) sets.unite(i, j);
        }
    }
    return static_cast<std::uint32_t>(sets.components());
}

double normalize_to_baseline(double value, double baseline_value) {
    if (!(baseline_value > 0.0)) {
        throw DegenerateBaseline("baseline value " + std::to_string(baseline_value) + " is not positive");
    }
    return value / baseline_value;
}

TickMetrics measure(std::uint64_t t, std::span<const Agent> agents, const Landscape& landscape,
                    const Adjacency& adjacency) {
    std::vector<double> opinions;
    std::vector<double> field;
    opinions.reserve(agents.size());
    field.reserve(agents.size());
    std::size_t messengers = 0;
    for (const Agent& a : agents) {
        opinions.push_back(a.opinion);
        field.push_back(landscape.at(a.pos));
        if (a.state == AgentState::Messenger) ++messengers;
    }
    const auto mean = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x;
        return s / static_cast<double>(v.size());
    };
    TickMetrics m;
    m.t = t;
    m.e_p_o = population_variance(opinions);
    m.e_p_s = population_variance(field);
    m.n_clusters = count_clusters(adjacency);
    m.messenger_ratio = static_cast<double>(messengers) / static_cast<double>(agents.size());
    m.collective_opinion = mean(opinions);
    m.collective_signal = mean(field);
    return m;
}

} // namespace ferry::metrics
