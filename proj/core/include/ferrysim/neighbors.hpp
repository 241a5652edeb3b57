#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ferrysim/geometry.hpp"

namespace ferry {

/// Undirected communication graph in compressed-row form. Neighbor lists are
/// sorted by agent index so that sums over them are order-stable.
class Adjacency {
public:
    Adjacency() = default;
    Adjacency(std::vector<std::uint32_t> offsets, std::vector<std::uint32_t> indices);

    [[nodiscard]] std::size_t node_count() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
    [[nodiscard]] std::size_t edge_count() const noexcept { return indices_.size() / 2; }
    [[nodiscard]] std::span<const std::uint32_t> neighbors(std::size_t i) const noexcept {
        return {indices_.data() + offsets_[i], indices_.data() + offsets_[i + 1]};
    }
    [[nodiscard]] std::size_t degree(std::size_t i) const noexcept { return offsets_[i + 1] - offsets_[i]; }
    [[nodiscard]] bool adjacent(std::size_t i, std::size_t j) const noexcept;

    /// Builds the graph from an explicit undirected edge list.
    static Adjacency from_edges(std::size_t node_count,
                                std::span<const std::pair<std::uint32_t, std::uint32_t>> edges);

    friend bool operator==(const Adjacency&, const Adjacency&) = default;

private:
    friend class NeighborGrid;

    std::vector<std::uint32_t> offsets_{0};
    std::vector<std::uint32_t> indices_;
};

/// Pairs within Euclidean distance r_comm (inclusive), found with a uniform
/// cell grid. Requires r_comm > 0.
[[nodiscard]] Adjacency compute_neighbors(std::span<const Vec2> positions, double r_comm);

/// Reusable cell grid; keeps its buffers between ticks.
class NeighborGrid {
public:
    void build(std::span<const Vec2> positions, double r_comm, Adjacency& out);

private:
    std::vector<std::uint32_t> cell_start_;
    std::vector<std::uint32_t> cell_items_;
    std::vector<std::uint32_t> cell_of_;
};

} // namespace ferry
