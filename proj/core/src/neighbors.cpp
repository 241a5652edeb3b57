#include "ferrysim/neighbors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ferry {

Adjacency::Adjacency(std::vector<std::uint32_t> offsets, std::vector<std::uint32_t> indices)
    : offsets_(std::move(offsets)), indices_(std::move(indices)) {
    if (offsets_.empty() || offsets_.front() != 0 || offsets_.back() != indices_.size() ||
        !std::is_sorted(offsets_.begin(), offsets_.end())) {
        throw std::invalid_argument("adjacency: malformed offsets");
    }
}

bool Adjacency::adjacent(std::size_t i, std::size_t j) const noexcept {
    const auto list = neighbors(i);
    return std::binary_search(list.begin(), list.end(), static_cast<std::uint32_t>(j));
}

Adjacency Adjacency::from_edges(std::size_t node_count,
                                std::span<const std::pair<std::uint32_t, std::uint32_t>> edges) {
    std::vector<std::vector<std::uint32_t>> lists(node_count);
    for (auto [a, b] : edges) {
        if (a >= node_count || b >= node_count) throw std::out_of_range("adjacency: edge endpoint out of range");
        if (a == b) continue;
        lists[a].push_back(b);
        lists[b].push_back(a);
    }
    std::vector<std::uint32_t> offsets{0};
    std::vector<std::uint32_t> indices;
    for (auto& l : lists) {
        std::sort(l.begin(), l.end());
        l.erase(std::unique(l.begin(), l.end()), l.end());
        indices.insert(indices.end(), l.begin(), l.end());
        offsets.push_back(static_cast<std::uint32_t>(indices.size()));
    }
    return Adjacency(std::move(offsets), std::move(indices));
}

void NeighborGrid::build(std::span<const Vec2> positions, double r_comm, Adjacency& out) {
    if (!(r_comm > 0.0)) throw std::invalid_argument("neighbors: r_comm must be positive");
    const std::size_t n = positions.size();
    out.offsets_.assign(1, 0);
    out.indices_.clear();
    if (n == 0) return;

    Vec2 lo = positions[0];
    Vec2 hi = positions[0];
    for (const Vec2 p : positions) {
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
    }
    // Cells at least r wide so that every in-range pair sits in adjacent cells.
    constexpr double kMaxCellsPerAxis = 256.0;
    const double extent = std::max(hi.x - lo.x, hi.y - lo.y);
    const double cell = std::max(r_comm * (1.0 + 1e-9), extent / kMaxCellsPerAxis);
    const auto nx = static_cast<std::uint32_t>((hi.x - lo.x) / cell) + 1;
    const auto ny = static_cast<std::uint32_t>((hi.y - lo.y) / cell) + 1;

    cell_of_.resize(n);
    cell_start_.assign(std::size_t{nx} * ny + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto cx = std::min(static_cast<std::uint32_t>((positions[i].x - lo.x) / cell), nx - 1);
        const auto cy = std::min(static_cast<std::uint32_t>((positions[i].y - lo.y) / cell), ny - 1);
        cell_of_[i] = cy * nx + cx;
        ++cell_start_[cell_of_[i] + 1];
    }
    for (std::size_t c = 1; c < cell_start_.size(); ++c) cell_start_[c] += cell_start_[c - 1];
    cell_items_.resize(n);
    {
        std::vector<std::uint32_t> fill(cell_start_.begin(), cell_start_.end() - 1);
        for (std::size_t i = 0; i < n; ++i) cell_items_[fill[cell_of_[i]]++] = static_cast<std::uint32_t>(i);
    }

    const double r2 = r_comm * r_comm;
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint32_t cx = cell_of_[i] % nx;
        const std::uint32_t cy = cell_of_[i] / nx;
        const std::size_t begin = out.indices_.size();
        for (std::uint32_t y = cy == 0 ? 0 : cy - 1; y <= std::min(cy + 1, ny - 1); ++y) {
            for (std::uint32_t x = cx == 0 ? 0 : cx - 1; x <= std::min(cx + 1, nx - 1); ++x) {
                const std::uint32_t c = y * nx + x;
                for (std::uint32_t k = cell_start_[c]; k < cell_start_[c + 1]; ++k) {
                    const std::uint32_t j = cell_items_[k];
                    if (j != i && squared_distance(positions[i], positions[j]) <= r2) out.indices_.push_back(j);
                }
            }
        }
        std::sort(out.indices_.begin() + static_cast<std::ptrdiff_t>(begin), out.indices_.end());
        out.offsets_.push_back(static_cast<std::uint32_t>(out.indices_.size()));
    }
}

Adjacency compute_neighbors(std::span<const Vec2> positions, double r_comm) {
    Adjacency adjacency;
    NeighborGrid grid;
    grid.build(positions, r_comm, adjacency);
    return adjacency;
}

} // namespace ferry
