#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "ferrysim/engine.hpp"
#include "ferrysim/landscape.hpp"
#include "ferrysim/metrics.hpp"
#include "ferrysim/neighbors.hpp"

using namespace ferry;

namespace {

std::vector<Vec2> random_points(std::size_t n, std::uint64_t seed, double side = 2.0) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(0.0, side);
    std::vector<Vec2> pts(n);
    for (auto& p : pts) p = {u(gen), u(gen)};
    return pts;
}

// Quadratic reference for comparison with the cell grid.
std::size_t brute_force_edges(const std::vector<Vec2>& pts, double r) {
    std::size_t edges = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) edges += squared_distance(pts[i], pts[j]) <= r * r;
    }
    return edges;
}

// Arena side growing with sqrt(N) keeps the default density of 100 agents on 2x2.
double constant_density_side(std::int64_t n) { return 2.0 * std::sqrt(static_cast<double>(n) / 100.0); }

void BM_NeighborGrid(benchmark::State& state) {
    const auto pts = random_points(static_cast<std::size_t>(state.range(0)), 1, constant_density_side(state.range(0)));
    NeighborGrid grid;
    Adjacency adj;
    for (auto _ : state) {
        grid.build(pts, 0.15, adj);
        benchmark::DoNotOptimize(adj.edge_count());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_NeighborGrid)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

void BM_NeighborBruteForce(benchmark::State& state) {
    const auto pts = random_points(static_cast<std::size_t>(state.range(0)), 1, constant_density_side(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(brute_force_edges(pts, 0.15));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_NeighborBruteForce)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

void BM_ClusterCount(benchmark::State& state) {
    const auto pts = random_points(static_cast<std::size_t>(state.range(0)), 2);
    const Adjacency adj = compute_neighbors(pts, 0.15);
    for (auto _ : state) benchmark::DoNotOptimize(metrics::count_clusters(adj));
}
BENCHMARK(BM_ClusterCount)->Arg(100)->Arg(1000)->Arg(10000);

void BM_LandscapeEvaluate(benchmark::State& state) {
    const Arena arena;
    const Landscape l(default_landscape_spec(static_cast<LandscapeKind>(state.range(0)), arena), arena);
    const auto pts = random_points(1024, 3);
    for (auto _ : state) {
        double sum = 0.0;
        for (const Vec2& p : pts) sum += l.value(p);
        benchmark::DoNotOptimize(sum);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(pts.size()));
    state.SetLabel(std::string(to_string(l.kind())));
}
BENCHMARK(BM_LandscapeEvaluate)->DenseRange(0, 3);

void BM_Simulation(benchmark::State& state) {
    SimConfig c;
    c.model.n_agents = static_cast<std::uint32_t>(state.range(0));
    c.model.t_final = 1000;
    c.metrics_stride = 100;
    c.snapshot_ticks.clear();
    for (auto _ : state) benchmark::DoNotOptimize(run_simulation(c).trajectory_digest);
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(c.model.t_final));
    state.SetLabel("items = ticks");
}
BENCHMARK(BM_Simulation)->Arg(100)->Arg(400)->Arg(1600)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
