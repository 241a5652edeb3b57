#include <gtest/gtest.h>

#include <cmath>

#include "ferrysim/sweep.hpp"
#include "oracles.hpp"

using namespace ferry;

namespace {

SimConfig tiny_config() {
    SimConfig c;
    c.model.n_agents = 20;
    c.model.t_final = 300;
    c.metrics_stride = 100;
    c.snapshot_ticks = {100, 200};
    c.master_seed = 7;
    return c;
}

SweepSpec two_by_two(std::uint32_t replicates) {
    SweepSpec s;
    s.grid = {{0.01, 0.001}, {0.01, 0.05}, {0.2, 0.001}, {0.2, 0.05}};
    s.replicates = replicates;
    return s;
}

void expect_same(const SweepResult& a, const SweepResult& b) {
    ASSERT_EQ(a.runs.size(), b.runs.size());
    for (std::size_t i = 0; i < a.runs.size(); ++i) {
        EXPECT_EQ(a.runs[i].trajectory_digest, b.runs[i].trajectory_digest);
        EXPECT_EQ(a.runs[i].final, b.runs[i].final);
    }
    EXPECT_EQ(a.e_p_o.normalized.median, b.e_p_o.normalized.median);
    EXPECT_EQ(a.e_p_s.raw.mean, b.e_p_s.raw.mean);
}

} // namespace

TEST(Stats, MatchesOracles) {
    const std::vector<double> v{3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0, 6.0};
    const Stats s = Stats::of(v);
    EXPECT_EQ(s.count, 8u);
    EXPECT_DOUBLE_EQ(s.mean, 31.0 / 8.0);
    EXPECT_DOUBLE_EQ(s.median, 3.5);
    EXPECT_DOUBLE_EQ(s.min, 1.0);
    EXPECT_DOUBLE_EQ(s.max, 9.0);
    EXPECT_NEAR(s.stddev, std::sqrt(oracle::variance(v) * 8.0 / 7.0), 1e-12);
    EXPECT_DOUBLE_EQ(Stats::of(std::vector<double>{2.0, 7.0, 1.0}).median, 2.0);
    EXPECT_EQ(Stats::of(std::vector<double>{4.0}).stddev, 0.0);
    EXPECT_EQ(Stats::of(std::vector<double>{}).count, 0u);
}

TEST(SweepSpec, LogGridOrderAndSpacing) {
    const SweepSpec s = SweepSpec::log_grid(-20.0, -2.0, 19, 24);
    ASSERT_EQ(s.grid.size(), 361u);
    EXPECT_EQ(s.replicates, 24u);
    EXPECT_NEAR(s.grid.front().p_e, std::exp(-20.0), 1e-22);
    EXPECT_NEAR(s.grid.back().p_m, std::exp(-2.0), 1e-15);
    // p_e-major: the first row shares p_e and sweeps p_m.
    for (std::size_t j = 1; j < 19; ++j) {
        EXPECT_EQ(s.grid[j].p_e, s.grid[0].p_e);
        EXPECT_NEAR(std::log(s.grid[j].p_m) - std::log(s.grid[j - 1].p_m), 1.0, 1e-12);
    }
    EXPECT_NEAR(std::log(s.grid[19].p_e) - std::log(s.grid[0].p_e), 1.0, 1e-12);
    EXPECT_EQ(SweepSpec::log_grid(-3.0, -3.0, 1, 1).grid.size(), 1u);
    EXPECT_THROW((void)SweepSpec::log_grid(-2.0, -3.0, 3, 1), std::invalid_argument);
    EXPECT_THROW((void)SweepSpec::log_grid(-2.0, 1.0, 3, 1), std::invalid_argument);
    EXPECT_THROW((void)SweepSpec::log_grid(-2.0, -1.0, 0, 1), std::invalid_argument);
}

TEST(Sweep, ResultsDoNotDependOnParallelism) {
    const SimConfig c = tiny_config();
    const SweepOutput serial = run_sweep(two_by_two(3), c, 1);
    const SweepOutput threaded = run_sweep(two_by_two(3), c, 4);
    expect_same(serial.baseline, threaded.baseline);
    ASSERT_EQ(serial.cells.size(), 4u);
    for (std::size_t i = 0; i < 4; ++i) expect_same(serial.cells[i], threaded.cells[i]);
}

TEST(Sweep, BaselineNormalizesToOne) {
    const SweepOutput out = run_sweep(two_by_two(3), tiny_config());
    EXPECT_TRUE(out.baseline.e_p_o.normalized_valid);
    EXPECT_DOUBLE_EQ(out.baseline.e_p_o.normalized.median, 1.0);
    EXPECT_DOUBLE_EQ(out.baseline.e_p_s.normalized.mean, 1.0);
    EXPECT_EQ(out.baseline.messenger_ratio.max, 0.0);
    EXPECT_EQ(out.baseline.cell.p_m, 0.0);
}

TEST(Sweep, PairedCellsShareInitialPopulation) {
    const SweepOutput out = run_sweep(two_by_two(3), tiny_config());
    for (const auto& cell : out.cells) {
        ASSERT_EQ(cell.runs.size(), 3u);
        for (std::uint32_t r = 0; r < 3; ++r) {
            EXPECT_EQ(cell.runs[r].replicate, r);
            EXPECT_EQ(cell.runs[r].run_index, r);
            // Same positions imply the same spatial error at t = 0.
            EXPECT_EQ(cell.runs[r].initial.e_p_s, out.baseline.runs[r].initial.e_p_s);
        }
    }
}

TEST(Sweep, PairedRatiosMatchPerReplicateOracle) {
    const SweepOutput out = run_sweep(two_by_two(5), tiny_config());
    for (const auto& cell : out.cells) {
        std::vector<double> ratios;
        for (std::size_t r = 0; r < cell.runs.size(); ++r) {
            ratios.push_back(cell.runs[r].final.e_p_o / out.baseline.runs[r].final.e_p_o);
        }
        EXPECT_DOUBLE_EQ(cell.e_p_o.normalized.median, oracle::median(ratios));
    }
}

TEST(Sweep, UnpairedRunsUseDistinctPopulations) {
    SweepSpec spec = two_by_two(3);
    spec.paired = false;
    const SweepOutput out = run_sweep(spec, tiny_config());
    std::vector<double> ref;
    for (const auto& r : out.baseline.runs) ref.push_back(r.final.e_p_o);
    const double ref_median = oracle::median(ref);
    for (std::size_t c = 0; c < out.cells.size(); ++c) {
        const auto& cell = out.cells[c];
        EXPECT_NE(cell.runs[0].initial.e_p_s, out.baseline.runs[0].initial.e_p_s);
        EXPECT_EQ(cell.runs[1].run_index, (c + 1) * 3 + 1);
        std::vector<double> ratios;
        for (const auto& r : cell.runs) ratios.push_back(r.final.e_p_o / ref_median);
        EXPECT_DOUBLE_EQ(cell.e_p_o.normalized.median, oracle::median(ratios));
    }
}

TEST(Sweep, FailingCellIsCapturedAndOthersComplete) {
    SweepSpec spec = two_by_two(2);
    spec.grid[1].p_m = 2.0;
    const SweepOutput out = run_sweep(spec, tiny_config());
    EXPECT_EQ(out.cells[1].failed, 2u);
    EXPECT_FALSE(out.cells[1].runs[0].ok);
    EXPECT_NE(out.cells[1].runs[0].error.find("dmp.p_m"), std::string::npos);
    EXPECT_FALSE(out.cells[1].e_p_o.normalized_valid);
    for (std::size_t c : {0u, 2u, 3u}) {
        EXPECT_EQ(out.cells[c].failed, 0u);
        EXPECT_TRUE(out.cells[c].e_p_o.normalized_valid);
    }
}

TEST(Sweep, DegenerateBaselineIsReportedNotDivided) {
    SimConfig c = tiny_config();
    c.model.n_agents = 1;
    c.init_policy = InitialStatePolicy::all_exploiters();
    const SweepOutput out = run_sweep(two_by_two(2), c);
    for (const auto& cell : out.cells) {
        EXPECT_FALSE(cell.e_p_o.normalized_valid);
        EXPECT_FALSE(cell.notes.empty());
        EXPECT_EQ(cell.e_p_o.raw.max, 0.0);
        for (const auto& p : cell.temporal) EXPECT_FALSE(p.e_p_o_norm_median.has_value());
    }
}

TEST(Sweep, TemporalMediansAtSnapshotTicks) {
    const SweepOutput out = run_sweep(two_by_two(3), tiny_config());
    for (const auto& cell : out.cells) {
        ASSERT_EQ(cell.temporal.size(), 2u);
        EXPECT_EQ(cell.temporal[0].t, 100u);
        EXPECT_EQ(cell.temporal[1].t, 200u);
        std::vector<double> v;
        for (const auto& r : cell.runs) v.push_back(r.snapshot_metrics[1].e_p_o);
        EXPECT_DOUBLE_EQ(cell.temporal[1].e_p_o_median, oracle::median(v));
        ASSERT_TRUE(cell.temporal[1].e_p_o_norm_median.has_value());
    }
}

TEST(Sweep, RejectsEmptyInputs) {
    SweepSpec spec = two_by_two(0);
    EXPECT_THROW((void)run_sweep(spec, tiny_config()), std::invalid_argument);
    spec = SweepSpec{};
    EXPECT_THROW((void)run_sweep(spec, tiny_config()), std::invalid_argument);
    SimConfig bad = tiny_config();
    bad.model.alpha = -1.0;
    EXPECT_THROW((void)run_sweep(two_by_two(1), bad), ConfigError);
}

TEST(Sweep, SeriesKeptOnRequest) {
    SweepSpec spec = two_by_two(1);
    const SweepOutput without = run_sweep(spec, tiny_config());
    EXPECT_TRUE(without.cells[0].runs[0].series.empty());
    spec.keep_series = true;
    const SweepOutput with = run_sweep(spec, tiny_config());
    EXPECT_EQ(with.cells[0].runs[0].series.size(), 4u);
}

TEST(Connectivity, SortedAndMonotoneInRange) {
    SimConfig c = tiny_config();
    c.model.n_agents = 60;
    c.model.t_final = 100;
    const std::vector<double> radii{0.6, 0.1, 3.0, 0.3, 0.1};
    const auto points = connectivity_sweep(radii, c, 4);
    ASSERT_EQ(points.size(), 4u);
    for (std::size_t i = 1; i < points.size(); ++i) {
        EXPECT_LT(points[i - 1].r_comm, points[i].r_comm);
        // Larger radii only add edges to the same initial graph.
        for (std::size_t r = 0; r < 4; ++r) {
            EXPECT_LE(points[i].runs[r].initial.n_clusters, points[i - 1].runs[r].initial.n_clusters);
        }
    }
    EXPECT_EQ(points.back().initial_clusters.max, 1.0);
    for (const auto& p : points) {
        for (const auto& r : p.runs) EXPECT_EQ(r.mean_messenger_ratio, 0.0);
    }
}

TEST(Connectivity, RejectsBadInput) {
    const std::vector<double> bad{0.1, -0.2};
    EXPECT_THROW((void)connectivity_sweep(bad, tiny_config(), 1), std::invalid_argument);
    const std::vector<double> zero{0.0};
    EXPECT_THROW((void)connectivity_sweep(zero, tiny_config(), 1), std::invalid_argument);
    const std::vector<double> ok{0.2};
    EXPECT_THROW((void)connectivity_sweep(ok, tiny_config(), 0), std::invalid_argument);
}

TEST(ParallelFor, VisitsEveryJobOnce) {
    for (unsigned p : {1u, 3u, 16u}) {
        std::vector<int> hits(97, 0);
        parallel_for(hits.size(), p, [&](std::size_t k) { ++hits[k]; });
        for (int h : hits) EXPECT_EQ(h, 1);
    }
}
