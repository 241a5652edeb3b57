#include <gtest/gtest.h>

#include <map>
#include <numeric>

#include "ferrysim/engine.hpp"
#include "ferrysim/sweep.hpp"

using namespace ferry;

namespace {

SimConfig small_config() {
    SimConfig c;
    c.model.n_agents = 30;
    c.model.t_final = 600;
    c.dmp = {0.02, 0.02};
    c.metrics_stride = 50;
    c.snapshot_ticks = {100, 300};
    c.master_seed = 42;
    return c;
}

std::vector<std::uint64_t> every_tick(std::uint64_t from, std::uint64_t to) {
    std::vector<std::uint64_t> v(to - from + 1);
    std::iota(v.begin(), v.end(), from);
    return v;
}

} // namespace

TEST(Engine, SameSeedGivesIdenticalRuns) {
    const SimConfig c = small_config();
    const RunResult a = run_simulation(c, 3);
    const RunResult b = run_simulation(c, 3);
    EXPECT_EQ(a.trajectory_digest, b.trajectory_digest);
    EXPECT_EQ(a.series, b.series);
    ASSERT_EQ(a.final_snapshot.size(), b.final_snapshot.size());
    for (std::size_t i = 0; i < a.final_snapshot.size(); ++i) {
        EXPECT_EQ(a.final_snapshot[i].pos, b.final_snapshot[i].pos);
        EXPECT_EQ(a.final_snapshot[i].opinion, b.final_snapshot[i].opinion);
    }
}

TEST(Engine, SeedAndRunIndexChangeTheTrajectory) {
    SimConfig c = small_config();
    const auto base = run_simulation(c, 0).trajectory_digest;
    EXPECT_NE(base, run_simulation(c, 1).trajectory_digest);
    c.master_seed = 43;
    EXPECT_NE(base, run_simulation(c, 0).trajectory_digest);
}

TEST(Engine, ConfigDigestTracksEveryField) {
    const SimConfig c = small_config();
    const auto d = config_digest(c);
    EXPECT_EQ(d, config_digest(small_config()));
    SimConfig other = c;
    other.model.alpha = 0.98;
    EXPECT_NE(d, config_digest(other));
    other = c;
    other.model.messenger_walk = MessengerWalk::Uncorrelated;
    EXPECT_NE(d, config_digest(other));
    other = c;
    other.landscape = RidgeParams{};
    EXPECT_NE(d, config_digest(other));
    other = c;
    other.snapshot_ticks.push_back(500);
    EXPECT_NE(d, config_digest(other));
}

TEST(Engine, NoSwitchingRunMatchesBaseline) {
    SimConfig c = small_config();
    c.dmp = {0.3, 0.0};
    c.init_policy = InitialStatePolicy::all_exploiters();
    const RunResult a = run_simulation(c);
    const RunResult b = run_simulation(baseline_of(small_config()));
    EXPECT_EQ(a.trajectory_digest, b.trajectory_digest);
    EXPECT_EQ(a.series, b.series);
}

TEST(Engine, StationaryPolicyWithoutSwitchingMatchesBaseline) {
    // The role draw comes after the position and opinion draws, so it cannot
    // shift the initial population.
    SimConfig c = small_config();
    c.dmp = {0.5, 0.0};
    EXPECT_EQ(run_simulation(c).trajectory_digest, run_simulation(baseline_of(c)).trajectory_digest);
}

TEST(Engine, InitialPopulationIsSharedAcrossSwitchingRates) {
    SimConfig a = small_config();
    SimConfig b = small_config();
    a.init_policy = b.init_policy = InitialStatePolicy::all_exploiters();
    b.dmp = {0.001, 0.2};
    const Landscape l(a.landscape, a.model.arena);
    const auto pa = initialize_agents(a, l, 5);
    const auto pb = initialize_agents(b, l, 5);
    for (std::size_t i = 0; i < pa.size(); ++i) {
        EXPECT_EQ(pa[i].pos, pb[i].pos);
        EXPECT_EQ(pa[i].opinion, pb[i].opinion);
    }
}

TEST(Engine, InitializationIsUniformAndNoisy) {
    SimConfig c = small_config();
    c.model.n_agents = 5000;
    c.init_policy = InitialStatePolicy::fixed_count(7);
    const Landscape l(c.landscape, c.model.arena);
    const auto agents = initialize_agents(c, l, 0);
    double mx = 0.0, my = 0.0, resid = 0.0;
    std::size_t messengers = 0;
    for (const Agent& a : agents) {
        ASSERT_TRUE(c.model.arena.contains(a.pos));
        mx += a.pos.x;
        my += a.pos.y;
        resid += (a.opinion - l.value(a.pos)) * (a.opinion - l.value(a.pos));
        messengers += a.state == AgentState::Messenger;
        EXPECT_EQ(a.prev_pos, a.pos);
        EXPECT_EQ(a.grad_mem, Vec2{});
    }
    EXPECT_EQ(messengers, 7u);
    const double n = static_cast<double>(agents.size());
    // Uniform on [0,2]: mean 1, standard deviation 2/sqrt(12).
    EXPECT_NEAR(mx / n, 1.0, 4.0 * 0.5774 / std::sqrt(n));
    EXPECT_NEAR(my / n, 1.0, 4.0 * 0.5774 / std::sqrt(n));
    EXPECT_NEAR(std::sqrt(resid / n), c.model.sigma, 0.1 * c.model.sigma);
}

TEST(Engine, AgentsStayInsideTheArenaEveryTick) {
    SimConfig c = small_config();
    c.model.step_size = 0.05;
    c.model.arena = {1.0, 0.5};
    c.landscape = RadialConeParams{{0.5, 0.25}};
    c.model.t_final = 300;
    c.snapshot_ticks = every_tick(1, 300);
    const RunResult r = run_simulation(c);
    ASSERT_EQ(r.snapshots.size(), 300u);
    for (const auto& snap : r.snapshots) {
        for (const Agent& a : snap.agents) ASSERT_TRUE(c.model.arena.contains(a.pos)) << "t=" << snap.t;
    }
}

TEST(Engine, MessengersCarryTheirOpinionUnchanged) {
    SimConfig c = small_config();
    c.dmp = {0.05, 0.05};
    c.model.t_final = 400;
    c.snapshot_ticks = every_tick(1, 400);
    const RunResult r = run_simulation(c);
    std::size_t checked = 0, pickups = 0, returns = 0;
    for (std::size_t k = 1; k < r.snapshots.size(); ++k) {
        const auto& before = r.snapshots[k - 1].agents;
        const auto& after = r.snapshots[k].agents;
        for (std::size_t i = 0; i < before.size(); ++i) {
            if (after[i].state != AgentState::Messenger) {
                if (before[i].state == AgentState::Messenger) ++returns;
                continue;
            }
            // Both staying a Messenger and becoming one keep the opinion.
            ASSERT_EQ(after[i].opinion, before[i].opinion);
            ++checked;
            if (before[i].state == AgentState::Exploiter) ++pickups;
            EXPECT_LE(norm(after[i].pos - before[i].pos), c.model.step_size + 1e-12);
        }
    }
    EXPECT_GT(checked, 1000u);
    EXPECT_GT(pickups, 50u);
    EXPECT_GT(returns, 50u);
}

TEST(Engine, ReturningMessengerAdoptsLocalSample) {
    SimConfig c = small_config();
    c.dmp = {0.05, 0.05};
    c.model.t_final = 400;
    c.model.sigma = 0.0;
    c.snapshot_ticks = every_tick(1, 400);
    const RunResult r = run_simulation(c);
    const Landscape l(c.landscape, c.model.arena);
    const double w = c.model.alpha;
    std::size_t seen = 0;
    for (std::size_t k = 1; k < r.snapshots.size(); ++k) {
        const auto& before = r.snapshots[k - 1].agents;
        const auto& after = r.snapshots[k].agents;
        for (std::size_t i = 0; i < before.size(); ++i) {
            if (before[i].state != AgentState::Messenger || after[i].state != AgentState::Exploiter) continue;
            // After the re-sample the opinion is f at the return position, then one
            // opinion update pulls it by at most (1-alpha) of the spread.
            const double sample = l.value(before[i].pos);
            EXPECT_NEAR(after[i].opinion, sample, (1.0 - w) * 4.0);
            ++seen;
        }
    }
    EXPECT_GT(seen, 50u);
}

TEST(Engine, MetricRowsFollowTheStride) {
    SimConfig c = small_config();
    const RunResult r = run_simulation(c);
    ASSERT_EQ(r.series.size(), c.model.t_final / c.metrics_stride + 1);
    for (std::size_t k = 0; k < r.series.size(); ++k) EXPECT_EQ(r.series[k].t, k * c.metrics_stride);
    ASSERT_EQ(r.snapshots.size(), 2u);
    EXPECT_EQ(r.snapshots[0].t, 100u);
    EXPECT_EQ(r.snapshots[1].t, 300u);
    EXPECT_EQ(r.snapshots[1].metrics, r.series[6]);
    EXPECT_EQ(r.final_snapshot.size(), c.model.n_agents);

    c.model.t_final = 625;
    c.snapshot_ticks = {0, 625, 1000};
    const RunResult odd = run_simulation(c);
    EXPECT_EQ(odd.series.size(), 13u);
    ASSERT_EQ(odd.snapshots.size(), 2u);
    EXPECT_EQ(odd.snapshots[0].t, 0u);
    EXPECT_EQ(odd.snapshots[1].t, 625u);
}

TEST(Engine, ZeroTicksRecordsOnlyTheInitialState) {
    SimConfig c = small_config();
    c.model.t_final = 0;
    c.init_policy = InitialStatePolicy::fixed_count(3);
    const RunResult r = run_simulation(c);
    ASSERT_EQ(r.series.size(), 1u);
    EXPECT_EQ(r.series[0].t, 0u);
    EXPECT_DOUBLE_EQ(r.mean_messenger_ratio, 0.1);
    const Landscape l(c.landscape, c.model.arena);
    const auto init = initialize_agents(c, l, 0);
    for (std::size_t i = 0; i < init.size(); ++i) EXPECT_EQ(r.final_snapshot[i].pos, init[i].pos);
}

TEST(Engine, MessengerRatioTracksDmp) {
    SimConfig c = small_config();
    c.model.n_agents = 100;
    c.model.t_final = 3000;
    c.dmp = {0.05, 0.02};
    const RunResult r = run_simulation(c);
    EXPECT_NEAR(r.mean_messenger_ratio, expected_messenger_ratio(c.dmp), 0.03);
    for (const auto& m : r.series) {
        EXPECT_GE(m.messenger_ratio, 0.0);
        EXPECT_LE(m.messenger_ratio, 1.0);
    }
}

TEST(Engine, OpinionsStayWithinSignalRange) {
    // Each update is a convex combination, so opinions stay within the range
    // spanned by the initial opinions and every sample seen so far.
    SimConfig c = small_config();
    c.model.sigma = 0.0;
    c.model.t_final = 500;
    const RunResult r = run_simulation(c);
    const double fmax = std::sqrt(2.0);
    for (const Agent& a : r.final_snapshot) {
        EXPECT_GE(a.opinion, 0.0);
        EXPECT_LE(a.opinion, fmax);
    }
}

TEST(Engine, BothMessengerWalksRun) {
    SimConfig c = small_config();
    c.model.messenger_walk = MessengerWalk::Uncorrelated;
    const RunResult u = run_simulation(c);
    c.model.messenger_walk = MessengerWalk::Persistent;
    const RunResult p = run_simulation(c);
    EXPECT_NE(u.trajectory_digest, p.trajectory_digest);
    EXPECT_EQ(u.series.front(), p.series.front());
}

TEST(Engine, InvalidConfigurationsThrowBeforeRunning) {
    const auto expect_field = [](SimConfig c, const std::string& field) {
        try {
            (void)run_simulation(c);
            ADD_FAILURE() << "no error for " << field;
        } catch (const ConfigError& e) {
            EXPECT_EQ(e.field(), field);
        }
    };
    SimConfig c = small_config();
    c.model.alpha = 1.5;
    expect_field(c, "model.alpha");
    c = small_config();
    c.dmp.p_m = -0.1;
    expect_field(c, "dmp.p_m");
    c = small_config();
    c.model.n_agents = 0;
    expect_field(c, "model.n_agents");
    c = small_config();
    c.model.r_comm = 0.0;
    expect_field(c, "model.r_comm");
    c = small_config();
    c.model.step_size = -1.0;
    expect_field(c, "model.step_size");
    c = small_config();
    c.model.sigma = std::nan("");
    expect_field(c, "model.sigma");
    c = small_config();
    c.init_policy = InitialStatePolicy::fixed_count(31);
    expect_field(c, "init.count");
    c = small_config();
    c.dmp = {0.0, 0.0};
    expect_field(c, "init.policy");
    c = small_config();
    c.landscape = RadialConeParams{{5.0, 1.0}};
    expect_field(c, "landscape");
    c = small_config();
    c.snapshot_ticks = {10, 10};
    expect_field(c, "output.snapshot_ticks");
    c = small_config();
    c.metrics_stride = 0;
    expect_field(c, "output.metrics_stride");
}

TEST(Engine, SeedStreamsAreDistinctPerAgentAndPurpose) {
    const RunStreams s = seed_streams(9, 2, 50);
    ASSERT_EQ(s.agents.size(), 50u);
    std::map<std::uint32_t, int> firsts;
    for (auto st : s.agents) {
        ++firsts[st.init.next_u32()];
        ++firsts[st.dynamics.next_u32()];
        ++firsts[st.dmp.next_u32()];
    }
    RngStream run = s.run;
    ++firsts[run.next_u32()];
    EXPECT_EQ(firsts.size(), 151u);
}
