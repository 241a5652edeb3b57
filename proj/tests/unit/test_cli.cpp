#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "ferrysim/io.hpp"
#include "ferrysim_cli/cli.hpp"
#include "json.hpp"

using namespace ferry;
namespace cli = ferry::cli;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome invoke(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

class TempDir {
public:
    TempDir() {
        std::random_device rd;
        path_ = fs::temp_directory_path() / ("ferrysim-test-" + std::to_string(rd()) + std::to_string(rd()));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    [[nodiscard]] const fs::path& path() const { return path_; }
    [[nodiscard]] std::string operator/(const std::string& name) const { return (path_ / name).string(); }

private:
    fs::path path_;
};

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream(p) << text;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

constexpr const char* kSmallConfig = R"({
  "version": 1,
  "master_seed": 11,
  "model": {"n_agents": 20, "t_final": 2000},
  "sweep": {"log_min": -6, "log_max": -3, "resolution": 2, "replicates": 2},
  "output": {"metrics_stride": 500, "snapshot_ticks": [1000]}
})";

} // namespace

TEST(Cli, MissingConfigIsAUsageError) {
    const Outcome o = invoke({"run", "-c", "/nonexistent/cfg.json"});
    EXPECT_EQ(o.code, cli::kExitUsage);
    EXPECT_NE(o.err.find("ferrysim-error kind=io"), std::string::npos);
    EXPECT_NE(o.err.find("/nonexistent/cfg.json"), std::string::npos);
}

TEST(Cli, InvalidConfigNamesTheField) {
    TempDir dir;
    write_file(dir / "bad.json", R"({"version": 1, "model": {"alpha": 2}})");
    const Outcome o = invoke({"run", "-c", dir / "bad.json", "-o", dir / "out"});
    EXPECT_EQ(o.code, cli::kExitUsage);
    EXPECT_NE(o.err.find("kind=config field=model.alpha"), std::string::npos) << o.err;
}

TEST(Cli, UnknownOptionIsAUsageError) {
    EXPECT_EQ(invoke({"run", "--frobnicate"}).code, cli::kExitUsage);
    EXPECT_EQ(invoke({}).code, cli::kExitUsage);
    EXPECT_EQ(invoke({"sweep", "-j", "0"}).code, cli::kExitUsage);
}

TEST(Cli, DefaultsPrintsAParsableConfig) {
    const Outcome o = invoke({"defaults"});
    ASSERT_EQ(o.code, cli::kExitOk);
    EXPECT_EQ(io::parse_config(o.out), io::ConfigFile{});
}

TEST(Cli, RunWritesTheThreeFiles) {
    TempDir dir;
    write_file(dir / "cfg.json", kSmallConfig);
    const Outcome o = invoke({"run", "-c", dir / "cfg.json", "-o", dir / "out"});
    ASSERT_EQ(o.code, cli::kExitOk) << o.err;
    const fs::path out = dir.path() / "out";
    EXPECT_EQ(std::distance(fs::directory_iterator(out), fs::directory_iterator{}), 3);
    const io::Table metrics = io::read_table(out / "metrics.csv");
    EXPECT_EQ(metrics.header, io::kMetricsHeader);
    EXPECT_EQ(metrics.rows.size(), 5u);
    EXPECT_EQ(metrics.rows.back()[1], "2000");
    const io::Table snapshot = io::read_table(out / "snapshot.csv");
    EXPECT_EQ(snapshot.rows.size(), 40u); // t = 1000 and the final population
    const io::ConfigFile resolved = io::load_config(out / "config.resolved.json");
    EXPECT_EQ(resolved.sim.master_seed, 11u);
    EXPECT_EQ(resolved.sim.model.n_agents, 20u);
}

TEST(Cli, SeedOverrideIsReproducible) {
    TempDir dir;
    write_file(dir / "cfg.json", kSmallConfig);
    ASSERT_EQ(invoke({"run", "-c", dir / "cfg.json", "-o", dir / "a", "--seed", "99"}).code, 0);
    ASSERT_EQ(invoke({"run", "-c", dir / "cfg.json", "-o", dir / "b", "--seed", "99"}).code, 0);
    ASSERT_EQ(invoke({"run", "-c", dir / "cfg.json", "-o", dir / "c", "--seed", "100"}).code, 0);
    for (const char* f : {"metrics.csv", "snapshot.csv", "config.resolved.json"}) {
        EXPECT_EQ(read_file(dir.path() / "a" / f), read_file(dir.path() / "b" / f)) << f;
    }
    EXPECT_NE(read_file(dir.path() / "a" / "metrics.csv"), read_file(dir.path() / "c" / "metrics.csv"));
    EXPECT_EQ(io::load_config(dir.path() / "a" / "config.resolved.json").sim.master_seed, 99u);
}

TEST(Cli, OutputDirectoryPrecedence) {
    TempDir dir;
    write_file(dir / "cfg.json",
               std::string(R"({"version": 1, "model": {"n_agents": 5, "t_final": 10}, "output": {"dir": ")") +
                   (dir / "from_config") + R"("}})");
    ASSERT_EQ(invoke({"run", "-c", dir / "cfg.json"}).code, 0);
    EXPECT_TRUE(fs::exists(dir.path() / "from_config" / "metrics.csv"));

    ::setenv(cli::kOutputDirEnv, (dir / "from_env").c_str(), 1);
    const int env_code = invoke({"run", "-c", dir / "cfg.json"}).code;
    const int flag_code = invoke({"run", "-c", dir / "cfg.json", "-o", dir / "from_flag"}).code;
    ::unsetenv(cli::kOutputDirEnv);
    ASSERT_EQ(env_code, 0);
    ASSERT_EQ(flag_code, 0);
    EXPECT_TRUE(fs::exists(dir.path() / "from_env" / "metrics.csv"));
    EXPECT_TRUE(fs::exists(dir.path() / "from_flag" / "metrics.csv"));
}

TEST(Cli, SweepWritesCellsAndIgnoresParallelism) {
    TempDir dir;
    write_file(dir / "cfg.json", kSmallConfig);
    const Outcome serial = invoke({"sweep", "-c", dir / "cfg.json", "-o", dir / "s1", "-j", "1"});
    const Outcome threaded = invoke({"sweep", "-c", dir / "cfg.json", "-o", dir / "s4", "-j", "4"});
    ASSERT_EQ(serial.code, 0) << serial.err;
    ASSERT_EQ(threaded.code, 0) << threaded.err;
    for (const char* f : {"aggregate.csv", "runs.csv", "temporal.csv", "failures.csv", "sweep.json"}) {
        EXPECT_EQ(read_file(dir.path() / "s1" / f), read_file(dir.path() / "s4" / f)) << f;
    }
    const io::Table agg = io::read_table(dir.path() / "s1" / "aggregate.csv");
    ASSERT_EQ(agg.rows.size(), 5u);
    EXPECT_EQ(agg.rows[0][0], "baseline");
    EXPECT_EQ(agg.rows[0][agg.column("e_p_o_norm_median")], "1");
    const io::Table runs = io::read_table(dir.path() / "s1" / "runs.csv");
    EXPECT_EQ(runs.rows.size(), 10u);
    const auto manifest = nlohmann::json::parse(read_file(dir.path() / "s1" / "sweep.json"));
    EXPECT_EQ(manifest.at("grid").size(), 4u);
    EXPECT_EQ(manifest.at("paired"), true);
    EXPECT_EQ(io::read_table(dir.path() / "s1" / "failures.csv").rows.size(), 0u);
}

TEST(Cli, SweepOverridesAndSeries) {
    TempDir dir;
    write_file(dir / "cfg.json", kSmallConfig);
    const Outcome o = invoke({"sweep", "-c", dir / "cfg.json", "-o", dir / "s", "--resolution", "1", "--replicates",
                           "3", "--unpaired", "--series"});
    ASSERT_EQ(o.code, 0) << o.err;
    const io::Table agg = io::read_table(dir.path() / "s" / "aggregate.csv");
    ASSERT_EQ(agg.rows.size(), 2u);
    EXPECT_EQ(agg.rows[1][agg.column("replicates")], "3");
    // Baseline and cell, 3 runs each, 5 metric rows per run.
    EXPECT_EQ(io::read_table(dir.path() / "s" / "series.csv").rows.size(), 30u);
    EXPECT_EQ(nlohmann::json::parse(read_file(dir.path() / "s" / "sweep.json")).at("paired"), false);
}

TEST(Cli, ConnectivityIsSortedByRange) {
    TempDir dir;
    write_file(dir / "cfg.json", kSmallConfig);
    const Outcome o = invoke({"connectivity", "-c", dir / "cfg.json", "-o", dir / "c", "--r-comm", "3,0.2,0.05",
                           "--replicates", "2"});
    ASSERT_EQ(o.code, 0) << o.err;
    const io::Table t = io::read_table(dir.path() / "c" / "connectivity.csv");
    ASSERT_EQ(t.rows.size(), 3u);
    EXPECT_EQ(t.rows[0][0], "0.05");
    EXPECT_EQ(t.rows[2][0], "3");
    EXPECT_EQ(t.rows[2][t.column("initial_clusters_median")], "1");
    const Outcome bad = invoke({"connectivity", "-o", dir / "d", "--r-comm=0.1,0"});
    EXPECT_EQ(bad.code, cli::kExitUsage);
    EXPECT_NE(bad.err.find("field=--r-comm"), std::string::npos) << bad.err;
}

TEST(Cli, AnalyzeAnnotatesClosedForms) {
    TempDir dir;
    io::Table agg;
    agg.header = {"cell_id", "p_e", "p_m", "completed", "e_p_o_norm_median", "e_p_s_norm_median",
                  "messenger_ratio_mean"};
    agg.rows = {{"baseline", "0.003", "0", "2", "1", "1", "0"},
                {"0", "0.003", "0.0004", "2", "0.4", "0.9", "0.11"},
                {"1", "0.05", "0.0001", "2", "1.1", "0.7", "0.002"},
                {"2", "0.0001", "0.05", "2", "1.3", "", "0.99"}};
    io::write_table(dir.path() / "aggregate.csv", agg);
    write_file(dir.path() / "sweep.json", R"({"grid": [{"cell_id": "0", "p_e": 0.003, "p_m": 0.0004},
        {"cell_id": "1", "p_e": 0.05, "p_m": 0.0001}, {"cell_id": "2", "p_e": 0.0001, "p_m": 0.05}]})");
    const Outcome o = invoke({"analyze", dir.path().string()});
    ASSERT_EQ(o.code, 0) << o.err;
    const io::Table a = io::read_table(dir.path() / "analysis.csv");
    ASSERT_EQ(a.rows.size(), 3u);
    EXPECT_NEAR(io::parse_double(a.rows[0][a.column("expected_messenger_ratio")]), 0.1176, 1e-4);
    EXPECT_NEAR(io::parse_double(a.rows[0][a.column("expected_sojourn_time")]), 1416.67, 0.01);
    EXPECT_EQ(a.rows[2][a.column("e_p_s_norm_median")], "");
    const auto summary = nlohmann::json::parse(read_file(dir.path() / "summary.json"));
    EXPECT_EQ(summary.at("completed_cells"), 3);
    EXPECT_EQ(summary.at("best_e_p_o").at("cell_id"), "0");
    EXPECT_EQ(summary.at("best_e_p_s").at("cell_id"), "1");
    EXPECT_EQ(summary.at("baseline_corner").at("cell_id"), "1");
    EXPECT_EQ(summary.at("best_e_p_o_is_baseline_corner"), false);
}

TEST(Cli, AnalyzeReportsIncompleteSweeps) {
    TempDir dir;
    const Outcome empty = invoke({"analyze", dir.path().string()});
    EXPECT_EQ(empty.code, cli::kExitRuntime);
    EXPECT_NE(empty.err.find("0 completed cells"), std::string::npos);
    EXPECT_EQ(invoke({"analyze", dir / "missing"}).code, cli::kExitRuntime);

    write_file(dir.path() / "sweep.json", R"({"grid": [{"cell_id": "0", "p_e": 0.1, "p_m": 0.1},
        {"cell_id": "1", "p_e": 0.2, "p_m": 0.1}]})");
    io::Table agg;
    agg.header = {"cell_id", "p_e", "p_m", "completed", "e_p_o_norm_median", "e_p_s_norm_median",
                  "messenger_ratio_mean"};
    agg.rows = {{"0", "0.1", "0.1", "2", "0.5", "0.5", "0.5"}};
    io::write_table(dir.path() / "aggregate.csv", agg);
    const Outcome partial = invoke({"analyze", dir.path().string()});
    EXPECT_EQ(partial.code, cli::kExitRuntime);
    EXPECT_NE(partial.err.find("missing 1"), std::string::npos) << partial.err;
}

TEST(Cli, EndToEndSweepThenAnalyze) {
    TempDir dir;
    write_file(dir / "cfg.json", kSmallConfig);
    ASSERT_EQ(invoke({"sweep", "-c", dir / "cfg.json", "-o", dir / "s"}).code, 0);
    const Outcome o = invoke({"analyze", dir / "s"});
    ASSERT_EQ(o.code, 0) << o.err;
    EXPECT_EQ(io::read_table(dir.path() / "s" / "analysis.csv").rows.size(), 4u);
}
