#include "ferrysim_cli/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "ferrysim/dmp.hpp"
#include "ferrysim/io.hpp"
#include "ferrysim/sweep.hpp"

namespace ferry::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::json;

struct Failure {
    int code;
    std::string kind;
    std::string field;
    std::string message;
};

std::string one_line(std::string s) {
    for (char& c : s) {
        if (c == '\n' || c == '\r') c = ' ';
    }
    return s;
}

int report(std::ostream& err, const Failure& f) {
    err << "ferrysim-error kind=" << f.kind << " field=" << (f.field.empty() ? "-" : f.field)
        << " message=" << one_line(f.message) << '\n';
    return f.code;
}

struct CommonFlags {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App& cmd, CommonFlags& flags) {
    cmd.add_option("-c,--config", flags.config, "JSON configuration file (defaults when omitted)");
    cmd.add_option("-o,--out", flags.out, "output directory (overrides $FERRYSIM_OUTPUT_DIR and output.dir)");
    cmd.add_option("-s,--seed", flags.seed, "master seed override");
}

io::ConfigFile resolve_config(const CommonFlags& flags) {
    io::ConfigFile cfg;
    if (!flags.config.empty()) {
        try {
            cfg = io::load_config(flags.config);
        } catch (const io::IoError& e) {
            throw Failure{kExitUsage, "io", flags.config, e.what()};
        }
    }
    if (flags.seed) cfg.sim.master_seed = *flags.seed;
    validate(cfg.sim);
    return cfg;
}

fs::path output_dir(const CommonFlags& flags, const io::ConfigFile& cfg) {
    if (!flags.out.empty()) return flags.out;
    if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') return env;
    return cfg.output.dir;
}

void prepare_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw io::IoError("cannot create output directory '" + dir.string() + "'");
    }
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !(out << text) || !out.flush()) throw io::IoError("cannot write '" + path.string() + "'");
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io::IoError("cannot read '" + path.string() + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

int cmd_run(const CommonFlags& flags, std::uint32_t run_index, std::ostream& out) {
    const io::ConfigFile cfg = resolve_config(flags);
    const fs::path dir = output_dir(flags, cfg);
    prepare_dir(dir);
    const RunResult result = run_simulation(cfg.sim, run_index);
    const std::string id = "run-" + std::to_string(run_index);
    io::write_table(dir / "metrics.csv", io::metrics_table(id, result));
    io::write_table(dir / "snapshot.csv", io::snapshot_table(id, result, cfg.sim.model.t_final));
    write_text(dir / "config.resolved.json", io::serialize_config(cfg));
    const TickMetrics& last = result.series.back();
    out << "run " << id << " t_final=" << cfg.sim.model.t_final << " e_p_o=" << io::format_number(last.e_p_o)
        << " e_p_s=" << io::format_number(last.e_p_s) << " n_clusters=" << last.n_clusters
        << " mean_messenger_ratio=" << io::format_number(result.mean_messenger_ratio) << " out=" << dir.string()
        << '\n';
    return kExitOk;
}

struct SweepFlags {
    std::optional<std::uint32_t> resolution;
    std::optional<std::uint32_t> replicates;
    unsigned parallelism = 1;
    bool unpaired = false;
    bool series = false;
};

Json config_json(const io::ConfigFile& cfg) { return Json::parse(io::serialize_config(cfg)); }

int cmd_sweep(const CommonFlags& flags, const SweepFlags& sf, std::ostream& out) {
    io::ConfigFile cfg = resolve_config(flags);
    if (sf.resolution) cfg.sweep.resolution = *sf.resolution;
    if (sf.replicates) cfg.sweep.replicates = *sf.replicates;
    if (sf.unpaired) cfg.sweep.paired = false;
    if (sf.series) cfg.output.write_series = true;
    if (cfg.sweep.resolution < 1) throw ConfigError("sweep.resolution", "must be at least 1");
    if (cfg.sweep.replicates < 1) throw ConfigError("sweep.replicates", "must be at least 1");
    const fs::path dir = output_dir(flags, cfg);
    prepare_dir(dir);

    SweepSpec spec = SweepSpec::log_grid(cfg.sweep.log_min, cfg.sweep.log_max, cfg.sweep.resolution,
                                         cfg.sweep.replicates);
    spec.paired = cfg.sweep.paired;
    spec.keep_series = cfg.output.write_series;
    const SweepOutput result = run_sweep(spec, cfg.sim, sf.parallelism);

    io::write_table(dir / "aggregate.csv", io::aggregate_table(result));
    io::write_table(dir / "runs.csv", io::runs_table(result));
    io::write_table(dir / "temporal.csv", io::temporal_table(result));
    io::write_table(dir / "failures.csv", io::failures_table(result));
    if (cfg.output.write_series) io::write_table(dir / "series.csv", io::sweep_series_table(result));
    write_text(dir / "config.resolved.json", io::serialize_config(cfg));

    Json manifest;
    manifest["version"] = io::kConfigVersion;
    manifest["resolution"] = cfg.sweep.resolution;
    manifest["replicates"] = cfg.sweep.replicates;
    manifest["paired"] = cfg.sweep.paired;
    manifest["log_min"] = cfg.sweep.log_min;
    manifest["log_max"] = cfg.sweep.log_max;
    Json grid = Json::array();
    for (std::size_t i = 0; i < spec.grid.size(); ++i) {
        grid.push_back({{"cell_id", io::cell_id(i)}, {"p_e", spec.grid[i].p_e}, {"p_m", spec.grid[i].p_m}});
    }
    manifest["grid"] = std::move(grid);
    manifest["config"] = config_json(cfg);
    write_text(dir / "sweep.json", manifest.dump(2) + "\n");

    std::size_t failed = result.baseline.failed;
    for (const auto& c : result.cells) failed += c.failed;
    out << "sweep cells=" << result.cells.size() << " replicates=" << cfg.sweep.replicates
        << " failed_runs=" << failed << " out=" << dir.string() << '\n';
    if (failed > 0) {
        throw Failure{kExitRuntime, "runtime", "failures.csv",
                      std::to_string(failed) + " run(s) failed; see " + (dir / "failures.csv").string()};
    }
    return kExitOk;
}

std::vector<double> parse_radii(const std::vector<std::string>& items) {
    std::vector<double> radii;
    for (const auto& item : items) {
        try {
            radii.push_back(io::parse_double(item));
        } catch (const std::invalid_argument&) {
            throw ConfigError("--r-comm", "not a number: '" + item + "'");
        }
        if (!(std::isfinite(radii.back()) && radii.back() > 0.0)) {
            throw ConfigError("--r-comm", "communication range must be positive: '" + item + "'");
        }
    }
    return radii;
}

int cmd_connectivity(const CommonFlags& flags, const std::vector<std::string>& r_items,
                     std::optional<std::uint32_t> replicates, unsigned parallelism, std::ostream& out) {
    const io::ConfigFile cfg = resolve_config(flags);
    const std::vector<double> radii = parse_radii(r_items);
    const std::uint32_t reps = replicates.value_or(cfg.sweep.replicates);
    if (reps < 1) throw ConfigError("--replicates", "must be at least 1");
    const fs::path dir = output_dir(flags, cfg);
    prepare_dir(dir);
    const auto points = connectivity_sweep(radii, cfg.sim, reps, parallelism);
    io::write_table(dir / "connectivity.csv", io::connectivity_table(points));
    write_text(dir / "config.resolved.json", io::serialize_config(cfg));

    std::size_t failed = 0;
    for (const auto& p : points) {
        for (const auto& r : p.runs) failed += r.ok ? 0 : 1;
    }
    out << "connectivity radii=" << points.size() << " replicates=" << reps << " failed_runs=" << failed
        << " out=" << dir.string() << '\n';
    if (failed > 0) throw Failure{kExitRuntime, "runtime", "connectivity", std::to_string(failed) + " run(s) failed"};
    return kExitOk;
}

struct CellRow {
    std::string id;
    double p_e = 0.0;
    double p_m = 0.0;
    std::optional<double> e_p_o_norm;
    std::optional<double> e_p_s_norm;
    std::optional<double> ratio;
    std::uint64_t completed = 0;
};

std::optional<double> optional_number(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return io::parse_double(s);
}

int cmd_analyze(const std::string& dir_arg, std::ostream& out) {
    const fs::path dir = dir_arg;
    if (!fs::is_directory(dir)) throw io::IoError("sweep directory '" + dir.string() + "' does not exist");
    const fs::path manifest_path = dir / "sweep.json";
    const fs::path aggregate_path = dir / "aggregate.csv";
    if (!fs::exists(manifest_path) && !fs::exists(aggregate_path)) {
        throw Failure{kExitRuntime, "runtime", dir.string(),
                      "incomplete sweep: 0 completed cells (no sweep.json or aggregate.csv)"};
    }

    Json manifest;
    try {
        manifest = Json::parse(read_text(manifest_path));
    } catch (const Json::exception& e) {
        throw Failure{kExitRuntime, "runtime", manifest_path.string(), std::string("unreadable manifest: ") + e.what()};
    }

    std::map<std::string, CellRow> rows;
    if (fs::exists(aggregate_path)) {
        const io::Table agg = io::read_table(aggregate_path);
        const std::size_t c_id = agg.column("cell_id"), c_pe = agg.column("p_e"), c_pm = agg.column("p_m");
        const std::size_t c_done = agg.column("completed");
        const std::size_t c_o = agg.column("e_p_o_norm_median"), c_s = agg.column("e_p_s_norm_median");
        const std::size_t c_r = agg.column("messenger_ratio_mean");
        for (const auto& r : agg.rows) {
            CellRow row{r[c_id], io::parse_double(r[c_pe]), io::parse_double(r[c_pm]), optional_number(r[c_o]),
                        optional_number(r[c_s]), optional_number(r[c_r]), io::parse_uint(r[c_done])};
            rows[row.id] = row;
        }
    }

    std::vector<CellRow> cells;
    std::vector<std::string> missing;
    for (const auto& g : manifest.at("grid")) {
        const std::string id = g.at("cell_id").get<std::string>();
        const auto it = rows.find(id);
        if (it == rows.end() || it->second.completed == 0) {
            missing.push_back(id);
            continue;
        }
        cells.push_back(it->second);
    }
    if (!missing.empty()) {
        std::string list;
        for (const auto& m : missing) list += (list.empty() ? "" : ",") + m;
        throw Failure{kExitRuntime, "runtime", "cells",
                      "incomplete sweep: " + std::to_string(cells.size()) + " completed cells, missing " + list};
    }

    io::Table analysis;
    analysis.header = {"cell_id", "p_e", "p_m", "expected_messenger_ratio", "expected_sojourn_time",
                       "messenger_ratio_mean", "e_p_o_norm_median", "e_p_s_norm_median"};
    const auto num = [](const std::optional<double>& v) { return v ? io::format_number(*v) : std::string{}; };
    for (const auto& c : cells) {
        const DmpParams p{c.p_e, c.p_m};
        std::optional<double> m_hat, tau_hat;
        if (c.p_e + c.p_m > 0.0) m_hat = expected_messenger_ratio(p);
        if (c.p_e > 0.0 && c.p_m > 0.0) tau_hat = expected_sojourn_time(p);
        analysis.rows.push_back({c.id, io::format_number(c.p_e), io::format_number(c.p_m), num(m_hat), num(tau_hat),
                                 num(c.ratio), num(c.e_p_o_norm), num(c.e_p_s_norm)});
    }
    io::write_table(dir / "analysis.csv", analysis);

    // Baseline corner: fewest Messengers, i.e. smallest p_m and largest p_e.
    const CellRow* corner = nullptr;
    for (const auto& c : cells) {
        if (!corner || c.p_m < corner->p_m || (c.p_m == corner->p_m && c.p_e > corner->p_e)) corner = &c;
    }
    const auto best_by = [&cells](auto member) -> const CellRow* {
        const CellRow* best = nullptr;
        for (const auto& c : cells) {
            if (!(c.*member)) continue;
            if (!best || *(c.*member) < *(best->*member)) best = &c;
        }
        return best;
    };
    const CellRow* best_o = best_by(&CellRow::e_p_o_norm);
    const CellRow* best_s = best_by(&CellRow::e_p_s_norm);
    const auto describe = [](const CellRow* c, std::optional<double> CellRow::*member) {
        if (!c) return Json(nullptr);
        return Json{{"cell_id", c->id}, {"p_e", c->p_e}, {"p_m", c->p_m}, {"value", *(c->*member)}};
    };
    Json summary;
    summary["completed_cells"] = cells.size();
    summary["missing_cells"] = Json::array();
    summary["best_e_p_o"] = describe(best_o, &CellRow::e_p_o_norm);
    summary["best_e_p_s"] = describe(best_s, &CellRow::e_p_s_norm);
    summary["baseline_corner"] = corner ? Json{{"cell_id", corner->id}, {"p_e", corner->p_e}, {"p_m", corner->p_m}}
                                        : Json(nullptr);
    summary["best_e_p_o_is_baseline_corner"] = best_o != nullptr && best_o == corner;
    write_text(dir / "summary.json", summary.dump(2) + "\n");

    out << "analyze cells=" << cells.size();
    if (best_o) out << " best_e_p_o=" << best_o->id << " (" << io::format_number(*best_o->e_p_o_norm) << ")";
    if (best_s) out << " best_e_p_s=" << best_s->id << " (" << io::format_number(*best_s->e_p_s_norm) << ")";
    out << '\n';
    return kExitOk;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Spatial opinion dynamics with Messenger agents"};
    app.name("ferrysim");
    app.require_subcommand(1);

    CommonFlags run_flags;
    std::uint32_t run_index = 0;
    auto* run = app.add_subcommand("run", "one simulation; writes metrics.csv, snapshot.csv, config.resolved.json");
    add_common(*run, run_flags);
    run->add_option("--run-index", run_index, "replicate index selecting the random streams");

    CommonFlags sweep_flags;
    SweepFlags sf;
    auto* sweep = app.add_subcommand("sweep", "(p_e, p_m) grid sweep with the baseline ensemble");
    add_common(*sweep, sweep_flags);
    sweep->add_option("--resolution", sf.resolution, "grid points per axis");
    sweep->add_option("--replicates", sf.replicates, "runs per cell");
    sweep->add_option("-j,--parallelism", sf.parallelism, "worker threads")->check(CLI::PositiveNumber);
    sweep->add_flag("--unpaired", sf.unpaired, "give every run its own seed instead of sharing them across cells");
    sweep->add_flag("--series", sf.series, "also write series.csv with every run's metric series");

    CommonFlags conn_flags;
    std::vector<std::string> radii{"0.1", "0.15", "0.2", "0.3", "0.4", "0.6"};
    std::optional<std::uint32_t> conn_reps;
    unsigned conn_par = 1;
    auto* conn = app.add_subcommand("connectivity", "baseline ensembles across communication ranges");
    add_common(*conn, conn_flags);
    conn->add_option("--r-comm", radii, "communication ranges")->delimiter(',');
    conn->add_option("--replicates", conn_reps, "runs per range");
    conn->add_option("-j,--parallelism", conn_par, "worker threads")->check(CLI::PositiveNumber);

    std::string analyze_dir;
    auto* analyze = app.add_subcommand("analyze", "best cells and closed-form annotations of a finished sweep");
    analyze->add_option("dir", analyze_dir, "sweep output directory")->required();

    auto* defaults = app.add_subcommand("defaults", "print the fully resolved default configuration");

    std::vector<const char*> argv{"ferrysim"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        return report(err, {kExitUsage, "usage", "-", e.what()});
    }

    try {
        if (*run) return cmd_run(run_flags, run_index, out);
        if (*sweep) return cmd_sweep(sweep_flags, sf, out);
        if (*conn) return cmd_connectivity(conn_flags, radii, conn_reps, conn_par, out);
        if (*analyze) return cmd_analyze(analyze_dir, out);
        if (*defaults) {
            out << io::serialize_config(io::ConfigFile{});
            return kExitOk;
        }
    } catch (const Failure& f) {
        return report(err, f);
    } catch (const ConfigError& e) {
        return report(err, {kExitUsage, "config", e.field(), e.what()});
    } catch (const io::IoError& e) {
        return report(err, {kExitRuntime, "io", "-", e.what()});
    } catch (const std::exception& e) {
        return report(err, {kExitRuntime, "runtime", "-", e.what()});
    }
    return report(err, {kExitUsage, "usage", "-", "no subcommand"});
}

} // namespace ferry::cli
