#include "ferrysim/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace ferry::io {
namespace {

using Json = nlohmann::json;

// Typed reader over one JSON object that rejects keys nobody asked for.
class Section {
public:
    Section(const Json& j, std::string path) : json_(j), path_(std::move(path)) {
        if (!json_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "must be an object");
    }

    [[nodiscard]] std::string field(std::string_view key) const {
        return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
    }

    [[nodiscard]] const Json* find(std::string_view key) {
        seen_.insert(std::string(key));
        const auto it = json_.find(std::string(key));
        return it == json_.end() ? nullptr : &*it;
    }

    void read(std::string_view key, double& out) {
        if (const Json* v = find(key)) {
            if (!v->is_number()) throw ConfigError(field(key), "expected a number");
            out = v->get<double>();
        }
    }

    template <class U>
        requires std::is_unsigned_v<U>
    void read(std::string_view key, U& out) {
        if (const Json* v = find(key)) {
            if (!v->is_number_unsigned()) throw ConfigError(field(key), "expected a non-negative integer");
            const auto raw = v->get<std::uint64_t>();
            if (raw > std::numeric_limits<U>::max()) throw ConfigError(field(key), "integer out of range");
            out = static_cast<U>(raw);
        }
    }

    void read(std::string_view key, bool& out) {
        if (const Json* v = find(key)) {
            if (!v->is_boolean()) throw ConfigError(field(key), "expected true or false");
            out = v->get<bool>();
        }
    }

    void read(std::string_view key, std::string& out) {
        if (const Json* v = find(key)) {
            if (!v->is_string()) throw ConfigError(field(key), "expected a string");
            out = v->get<std::string>();
        }
    }

    void read(std::string_view key, std::vector<std::uint64_t>& out) {
        if (const Json* v = find(key)) {
            if (!v->is_array()) throw ConfigError(field(key), "expected an array of integers");
            out.clear();
            for (const auto& e : *v) {
                if (!e.is_number_unsigned()) throw ConfigError(field(key), "expected an array of integers");
                out.push_back(e.get<std::uint64_t>());
            }
        }
    }

    std::optional<Section> child(std::string_view key) {
        if (const Json* v = find(key)) return Section(*v, field(key));
        return std::nullopt;
    }

    void finish() const {
        for (const auto& [key, value] : json_.items()) {
            if (!seen_.contains(key)) throw ConfigError(field(key), "unknown key");
        }
    }

private:
    const Json& json_;
    std::string path_;
    std::set<std::string, std::less<>> seen_;
};

std::string_view to_string(InitialStatePolicy::Kind k) {
    switch (k) {
    case InitialStatePolicy::Kind::StationaryRatio: return "stationary_ratio";
    case InitialStatePolicy::Kind::AllExploiters: return "all_exploiters";
    case InitialStatePolicy::Kind::FixedCount: return "fixed_count";
    }
    return "unknown";
}

void read_landscape(Section& s, SimConfig& sim) {
    std::string kind_name{ferry::to_string(kind_of(sim.landscape))};
    s.read("kind", kind_name);
    const auto kind = parse_landscape_kind(kind_name);
    if (!kind) throw ConfigError(s.field("kind"), "unknown landscape kind '" + kind_name + "'");
    LandscapeSpec spec = kind == kind_of(sim.landscape) ? sim.landscape : default_landscape_spec(*kind, sim.model.arena);
    std::visit(
        [&s](auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, RadialConeParams>) {
                s.read("center_x", p.center.x);
                s.read("center_y", p.center.y);
            } else if constexpr (std::is_same_v<P, PlanarGradientParams>) {
                s.read("slope", p.slope);
                s.read("offset", p.offset);
            } else if constexpr (std::is_same_v<P, BimodalGaussianParams>) {
                s.read("center1_x", p.first.center.x);
                s.read("center1_y", p.first.center.y);
                s.read("width1", p.first.width);
                s.read("amplitude1", p.first.amplitude);
                s.read("center2_x", p.second.center.x);
                s.read("center2_y", p.second.center.y);
                s.read("width2", p.second.width);
                s.read("amplitude2", p.second.amplitude);
            } else {
                s.read("axis_x", p.axis_x);
                s.read("scale", p.scale);
            }
        },
        spec);
    sim.landscape = spec;
}

Json landscape_json(const LandscapeSpec& spec) {
    Json j;
    j["kind"] = std::string(ferry::to_string(kind_of(spec)));
    std::visit(
        [&j](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, RadialConeParams>) {
                j["center_x"] = p.center.x;
                j["center_y"] = p.center.y;
            } else if constexpr (std::is_same_v<P, PlanarGradientParams>) {
                j["slope"] = p.slope;
                j["offset"] = p.offset;
            } else if constexpr (std::is_same_v<P, BimodalGaussianParams>) {
                j["center1_x"] = p.first.center.x;
                j["center1_y"] = p.first.center.y;
                j["width1"] = p.first.width;
                j["amplitude1"] = p.first.amplitude;
                j["center2_x"] = p.second.center.x;
                j["center2_y"] = p.second.center.y;
                j["width2"] = p.second.width;
                j["amplitude2"] = p.second.amplitude;
            } else {
                j["axis_x"] = p.axis_x;
                j["scale"] = p.scale;
            }
        },
        spec);
    return j;
}

void validate_sweep(const SweepSettings& s) {
    if (!std::isfinite(s.log_min) || !std::isfinite(s.log_max) || s.log_min > s.log_max || s.log_max > 0.0) {
        throw ConfigError("sweep.log_min", "need log_min <= log_max <= 0");
    }
    if (s.resolution < 1) throw ConfigError("sweep.resolution", "must be at least 1");
    if (s.replicates < 1) throw ConfigError("sweep.replicates", "must be at least 1");
}

std::string quote_if_needed(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::vector<std::string> split_record(std::istream& in, bool& ok) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    bool any = false;
    char c;
    while (in.get(c)) {
        any = true;
        if (quoted) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    field += '"';
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c == '\n') {
            break;
        } else {
            field += c;
        }
    }
    ok = any;
    if (any) fields.push_back(std::move(field));
    return fields;
}

std::string hex(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string opt_number(const std::optional<double>& v) { return v ? format_number(*v) : std::string{}; }

void append_stats(std::vector<std::string>& row, const Stats& s) {
    for (double v : {s.mean, s.median, s.stddev, s.min, s.max}) row.push_back(format_number(v));
}

void append_metric(std::vector<std::string>& row, const MetricAggregate& m) {
    append_stats(row, m.raw);
    if (m.normalized_valid) {
        for (double v : {m.normalized.mean, m.normalized.median, m.normalized.stddev}) row.push_back(format_number(v));
    } else {
        row.insert(row.end(), 3, "");
    }
    row.push_back(m.normalized_valid ? "1" : "0");
}

template <class F>
void for_each_cell(const SweepOutput& sweep, F&& f) {
    f(std::string(kBaselineCellId), sweep.baseline);
    for (std::size_t c = 0; c < sweep.cells.size(); ++c) f(cell_id(c), sweep.cells[c]);
}

} // namespace

ConfigFile parse_config(std::string_view text) {
    Json root;
    try {
        root = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ConfigError("<document>", std::string("malformed JSON: ") + e.what());
    }
    ConfigFile cfg;
    Section top(root, "");
    if (top.find("version") == nullptr) throw ConfigError("version", "required key missing");
    top.read("version", cfg.version);
    if (cfg.version != kConfigVersion) {
        throw ConfigError("version", "unsupported version " + std::to_string(cfg.version));
    }
    top.read("master_seed", cfg.sim.master_seed);

    if (auto model = top.child("model")) {
        ModelParams& m = cfg.sim.model;
        model->read("n_agents", m.n_agents);
        model->read("arena_width", m.arena.width);
        model->read("arena_height", m.arena.height);
        model->read("r_comm", m.r_comm);
        model->read("alpha", m.alpha);
        model->read("beta", m.beta);
        model->read("r_lambda", m.r_lambda);
        model->read("step_size", m.step_size);
        model->read("sigma", m.sigma);
        model->read("t_final", m.t_final);
        std::string walk{ferry::to_string(m.messenger_walk)};
        model->read("messenger_walk", walk);
        const auto parsed_walk = parse_messenger_walk(walk);
        if (!parsed_walk) throw ConfigError("model.messenger_walk", "expected persistent or uncorrelated");
        m.messenger_walk = *parsed_walk;
        model->finish();
        if (m.arena != Arena{}) {
            cfg.sim.landscape = default_landscape_spec(kind_of(cfg.sim.landscape), m.arena);
        }
    }
    if (auto dmp = top.child("dmp")) {
        dmp->read("p_e", cfg.sim.dmp.p_e);
        dmp->read("p_m", cfg.sim.dmp.p_m);
        dmp->finish();
    }
    if (auto init = top.child("init")) {
        std::string policy{to_string(cfg.sim.init_policy.kind)};
        init->read("policy", policy);
        std::uint32_t count = cfg.sim.init_policy.count;
        init->read("count", count);
        if (policy == "stationary_ratio") {
            cfg.sim.init_policy = InitialStatePolicy::stationary_ratio();
        } else if (policy == "all_exploiters") {
            cfg.sim.init_policy = InitialStatePolicy::all_exploiters();
        } else if (policy == "fixed_count") {
            cfg.sim.init_policy = InitialStatePolicy::fixed_count(count);
        } else {
            throw ConfigError("init.policy", "unknown policy '" + policy + "'");
        }
        if (policy != "fixed_count" && count != 0) {
            throw ConfigError("init.count", "only meaningful with policy fixed_count");
        }
        init->finish();
    }
    if (auto land = top.child("landscape")) {
        read_landscape(*land, cfg.sim);
        land->finish();
    }
    if (auto sweep = top.child("sweep")) {
        sweep->read("log_min", cfg.sweep.log_min);
        sweep->read("log_max", cfg.sweep.log_max);
        sweep->read("resolution", cfg.sweep.resolution);
        sweep->read("replicates", cfg.sweep.replicates);
        sweep->read("paired", cfg.sweep.paired);
        sweep->finish();
    }
    if (auto out = top.child("output")) {
        out->read("dir", cfg.output.dir);
        out->read("write_series", cfg.output.write_series);
        out->read("metrics_stride", cfg.sim.metrics_stride);
        out->read("snapshot_ticks", cfg.sim.snapshot_ticks);
        out->finish();
    }
    top.finish();

    validate(cfg.sim);
    validate_sweep(cfg.sweep);
    return cfg;
}

std::string serialize_config(const ConfigFile& cfg) {
    const SimConfig& s = cfg.sim;
    const ModelParams& m = s.model;
    Json j;
    j["version"] = cfg.version;
    j["master_seed"] = s.master_seed;
    j["model"] = {{"n_agents", m.n_agents},   {"arena_width", m.arena.width},
                  {"arena_height", m.arena.height}, {"r_comm", m.r_comm},
                  {"alpha", m.alpha},         {"beta", m.beta},
                  {"r_lambda", m.r_lambda},   {"step_size", m.step_size},
                  {"sigma", m.sigma},         {"t_final", m.t_final},
                  {"messenger_walk", std::string(ferry::to_string(m.messenger_walk))}};
    j["dmp"] = {{"p_e", s.dmp.p_e}, {"p_m", s.dmp.p_m}};
    j["init"] = {{"policy", std::string(to_string(s.init_policy.kind))}, {"count", s.init_policy.count}};
    j["landscape"] = landscape_json(s.landscape);
    j["sweep"] = {{"log_min", cfg.sweep.log_min},
                  {"log_max", cfg.sweep.log_max},
                  {"resolution", cfg.sweep.resolution},
                  {"replicates", cfg.sweep.replicates},
                  {"paired", cfg.sweep.paired}};
    j["output"] = {{"dir", cfg.output.dir},
                   {"write_series", cfg.output.write_series},
                   {"metrics_stride", s.metrics_stride},
                   {"snapshot_ticks", s.snapshot_ticks}};
    return j.dump(2) + "\n";
}

ConfigFile load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read config file '" + path.string() + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

std::string format_number(double v) {
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

std::string format_number(std::uint64_t v) { return std::to_string(v); }

double parse_double(std::string_view text) {
    double v = 0.0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || end != text.data() + text.size()) {
        throw std::invalid_argument("not a number: '" + std::string(text) + "'");
    }
    return v;
}

std::uint64_t parse_uint(std::string_view text) {
    std::uint64_t v = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || end != text.data() + text.size()) {
        throw std::invalid_argument("not an unsigned integer: '" + std::string(text) + "'");
    }
    return v;
}

std::size_t Table::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw std::out_of_range("missing column '" + std::string(name) + "'");
}

void write_table(std::ostream& out, const Table& table) {
    const auto line = [&out](const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out << ',';
            out << quote_if_needed(fields[i]);
        }
        out << '\n';
    };
    line(table.header);
    for (const auto& row : table.rows) line(row);
}

Table read_table(std::istream& in) {
    Table t;
    bool ok = false;
    t.header = split_record(in, ok);
    if (!ok) throw std::invalid_argument("empty table: no header row");
    while (true) {
        auto row = split_record(in, ok);
        if (!ok) break;
        if (row.size() != t.header.size()) {
            throw std::invalid_argument("row " + std::to_string(t.rows.size() + 1) + " has " +
                                        std::to_string(row.size()) + " fields, header has " +
                                        std::to_string(t.header.size()));
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

void write_table(const std::filesystem::path& path, const Table& table) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    write_table(out, table);
    if (!out.flush()) throw IoError("write failed for '" + path.string() + "'");
}

Table read_table(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + path.string() + "'");
    return read_table(in);
}

void append_metrics_rows(Table& table, std::string_view run_id, std::span<const TickMetrics> series) {
    for (const auto& m : series) {
        table.rows.push_back({std::string(run_id), format_number(m.t), format_number(m.e_p_o), format_number(m.e_p_s),
                              format_number(std::uint64_t{m.n_clusters}), format_number(m.messenger_ratio),
                              format_number(m.collective_opinion), format_number(m.collective_signal)});
    }
}

void append_snapshot_rows(Table& table, std::string_view run_id, std::uint64_t t, std::span<const Agent> agents) {
    for (const Agent& a : agents) {
        table.rows.push_back({std::string(run_id), format_number(t), format_number(std::uint64_t{a.id}),
                              format_number(a.pos.x), format_number(a.pos.y), format_number(a.opinion),
                              std::string(ferry::to_string(a.state))});
    }
}

Table metrics_table(std::string_view run_id, const RunResult& result) {
    Table t{kMetricsHeader, {}};
    append_metrics_rows(t, run_id, result.series);
    return t;
}

Table snapshot_table(std::string_view run_id, const RunResult& result, std::uint64_t t_final) {
    Table t{kSnapshotHeader, {}};
    for (const auto& s : result.snapshots) {
        if (s.t != t_final) append_snapshot_rows(t, run_id, s.t, s.agents);
    }
    append_snapshot_rows(t, run_id, t_final, result.final_snapshot);
    return t;
}

std::string cell_id(std::size_t cell_index) { return std::to_string(cell_index); }

std::string run_id(std::string_view cell, std::uint32_t replicate) {
    return std::string(cell) + "-r" + std::to_string(replicate);
}

Table aggregate_table(const SweepOutput& sweep) {
    Table t;
    t.header = {"cell_id", "p_e", "p_m", "replicates", "completed", "failed"};
    for (const char* m : {"e_p_o", "e_p_s", "n_clusters"}) {
        for (const char* suffix : {"mean", "median", "std", "min", "max", "norm_mean", "norm_median", "norm_std",
                                   "norm_valid"}) {
            t.header.push_back(std::string(m) + "_" + suffix);
        }
    }
    t.header.push_back("messenger_ratio_mean");
    t.header.push_back("messenger_ratio_median");
    for_each_cell(sweep, [&t](const std::string& id, const SweepResult& r) {
        std::vector<std::string> row{id,
                                     format_number(r.cell.p_e),
                                     format_number(r.cell.p_m),
                                     format_number(static_cast<std::uint64_t>(r.runs.size())),
                                     format_number(static_cast<std::uint64_t>(r.runs.size() - r.failed)),
                                     format_number(static_cast<std::uint64_t>(r.failed))};
        append_metric(row, r.e_p_o);
        append_metric(row, r.e_p_s);
        append_metric(row, r.n_clusters);
        row.push_back(format_number(r.messenger_ratio.mean));
        row.push_back(format_number(r.messenger_ratio.median));
        t.rows.push_back(std::move(row));
    });
    return t;
}

Table runs_table(const SweepOutput& sweep) {
    Table t;
    t.header = {"run_id", "cell_id", "replicate", "run_index", "ok", "e_p_o", "e_p_s", "n_clusters",
                "messenger_ratio", "mean_messenger_ratio", "digest"};
    for_each_cell(sweep, [&t](const std::string& id, const SweepResult& r) {
        for (const auto& run : r.runs) {
            if (!run.ok) {
                t.rows.push_back({run_id(id, run.replicate), id, format_number(std::uint64_t{run.replicate}),
                                  format_number(std::uint64_t{run.run_index}), "0", "", "", "", "", "", ""});
                continue;
            }
            t.rows.push_back({run_id(id, run.replicate), id, format_number(std::uint64_t{run.replicate}),
                              format_number(std::uint64_t{run.run_index}), "1", format_number(run.final.e_p_o),
                              format_number(run.final.e_p_s), format_number(std::uint64_t{run.final.n_clusters}),
                              format_number(run.final.messenger_ratio), format_number(run.mean_messenger_ratio),
                              hex(run.trajectory_digest)});
        }
    });
    return t;
}

Table temporal_table(const SweepOutput& sweep) {
    Table t;
    t.header = {"cell_id", "p_e", "p_m", "t", "e_p_o_median", "e_p_s_median", "n_clusters_median",
                "e_p_o_norm_median", "e_p_s_norm_median"};
    for_each_cell(sweep, [&t](const std::string& id, const SweepResult& r) {
        for (const auto& p : r.temporal) {
            t.rows.push_back({id, format_number(r.cell.p_e), format_number(r.cell.p_m), format_number(p.t),
                              format_number(p.e_p_o_median), format_number(p.e_p_s_median),
                              format_number(p.n_clusters_median), opt_number(p.e_p_o_norm_median),
                              opt_number(p.e_p_s_norm_median)});
        }
    });
    return t;
}

Table failures_table(const SweepOutput& sweep) {
    Table t;
    t.header = {"run_id", "cell_id", "message"};
    for_each_cell(sweep, [&t](const std::string& id, const SweepResult& r) {
        for (const auto& run : r.runs) {
            if (!run.ok) t.rows.push_back({run_id(id, run.replicate), id, run.error});
        }
        for (const auto& note : r.notes) t.rows.push_back({"", id, note});
    });
    return t;
}

Table sweep_series_table(const SweepOutput& sweep) {
    Table t{kMetricsHeader, {}};
    for_each_cell(sweep, [&t](const std::string& id, const SweepResult& r) {
        for (const auto& run : r.runs) {
            if (run.ok) append_metrics_rows(t, run_id(id, run.replicate), run.series);
        }
    });
    return t;
}

Table connectivity_table(std::span<const ConnectivityPoint> points) {
    Table t;
    t.header = {"r_comm",
                "replicates",
                "completed",
                "initial_clusters_median",
                "initial_clusters_mean",
                "final_clusters_median",
                "final_clusters_mean",
                "initial_e_p_o_median",
                "initial_e_p_o_mean",
                "final_e_p_o_median",
                "final_e_p_o_mean",
                "initial_e_p_s_median",
                "final_e_p_s_median",
                "final_clusters_rel_initial",
                "final_e_p_o_rel_initial",
                "initial_clusters_rel_max",
                "final_clusters_rel_max",
                "initial_e_p_o_rel_max",
                "final_e_p_o_rel_max"};
    double max_clusters = 0.0;
    double max_e_p_o = 0.0;
    for (const auto& p : points) {
        max_clusters = std::max(max_clusters, p.initial_clusters.median);
        max_e_p_o = std::max(max_e_p_o, p.initial_e_p_o.median);
    }
    const auto ratio = [](double a, double b) { return b > 0.0 ? format_number(a / b) : std::string{}; };
    for (const auto& p : points) {
        t.rows.push_back({format_number(p.r_comm),
                          format_number(static_cast<std::uint64_t>(p.runs.size())),
                          format_number(static_cast<std::uint64_t>(p.final_clusters.count)),
                          format_number(p.initial_clusters.median),
                          format_number(p.initial_clusters.mean),
                          format_number(p.final_clusters.median),
                          format_number(p.final_clusters.mean),
                          format_number(p.initial_e_p_o.median),
                          format_number(p.initial_e_p_o.mean),
                          format_number(p.final_e_p_o.median),
                          format_number(p.final_e_p_o.mean),
                          format_number(p.initial_e_p_s.median),
                          format_number(p.final_e_p_s.median),
                          ratio(p.final_clusters.median, p.initial_clusters.median),
                          ratio(p.final_e_p_o.median, p.initial_e_p_o.median),
                          ratio(p.initial_clusters.median, max_clusters),
                          ratio(p.final_clusters.median, max_clusters),
                          ratio(p.initial_e_p_o.median, max_e_p_o),
                          ratio(p.final_e_p_o.median, max_e_p_o)});
    }
    return t;
}

} // namespace ferry::io
