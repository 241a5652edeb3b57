#include "ferrysim/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <thread>

namespace ferry {
namespace {

using MetricGetter = double (*)(const TickMetrics&);

double get_e_p_o(const TickMetrics& m) { return m.e_p_o; }
double get_e_p_s(const TickMetrics& m) { return m.e_p_s; }
double get_clusters(const TickMetrics& m) { return static_cast<double>(m.n_clusters); }

double median_of(std::vector<double> v) { return Stats::of(v).median; }

// Ratios of `runs` to the reference ensemble for one metric. Paired ratios
// match replicate by replicate; unpaired ratios use the reference median.
std::optional<std::vector<double>> ratios(const std::vector<RunSummary>& runs, const std::vector<RunSummary>& reference,
                                          bool paired, const std::function<double(const RunSummary&)>& value,
                                          std::vector<std::string>& notes, const char* label) {
    std::vector<double> out;
    if (paired) {
        for (const auto& run : runs) {
            if (!run.ok) continue;
            const auto match = std::find_if(reference.begin(), reference.end(), [&](const RunSummary& b) {
                return b.replicate == run.replicate;
            });
            if (match == reference.end() || !match->ok) continue;
            try {
                out.push_back(metrics::normalize_to_baseline(value(run), value(*match)));
            } catch (const DegenerateBaseline& e) {
                notes.push_back(std::string(label) + " replicate " + std::to_string(run.replicate) + ": " + e.what());
                return std::nullopt;
            }
        }
        return out;
    }
    std::vector<double> ref;
    for (const auto& b : reference) {
        if (b.ok) ref.push_back(value(b));
    }
    if (ref.empty()) return std::nullopt;
    const double ref_median = median_of(ref);
    for (const auto& run : runs) {
        if (!run.ok) continue;
        try {
            out.push_back(metrics::normalize_to_baseline(value(run), ref_median));
        } catch (const DegenerateBaseline& e) {
            notes.push_back(std::string(label) + ": " + e.what());
            return std::nullopt;
        }
    }
    return out;
}

MetricAggregate aggregate_metric(const std::vector<RunSummary>& runs, const std::vector<RunSummary>& reference,
                                 bool paired, MetricGetter get, std::vector<std::string>& notes, const char* label) {
    MetricAggregate agg;
    std::vector<double> raw;
    for (const auto& r : runs) {
        if (r.ok) raw.push_back(get(r.final));
    }
    agg.raw = Stats::of(raw);
    const auto norm = ratios(runs, reference, paired, [get](const RunSummary& r) { return get(r.final); }, notes, label);
    if (norm && !norm->empty()) {
        agg.normalized = Stats::of(*norm);
        agg.normalized_valid = true;
    }
    return agg;
}

SweepResult aggregate_cell(SweepCell cell, std::vector<RunSummary> runs, const std::vector<RunSummary>& reference,
                           bool paired) {
    SweepResult out;
    out.cell = cell;
    out.runs = std::move(runs);
    out.failed = static_cast<std::size_t>(std::count_if(out.runs.begin(), out.runs.end(),
                                                        [](const RunSummary& r) { return !r.ok; }));
    out.e_p_o = aggregate_metric(out.runs, reference, paired, get_e_p_o, out.notes, "e_p_o");
    out.e_p_s = aggregate_metric(out.runs, reference, paired, get_e_p_s, out.notes, "e_p_s");
    out.n_clusters = aggregate_metric(out.runs, reference, paired, get_clusters, out.notes, "n_clusters");

    std::vector<double> ratio;
    for (const auto& r : out.runs) {
        if (r.ok) ratio.push_back(r.mean_messenger_ratio);
    }
    out.messenger_ratio = Stats::of(ratio);

    const auto first_ok = std::find_if(out.runs.begin(), out.runs.end(), [](const RunSummary& r) { return r.ok; });
    if (first_ok == out.runs.end()) return out;
    for (std::size_t k = 0; k < first_ok->snapshot_metrics.size(); ++k) {
        TemporalPoint p;
        p.t = first_ok->snapshot_metrics[k].t;
        std::vector<double> epo, eps, clusters;
        for (const auto& r : out.runs) {
            if (!r.ok) continue;
            epo.push_back(r.snapshot_metrics[k].e_p_o);
            eps.push_back(r.snapshot_metrics[k].e_p_s);
            clusters.push_back(r.snapshot_metrics[k].n_clusters);
        }
        p.e_p_o_median = median_of(epo);
        p.e_p_s_median = median_of(eps);
        p.n_clusters_median = median_of(clusters);
        std::vector<std::string> ignored;
        const auto at = [k](MetricGetter g) {
            return [k, g](const RunSummary& r) { return g(r.snapshot_metrics[k]); };
        };
        if (auto n = ratios(out.runs, reference, paired, at(get_e_p_o), ignored, "e_p_o"); n && !n->empty()) {
            p.e_p_o_norm_median = median_of(*n);
        }
        if (auto n = ratios(out.runs, reference, paired, at(get_e_p_s), ignored, "e_p_s"); n && !n->empty()) {
            p.e_p_s_norm_median = median_of(*n);
        }
        out.temporal.push_back(p);
    }
    return out;
}

} // namespace

Stats Stats::of(std::span<const double> values) {
    Stats s;
    s.count = values.size();
    if (values.empty()) return s;
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    s.min = sorted.front();
    s.max = sorted.back();
    s.median = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    double sum = 0.0;
    for (double v : sorted) sum += v;
    s.mean = sum / static_cast<double>(n);
    if (n > 1) {
        double sq = 0.0;
        for (double v : sorted) sq += (v - s.mean) * (v - s.mean);
        s.stddev = std::sqrt(sq / static_cast<double>(n - 1));
    }
    return s;
}

SweepSpec SweepSpec::log_grid(double log_min, double log_max, std::uint32_t resolution, std::uint32_t replicates) {
    if (resolution == 0) throw std::invalid_argument("sweep: resolution must be at least 1");
    if (!(log_min <= log_max) || log_max > 0.0) throw std::invalid_argument("sweep: need log_min <= log_max <= 0");
    SweepSpec spec;
    spec.replicates = replicates;
    const auto level = [&](std::uint32_t k) {
        return resolution == 1 ? log_max : log_min + (log_max - log_min) * k / (resolution - 1);
    };
    for (std::uint32_t i = 0; i < resolution; ++i) {
        for (std::uint32_t j = 0; j < resolution; ++j) spec.grid.push_back({std::exp(level(i)), std::exp(level(j))});
    }
    return spec;
}

void parallel_for(std::size_t jobs, unsigned parallelism, const std::function<void(std::size_t)>& body) {
    parallelism = std::max(1u, parallelism);
    if (parallelism == 1 || jobs <= 1) {
        for (std::size_t k = 0; k < jobs; ++k) body(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> workers;
    const unsigned count = static_cast<unsigned>(std::min<std::size_t>(parallelism, jobs));
    for (unsigned w = 0; w < count; ++w) {
        workers.emplace_back([&] {
            for (std::size_t k = next++; k < jobs; k = next++) body(k);
        });
    }
}

RunSummary summarize_run(const SimConfig& config, std::uint32_t replicate, std::uint32_t run_index, bool keep_series) {
    RunSummary s;
    s.replicate = replicate;
    s.run_index = run_index;
    try {
        RunResult r = run_simulation(config, run_index);
        s.initial = r.series.front();
        s.final = r.series.back();
        if (s.final.t != config.model.t_final) {
            // Final tick off the stride: measure from the final snapshot.
            const Landscape landscape(config.landscape, config.model.arena);
            std::vector<Vec2> pos;
            for (const Agent& a : r.final_snapshot) pos.push_back(a.pos);
            s.final = metrics::measure(config.model.t_final, r.final_snapshot, landscape,
                                       compute_neighbors(pos, config.model.r_comm));
        }
        for (const auto& snap : r.snapshots) s.snapshot_metrics.push_back(snap.metrics);
        s.mean_messenger_ratio = r.mean_messenger_ratio;
        s.trajectory_digest = r.trajectory_digest;
        if (keep_series) s.series = std::move(r.series);
        s.ok = true;
    } catch (const std::exception& e) {
        s.ok = false;
        s.error = e.what();
    }
    return s;
}

SweepOutput run_sweep(const SweepSpec& spec, const SimConfig& base, unsigned parallelism) {
    if (spec.replicates == 0) throw std::invalid_argument("sweep: replicates must be at least 1");
    if (spec.grid.empty()) throw std::invalid_argument("sweep: grid is empty");
    validate(base);

    const std::size_t reps = spec.replicates;
    const std::size_t cells = spec.grid.size();
    // Job k < reps is baseline replicate k; the rest are cell-major.
    std::vector<RunSummary> slots((cells + 1) * reps);
    const SimConfig baseline = baseline_of(base);
    parallel_for(slots.size(), parallelism, [&](std::size_t k) {
        const auto cell_slot = k / reps;
        const auto rep = static_cast<std::uint32_t>(k % reps);
        if (cell_slot == 0) {
            slots[k] = summarize_run(baseline, rep, rep, spec.keep_series);
            return;
        }
        SimConfig config = base;
        config.dmp.p_e = spec.grid[cell_slot - 1].p_e;
        config.dmp.p_m = spec.grid[cell_slot - 1].p_m;
        const auto run_index = spec.paired ? rep : static_cast<std::uint32_t>(cell_slot * reps + rep);
        slots[k] = summarize_run(config, rep, run_index, spec.keep_series);
    });

    SweepOutput out;
    std::vector<RunSummary> base_runs(slots.begin(), slots.begin() + static_cast<std::ptrdiff_t>(reps));
    out.baseline = aggregate_cell({baseline.dmp.p_e, 0.0}, base_runs, base_runs, true);
    for (std::size_t c = 0; c < cells; ++c) {
        const auto first = slots.begin() + static_cast<std::ptrdiff_t>((c + 1) * reps);
        out.cells.push_back(aggregate_cell(spec.grid[c], {first, first + static_cast<std::ptrdiff_t>(reps)},
                                           base_runs, spec.paired));
    }
    return out;
}

std::vector<ConnectivityPoint> connectivity_sweep(std::span<const double> r_values, const SimConfig& base,
                                                  std::uint32_t replicates, unsigned parallelism) {
    if (replicates == 0) throw std::invalid_argument("connectivity: replicates must be at least 1");
    std::vector<double> radii(r_values.begin(), r_values.end());
    for (double r : radii) {
        if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument("connectivity: r_comm values must be positive");
    }
    std::sort(radii.begin(), radii.end());
    radii.erase(std::unique(radii.begin(), radii.end()), radii.end());

    const SimConfig baseline = baseline_of(base);
    validate(baseline);
    std::vector<RunSummary> slots(radii.size() * replicates);
    parallel_for(slots.size(), parallelism, [&](std::size_t k) {
        SimConfig config = baseline;
        config.model.r_comm = radii[k / replicates];
        const auto rep = static_cast<std::uint32_t>(k % replicates);
        slots[k] = summarize_run(config, rep, rep, false);
    });

    std::vector<ConnectivityPoint> out;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        ConnectivityPoint p;
        p.r_comm = radii[i];
        const auto first = slots.begin() + static_cast<std::ptrdiff_t>(i * replicates);
        p.runs.assign(first, first + replicates);
        std::vector<double> ic, fc, io, fo, is, fs;
        for (const auto& r : p.runs) {
            if (!r.ok) continue;
            ic.push_back(r.initial.n_clusters);
            fc.push_back(r.final.n_clusters);
            io.push_back(r.initial.e_p_o);
            fo.push_back(r.final.e_p_o);
            is.push_back(r.initial.e_p_s);
            fs.push_back(r.final.e_p_s);
        }
        p.initial_clusters = Stats::of(ic);
        p.final_clusters = Stats::of(fc);
        p.initial_e_p_o = Stats::of(io);
        p.final_e_p_o = Stats::of(fo);
        p.initial_e_p_s = Stats::of(is);
        p.final_e_p_s = Stats::of(fs);
        out.push_back(std::move(p));
    }
    return out;
}

} // namespace ferry
