#include "ferrysim/config.hpp"

#include <algorithm>
#include <cmath>

namespace ferry {
namespace {

void check(bool ok, const char* field, const char* message) {
    if (!ok) throw ConfigError(field, message);
}

bool unit_interval(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

} // namespace

void validate(const SimConfig& c) {
    const ModelParams& m = c.model;
    check(m.n_agents >= 1, "model.n_agents", "must be at least 1");
    check(std::isfinite(m.arena.width) && m.arena.width > 0.0, "model.arena_width", "must be positive");
    check(std::isfinite(m.arena.height) && m.arena.height > 0.0, "model.arena_height", "must be positive");
    check(std::isfinite(m.r_comm) && m.r_comm > 0.0, "model.r_comm", "must be positive");
    check(unit_interval(m.alpha), "model.alpha", "must be in [0,1]");
    check(unit_interval(m.beta), "model.beta", "must be in [0,1]");
    check(unit_interval(m.r_lambda), "model.r_lambda", "must be in [0,1]");
    check(std::isfinite(m.step_size) && m.step_size > 0.0, "model.step_size", "must be positive");
    check(std::isfinite(m.sigma) && m.sigma >= 0.0, "model.sigma", "must be non-negative");

    check(unit_interval(c.dmp.p_e), "dmp.p_e", "must be in [0,1]");
    check(unit_interval(c.dmp.p_m), "dmp.p_m", "must be in [0,1]");
    if (c.init_policy.kind == InitialStatePolicy::Kind::FixedCount) {
        check(c.init_policy.count <= m.n_agents, "init.count", "must not exceed model.n_agents");
    }
    if (c.init_policy.kind == InitialStatePolicy::Kind::StationaryRatio) {
        check(c.dmp.p_e + c.dmp.p_m > 0.0, "init.policy", "stationary_ratio needs p_e + p_m > 0");
    }

    try {
        (void)closed_form_mean(c.landscape, m.arena);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("landscape", e.what());
    }

    check(c.metrics_stride >= 1, "output.metrics_stride", "must be at least 1");
    check(std::is_sorted(c.snapshot_ticks.begin(), c.snapshot_ticks.end()) &&
              std::adjacent_find(c.snapshot_ticks.begin(), c.snapshot_ticks.end()) == c.snapshot_ticks.end(),
          "output.snapshot_ticks", "must be strictly increasing");
}

SimConfig baseline_of(SimConfig config) {
    config.dmp.p_m = 0.0;
    config.init_policy = InitialStatePolicy::all_exploiters();
    return config;
}

} // namespace ferry
