#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ferrysim/agent.hpp"
#include "ferrysim/dmp.hpp"
#include "ferrysim/landscape.hpp"

namespace ferry {

/// Rejected configuration value. `field()` is the dotted path of the offending
/// key, e.g. "model.alpha".
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
    [[nodiscard]] const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Everything needed to reproduce one simulation run.
struct SimConfig {
    ModelParams model;
    DmpParams dmp;
    InitialStatePolicy init_policy;
    LandscapeSpec landscape = RadialConeParams{};
    std::uint64_t master_seed = 1;
    std::uint64_t metrics_stride = 100;
    std::vector<std::uint64_t> snapshot_ticks{1000, 2000, 4000, 10000, 40000};

    friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

/// Throws ConfigError naming the first invalid field.
void validate(const SimConfig& config);

/// Same run with Messengers disabled: p_m = 0 and no initial Messengers.
[[nodiscard]] SimConfig baseline_of(SimConfig config);

} // namespace ferry
