#pragma once

#include <optional>
#include <string_view>
#include <variant>

#include "ferrysim/geometry.hpp"

namespace ferry {

enum class LandscapeKind { RadialCone, PlanarGradient, BimodalGaussian, Ridge };

/// f(p) = |p - center|. Circular iso-contours, minimum at the center.
struct RadialConeParams {
    Vec2 center{1.0, 1.0};
    friend bool operator==(const RadialConeParams&, const RadialConeParams&) = default;
};

/// f(p) = offset + slope * p.x
struct PlanarGradientParams {
    double slope = 0.5;
    double offset = 0.0;
    friend bool operator==(const PlanarGradientParams&, const PlanarGradientParams&) = default;
};

struct GaussianBump {
    Vec2 center;
    double width = 1.0;
    double amplitude = 1.0;
    friend bool operator==(const GaussianBump&, const GaussianBump&) = default;
};

/// Sum of two isotropic Gaussian bumps.
struct BimodalGaussianParams {
    GaussianBump first{{0.6, 1.4}, 0.4, 1.0};
    GaussianBump second{{1.4, 0.6}, 0.4, 0.8};
    friend bool operator==(const BimodalGaussianParams&, const BimodalGaussianParams&) = default;
};

/// f(p) = scale * |p.x - axis_x|. Straight iso-lines mirrored about the axis.
struct RidgeParams {
    double axis_x = 1.0;
    double scale = 0.5;
    friend bool operator==(const RidgeParams&, const RidgeParams&) = default;
};

using LandscapeSpec = std::variant<RadialConeParams, PlanarGradientParams, BimodalGaussianParams, RidgeParams>;

[[nodiscard]] LandscapeKind kind_of(const LandscapeSpec& spec) noexcept;
[[nodiscard]] std::string_view to_string(LandscapeKind kind) noexcept;
[[nodiscard]] std::optional<LandscapeKind> parse_landscape_kind(std::string_view name) noexcept;

/// Default parameters scaled to the arena: cone centered, gradient and ridge
/// normalized by the width, bumps placed on the anti-diagonal.
[[nodiscard]] LandscapeSpec default_landscape_spec(LandscapeKind kind, const Arena& arena);

/// Closed-form spatial mean of f under the uniform distribution on the arena.
[[nodiscard]] double closed_form_mean(const LandscapeSpec& spec, const Arena& arena);

/// Composite Gauss-Legendre estimate of the spatial mean of `field(f)`; the
/// integration grid is split along the lines where f is not smooth.
[[nodiscard]] double quadrature_mean(const LandscapeSpec& spec, const Arena& arena, bool absolute = false);

/// Evaluates a landscape at a point without any arena check.
[[nodiscard]] double evaluate(const LandscapeSpec& spec, Vec2 p) noexcept;

/// A scalar information field over an arena together with its ground truth.
///
/// Construction validates the parameters and cross-checks the closed-form mean
/// against numerical quadrature (1e-6 relative); a mismatch throws
/// std::logic_error.
class Landscape {
public:
    Landscape(LandscapeSpec spec, Arena arena);

    [[nodiscard]] double value(Vec2 p) const noexcept { return evaluate(spec_, p); }

    /// Checked evaluation; throws std::domain_error outside the arena.
    [[nodiscard]] double at(Vec2 p) const;

    [[nodiscard]] double ground_truth() const noexcept { return ground_truth_; }
    [[nodiscard]] LandscapeKind kind() const noexcept { return kind_of(spec_); }
    [[nodiscard]] const LandscapeSpec& spec() const noexcept { return spec_; }
    [[nodiscard]] const Arena& arena() const noexcept { return arena_; }

private:
    LandscapeSpec spec_;
    Arena arena_;
    double ground_truth_ = 0.0;
};

} // namespace ferry
