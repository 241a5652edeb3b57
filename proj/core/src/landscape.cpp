#include "ferrysim/landscape.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace ferry {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Integral of sqrt(x^2 + y^2) over [0,a] x [0,b].
double corner_distance_integral(double a, double b) {
    if (a <= 0.0 || b <= 0.0) return 0.0;
    const double d = std::hypot(a, b);
    return (2.0 * a * b * d + a * a * a * std::log((b + d) / a) + b * b * b * std::log((a + d) / b)) / 6.0;
}

// Integral of exp(-(x-c)^2 / (2 w^2)) over [0, extent].
double gaussian_integral(double c, double w, double extent) {
    const double s = std::numbers::sqrt2 * w;
    return w * std::sqrt(std::numbers::pi / 2.0) * (std::erf((extent - c) / s) - std::erf(-c / s));
}

double bump(const GaussianBump& b, Vec2 p) {
    return b.amplitude * std::exp(-squared_distance(p, b.center) / (2.0 * b.width * b.width));
}

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument("landscape: " + what);
}

void validate(const LandscapeSpec& spec, const Arena& arena) {
    require(std::isfinite(arena.width) && arena.width > 0.0, "arena width must be positive");
    require(std::isfinite(arena.height) && arena.height > 0.0, "arena height must be positive");
    std::visit(Overloaded{
                   [&](const RadialConeParams& c) {
                       require(is_finite(c.center) && arena.contains(c.center), "cone center must lie in the arena");
                   },
                   [&](const PlanarGradientParams& g) {
                       require(std::isfinite(g.slope) && std::isfinite(g.offset), "gradient parameters must be finite");
                   },
                   [&](const BimodalGaussianParams& g) {
                       for (const auto* b : {&g.first, &g.second}) {
                           require(is_finite(b->center), "bump center must be finite");
                           require(std::isfinite(b->width) && b->width > 0.0, "bump width must be positive");
                           require(std::isfinite(b->amplitude), "bump amplitude must be finite");
                       }
                   },
                   [&](const RidgeParams& r) {
                       require(std::isfinite(r.axis_x) && r.axis_x >= 0.0 && r.axis_x <= arena.width,
                               "ridge axis must lie in the arena");
                       require(std::isfinite(r.scale), "ridge scale must be finite");
                   },
               },
               spec);
}

// Breakpoints along each axis at which f has a kink.
std::pair<std::vector<double>, std::vector<double>> breakpoints(const LandscapeSpec& spec, const Arena& arena) {
    std::vector<double> xs{0.0, arena.width};
    std::vector<double> ys{0.0, arena.height};
    if (const auto* cone = std::get_if<RadialConeParams>(&spec)) {
        xs.push_back(cone->center.x);
        ys.push_back(cone->center.y);
    } else if (const auto* ridge = std::get_if<RidgeParams>(&spec)) {
        xs.push_back(ridge->axis_x);
    }
    for (auto* v : {&xs, &ys}) {
        std::sort(v->begin(), v->end());
        v->erase(std::unique(v->begin(), v->end()), v->end());
    }
    return {xs, ys};
}

constexpr std::array<double, 4> kGaussNodes{0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                            0.9602898564975363};
constexpr std::array<double, 4> kGaussWeights{0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                              0.1012285362903763};

// Abscissae and weights of a composite 8-point rule over every segment.
void build_rule(const std::vector<double>& cuts, int panels, std::vector<double>& nodes, std::vector<double>& weights) {
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
        const double h = (cuts[s + 1] - cuts[s]) / panels;
        for (int k = 0; k < panels; ++k) {
            const double mid = cuts[s] + (k + 0.5) * h;
            for (std::size_t q = 0; q < kGaussNodes.size(); ++q) {
                for (double sign : {-1.0, 1.0}) {
                    nodes.push_back(mid + sign * 0.5 * h * kGaussNodes[q]);
                    weights.push_back(0.5 * h * kGaussWeights[q]);
                }
            }
        }
    }
}

} // namespace

LandscapeKind kind_of(const LandscapeSpec& spec) noexcept {
    return std::visit(Overloaded{
                          [](const RadialConeParams&) { return LandscapeKind::RadialCone; },
                          [](const PlanarGradientParams&) { return LandscapeKind::PlanarGradient; },
                          [](const BimodalGaussianParams&) { return LandscapeKind::BimodalGaussian; },
                          [](const RidgeParams&) { return LandscapeKind::Ridge; },
                      },
                      spec);
}

std::string_view to_string(LandscapeKind kind) noexcept {
    switch (kind) {
    case LandscapeKind::RadialCone: return "radial_cone";
    case LandscapeKind::PlanarGradient: return "planar_gradient";
    case LandscapeKind::BimodalGaussian: return "bimodal_gaussian";
    case LandscapeKind::Ridge: return "ridge";
    }
    return "unknown";
}

std::optional<LandscapeKind> parse_landscape_kind(std::string_view name) noexcept {
    for (auto k : {LandscapeKind::RadialCone, LandscapeKind::PlanarGradient, LandscapeKind::BimodalGaussian,
                   LandscapeKind::Ridge}) {
        if (to_string(k) == name) return k;
    }
    return std::nullopt;
}

LandscapeSpec default_landscape_spec(LandscapeKind kind, const Arena& arena) {
    switch (kind) {
    case LandscapeKind::RadialCone: return RadialConeParams{arena.center()};
    case LandscapeKind::PlanarGradient: return PlanarGradientParams{1.0 / arena.width, 0.0};
    case LandscapeKind::BimodalGaussian: {
        const double w = arena.width;
        const double h = arena.height;
        const double spread = 0.2 * std::min(w, h);
        return BimodalGaussianParams{{{0.3 * w, 0.7 * h}, spread, 1.0}, {{0.7 * w, 0.3 * h}, spread, 0.8}};
    }
    case LandscapeKind::Ridge: return RidgeParams{0.5 * arena.width, 1.0 / arena.width};
    }
    throw std::invalid_argument("landscape: unknown kind");
}

double evaluate(const LandscapeSpec& spec, Vec2 p) noexcept {
    return std::visit(Overloaded{
                          [p](const RadialConeParams& c) { return norm(p - c.center); },
                          [p](const PlanarGradientParams& g) { return g.offset + g.slope * p.x; },
                          [p](const BimodalGaussianParams& g) { return bump(g.first, p) + bump(g.second, p); },
                          [p](const RidgeParams& r) { return r.scale * std::fabs(p.x - r.axis_x); },
                      },
                      spec);
}

double closed_form_mean(const LandscapeSpec& spec, const Arena& arena) {
    validate(spec, arena);
    const double w = arena.width;
    const double h = arena.height;
    const double area = w * h;
    return std::visit(
        Overloaded{
            [&](const RadialConeParams& c) {
                const double left = c.center.x;
                const double right = w - c.center.x;
                const double below = c.center.y;
                const double above = h - c.center.y;
                return (corner_distance_integral(left, below) + corner_distance_integral(left, above) +
                        corner_distance_integral(right, below) + corner_distance_integral(right, above)) /
                       area;
            },
            [&](const PlanarGradientParams& g) { return g.offset + g.slope * 0.5 * w; },
            [&](const BimodalGaussianParams& g) {
                double total = 0.0;
                for (const auto* b : {&g.first, &g.second}) {
                    total += b->amplitude * gaussian_integral(b->center.x, b->width, w) *
                             gaussian_integral(b->center.y, b->width, h);
                }
                return total / area;
            },
            [&](const RidgeParams& r) {
                const double a = r.axis_x;
                const double b = w - r.axis_x;
                return r.scale * (a * a + b * b) / (2.0 * w);
            },
        },
        spec);
}

double quadrature_mean(const LandscapeSpec& spec, const Arena& arena, bool absolute) {
    validate(spec, arena);
    constexpr int kPanels = 24;
    const auto [xcuts, ycuts] = breakpoints(spec, arena);
    std::vector<double> xn, xw, yn, yw;
    build_rule(xcuts, kPanels, xn, xw);
    build_rule(ycuts, kPanels, yn, yw);
    double total = 0.0;
    for (std::size_t i = 0; i < xn.size(); ++i) {
        double column = 0.0;
        for (std::size_t j = 0; j < yn.size(); ++j) {
            const double v = evaluate(spec, {xn[i], yn[j]});
            column += yw[j] * (absolute ? std::fabs(v) : v);
        }
        total += xw[i] * column;
    }
    return total / (arena.width * arena.height);
}

Landscape::Landscape(LandscapeSpec spec, Arena arena) : spec_(std::move(spec)), arena_(arena) {
    ground_truth_ = closed_form_mean(spec_, arena_);
    const double numeric = quadrature_mean(spec_, arena_);
    const double magnitude = quadrature_mean(spec_, arena_, true);
    if (!(std::fabs(numeric - ground_truth_) <= 1e-6 * magnitude + 1e-300)) {
        throw std::logic_error("landscape: closed-form mean " + std::to_string(ground_truth_) +
                               " disagrees with quadrature " + std::to_string(numeric));
    }
}

double Landscape::at(Vec2 p) const {
    if (!arena_.contains(p)) {
        throw std::domain_error("landscape: position (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                                ") outside the arena");
    }
    return value(p);
}

} // namespace ferry
