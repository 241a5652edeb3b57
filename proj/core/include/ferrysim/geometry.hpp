#pragma once

#include <cmath>

namespace ferry {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2& operator+=(Vec2 o) noexcept { x += o.x; y += o.y; return *this; }
    constexpr Vec2& operator-=(Vec2 o) noexcept { x -= o.x; y -= o.y; return *this; }
    constexpr Vec2& operator*=(double s) noexcept { x *= s; y *= s; return *this; }

    friend constexpr Vec2 operator+(Vec2 a, Vec2 b) noexcept { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Vec2 operator-(Vec2 a, Vec2 b) noexcept { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Vec2 operator-(Vec2 a) noexcept { return {-a.x, -a.y}; }
    friend constexpr Vec2 operator*(double s, Vec2 v) noexcept { return {s * v.x, s * v.y}; }
    friend constexpr Vec2 operator*(Vec2 v, double s) noexcept { return {s * v.x, s * v.y}; }
    friend constexpr bool operator==(Vec2, Vec2) noexcept = default;
};

inline double norm(Vec2 v) noexcept { return std::sqrt(v.x * v.x + v.y * v.y); }
constexpr double squared_norm(Vec2 v) noexcept { return v.x * v.x + v.y * v.y; }
constexpr double squared_distance(Vec2 a, Vec2 b) noexcept { return squared_norm(a - b); }
inline bool is_finite(Vec2 v) noexcept { return std::isfinite(v.x) && std::isfinite(v.y); }

/// Axis-aligned rectangle [0,width] x [0,height] with mirror walls.
struct Arena {
    double width = 2.0;
    double height = 2.0;

    friend constexpr bool operator==(const Arena&, const Arena&) noexcept = default;

    [[nodiscard]] constexpr bool contains(Vec2 p) const noexcept {
        return p.x >= 0.0 && p.x <= width && p.y >= 0.0 && p.y <= height;
    }
    [[nodiscard]] constexpr Vec2 center() const noexcept { return {0.5 * width, 0.5 * height}; }
    [[nodiscard]] double diagonal() const noexcept { return std::hypot(width, height); }

    /// Mirrors a coordinate back into [0,extent]. Folding with period 2*extent is
    /// the closed form of reflecting repeatedly off both walls.
    [[nodiscard]] static double reflect_coordinate(double v, double extent) noexcept {
        const double period = 2.0 * extent;
        v = std::fabs(v);
        if (v > period) v = std::fmod(v, period);
        if (v > extent) v = period - v;
        return v;
    }

    [[nodiscard]] Vec2 reflect(Vec2 p) const noexcept {
        return {reflect_coordinate(p.x, width), reflect_coordinate(p.y, height)};
    }
};

} // namespace ferry
