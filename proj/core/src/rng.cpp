#include "ferrysim/rng.hpp"

#include <cmath>
#include <numbers>

namespace ferry {

double RngStream::standard_normal() noexcept {
    const double radius = std::sqrt(-2.0 * std::log(uniform_open_low()));
    const double angle = 2.0 * std::numbers::pi * uniform();
    return radius * std::cos(angle);
}

} // namespace ferry
