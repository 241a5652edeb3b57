#pragma once

#include <bit>
#include <cstdint>
#include <string_view>

namespace ferry {

/// 64-bit FNV-1a over an explicit little-endian byte encoding, so digests do
/// not depend on the host's byte order or struct padding.
class Digest {
public:
    Digest& add(std::uint64_t v) noexcept {
        for (int i = 0; i < 8; ++i) byte(static_cast<std::uint8_t>(v >> (8 * i)));
        return *this;
    }
    Digest& add(double v) noexcept { return add(std::bit_cast<std::uint64_t>(v)); }
    Digest& add(std::string_view s) noexcept {
        add(static_cast<std::uint64_t>(s.size()));
        for (char c : s) byte(static_cast<std::uint8_t>(c));
        return *this;
    }
    [[nodiscard]] std::uint64_t value() const noexcept { return state_; }

private:
    void byte(std::uint8_t b) noexcept {
        state_ ^= b;
        state_ *= 0x100000001B3ull;
    }
    std::uint64_t state_ = 0xCBF29CE484222325ull;
};

} // namespace ferry
