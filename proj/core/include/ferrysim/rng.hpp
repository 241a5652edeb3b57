#pragma once

#include <array>
#include <cstdint>

namespace ferry {

/// Philox4x32 with 10 rounds (Salmon et al., Random123). Pure function of
/// (counter, key); every stream in the simulator is a slice of its output.
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static constexpr Counter generate(Counter ctr, Key key) noexcept {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kWeyl0;
                key[1] += kWeyl1;
            }
            const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const auto lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const auto lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

/// What a stream is used for. The tag occupies counter word 3, so streams with
/// different purposes never overlap.
enum class StreamPurpose : std::uint32_t {
    Init = 1,     // initial position, opinion and role
    Dynamics = 2, // measurement noise and random-walk draws
    Dmp = 3,      // role switching and the re-sample on return to Exploiter
    Run = 4,      // run-level draws not tied to an agent
};

/// Identifies one independent stream. Layout of the Philox input:
///   key     = {low32(master_seed), high32(master_seed)}
///   counter = {block, stream_id, run_index, purpose}
/// where `block` increments every four 32-bit outputs.
struct StreamKey {
    std::uint64_t master_seed = 0;
    std::uint32_t run_index = 0;
    std::uint32_t stream_id = 0;
    StreamPurpose purpose = StreamPurpose::Run;
};

inline constexpr std::uint32_t kRunLevelStreamId = 0xFFFFFFFFu;

/// Sequential view over one counter-based stream. Plain value: copying a
/// stream forks it at its current position.
class RngStream {
public:
    RngStream() = default;
    explicit RngStream(const StreamKey& id) noexcept
        : key_{static_cast<std::uint32_t>(id.master_seed),
               static_cast<std::uint32_t>(id.master_seed >> 32)},
          stream_id_(id.stream_id),
          run_index_(id.run_index),
          purpose_(static_cast<std::uint32_t>(id.purpose)) {}

    std::uint32_t next_u32() noexcept {
        if (used_ == 4) refill();
        return buffer_[used_++];
    }

    std::uint64_t next_u64() noexcept {
        const std::uint64_t hi = next_u32();
        return (hi << 32) | next_u32();
    }

    /// Uniform on [0,1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on (0,1], safe as a logarithm argument.
    double uniform_open_low() noexcept {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    /// Standard normal by the Box-Muller transform; consumes two uniforms.
    double standard_normal() noexcept;

    double normal(double mean, double stddev) noexcept { return mean + stddev * standard_normal(); }

    bool bernoulli(double p) noexcept { return uniform() < p; }

    [[nodiscard]] std::uint64_t blocks_consumed() const noexcept { return block_; }

    friend bool operator==(const RngStream&, const RngStream&) = default;

private:
    void refill() noexcept {
        buffer_ = Philox4x32::generate({static_cast<std::uint32_t>(block_), stream_id_, run_index_, purpose_},
                                       key_);
        ++block_;
        used_ = 0;
    }

    Philox4x32::Key key_{};
    std::uint32_t stream_id_ = 0;
    std::uint32_t run_index_ = 0;
    std::uint32_t purpose_ = 0;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    std::uint32_t used_ = 4;
};

} // namespace ferry
