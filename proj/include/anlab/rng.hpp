#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace anlab {

/// Identifies one reproducible random stream.
struct RngSpec {
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;
};

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11), exposed as a
/// 64-bit UniformRandomBitGenerator. The 128-bit counter is split into a
/// 64-bit stream id, a 32-bit substream (shard) index and a 32-bit block
/// counter, so every (seed, stream, substream) triple owns a disjoint,
/// independently addressable sequence of 2^33 outputs.
class Philox {
public:
    using result_type = std::uint64_t;

    Philox(std::uint64_t seed, std::uint64_t stream, std::uint32_t substream = 0) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          ctr_{0u, substream, static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)} {}

    Philox(const RngSpec& spec, std::uint32_t substream = 0) noexcept
        : Philox(spec.seed, spec.stream_id, substream) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        if (pos_ == 2) refill();
        return buf_[pos_++];
    }

    /// Raw block for a given counter; exposed for known-answer tests.
    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                              std::array<std::uint32_t, 2> key) noexcept {
        constexpr std::uint32_t m0 = 0xD2511F53u, m1 = 0xCD9E8D57u;
        constexpr std::uint32_t w0 = 0x9E3779B9u, w1 = 0xBB67AE85u;
        for (int r = 0; r < 10; ++r) {
            const std::uint64_t p0 = std::uint64_t{m0} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{m1} * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
            key[0] += w0;
            key[1] += w1;
        }
        return ctr;
    }

private:
    void refill() noexcept {
        const auto out = block(ctr_, key_);
        ++ctr_[0];
        buf_[0] = (std::uint64_t{out[1]} << 32) | out[0];
        buf_[1] = (std::uint64_t{out[3]} << 32) | out[2];
        pos_ = 0;
    }

    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> ctr_;
    std::array<std::uint64_t, 2> buf_{};
    int pos_ = 2;
};

}  // namespace anlab
