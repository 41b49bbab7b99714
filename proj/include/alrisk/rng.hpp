#pragma once

#include <array>
#include <cstdint>

namespace alrisk {

// Philox4x64-10 counter-based generator (Salmon et al., Random123 family).
//
// Chosen so that seeds are portable: the output stream is a pure function of
// (key, counter) over fixed-width integer arithmetic, with no platform- or
// library-dependent state. Substreams for parallel work are free: every
// (seed, stream) pair indexes an independent 2^256-long sequence.
//
// Word layout matches the reference implementation (counter and key words are
// little-endian; numpy's Philox bit generator produces identical blocks for
// identical counter/key words, which is what the known-answer tests pin down).
class Philox4x64 {
public:
    using Block = std::array<std::uint64_t, 4>;
    using Key = std::array<std::uint64_t, 2>;

    Philox4x64(std::uint64_t seed, std::uint64_t stream) : key_{seed, stream} {}

    // One 10-round block: the stateless core, exposed for known-answer tests.
    static Block block(Block counter, Key key);

    std::uint64_t next_u64();

    // Uniform double in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, bound) via rejection (unbiased, portable).
    std::uint64_t next_below(std::uint64_t bound);

private:
    Key key_;
    Block counter_{0, 0, 0, 0};
    Block buffer_{};
    unsigned buffered_ = 0; // remaining words in buffer_

    void refill();
};

} // namespace alrisk
