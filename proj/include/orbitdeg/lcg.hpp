#pragma once

#include <cstdint>

namespace orbitdeg {

/// 64-bit linear congruential generator (Knuth's MMIX constants). Output is
/// the top 31 bits of the state, so the stream is identical on every platform:
///   state <- 6364136223846793005 * state + 1442695040888963407  (mod 2^64)
class Lcg {
public:
    explicit Lcg(std::uint64_t seed) : state_(seed) {}

    std::uint32_t next() {
        state_ = state_ * 6364136223846793005ULL + 1442695040888963407ULL;
        return static_cast<std::uint32_t>(state_ >> 33);
    }

    /// Integer in [lo, hi] by reduction modulo the span.
    long uniform(long lo, long hi) {
        const auto span = static_cast<std::uint32_t>(hi - lo + 1);
        return lo + static_cast<long>(next() % span);
    }

private:
    std::uint64_t state_;
};

} // namespace orbitdeg
