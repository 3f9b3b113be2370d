#pragma once

#include <cstdint>

namespace aexch {

/// Counter-based random stream. The i-th output is a pure function of
/// (seed, i), so a stream can be resumed from the (seed, draws) pair that
/// snapshot headers record, bit-exactly and on any platform.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::uint64_t draws = 0) noexcept
        : seed_(seed), draws_(draws) {}

    std::uint64_t next_u64() noexcept {
        std::uint64_t z = seed_ + (++draws_) * golden_gamma;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1) with 53 random bits.
    double next_unit() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform in [0, n) by multiply-high; rejection-free, so every call
    /// consumes exactly one draw regardless of n.
    std::uint64_t next_below(std::uint64_t n) noexcept {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t draws() const noexcept { return draws_; }

private:
    static constexpr std::uint64_t golden_gamma = 0x9E3779B97F4A7C15ull;

    std::uint64_t seed_;
    std::uint64_t draws_;
};

} // namespace aexch
