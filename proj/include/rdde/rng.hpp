#pragma once

// Counter-based generator: every draw is a pure function of
// (seed, stream, counter), hashed with the SplitMix64 finalizer.
// Streams are driver components, counters are (possibly negative) fine-grid
// step indices, so a path is identical whatever the thread count or the
// amount of history requested.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace rdde {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : key_(splitmix64(seed ^ 0x5bd1e9955bd1e995ULL)) {}

    std::uint64_t bits(std::uint64_t stream, std::int64_t counter, std::uint64_t lane = 0) const {
        const std::uint64_t s = splitmix64(key_ ^ splitmix64((stream << 8) ^ lane));
        return splitmix64(s ^ splitmix64(static_cast<std::uint64_t>(counter)));
    }

    /// Uniform on the open interval (0,1).
    double uniform(std::uint64_t stream, std::int64_t counter, std::uint64_t lane = 0) const {
        return (static_cast<double>(bits(stream, counter, lane) >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal by Box-Muller on two lanes of the same counter.
    double normal(std::uint64_t stream, std::int64_t counter) const {
        const double u1 = uniform(stream, counter, 0), u2 = uniform(stream, counter, 1);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::uint64_t key_;
};

}  // namespace rdde
