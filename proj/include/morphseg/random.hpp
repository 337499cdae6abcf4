#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace morphseg {

/// std::mt19937_64 output is fixed by the standard, but the std::*_distribution
/// algorithms are not. Everything seeded goes through these helpers so that
/// splits and shuffles are identical across standard libraries.
using Rng = std::mt19937_64;

/// Uniform integer in [0, bound), bound > 0, by rejection sampling.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound)
{
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound + 1) % bound;
    std::uint64_t x;
    do {
        x = rng();
    } while (x > limit);
    return x % bound;
}

/// Uniform real in [0, 1) with 53 random bits.
inline double uniform_unit(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

template <typename T>
void shuffle(std::span<T> items, Rng& rng)
{
    for (std::size_t i = items.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(uniform_below(rng, i));
        using std::swap;
        swap(items[i - 1], items[j]);
    }
}

}  // namespace morphseg
