#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <utility>
#include <vector>

namespace minutia {

/// SplitMix64 generator. Every random draw in the library goes through this
/// type so that runs are byte-reproducible from an explicit seed.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t operator()() noexcept
    {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    static constexpr std::uint64_t min() noexcept { return 0; }
    static constexpr std::uint64_t max() noexcept { return ~std::uint64_t{0}; }

    /// Uniform in [0, 1) with 53 bits of resolution.
    double uniform01() noexcept
    {
        return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n).
    std::uint64_t randint(std::uint64_t n) noexcept
    {
        return static_cast<std::uint64_t>(uniform01() * static_cast<double>(n));
    }

    /// Standard normal via Box-Muller (the cached second deviate is discarded).
    double normal() noexcept
    {
        double u1 = uniform01();
        while (u1 <= 0.0)
            u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    std::uint64_t state() const noexcept { return state_; }

private:
    std::uint64_t state_;
};

/// Fisher-Yates permutation of 0..n-1: perm[k] is the source index placed at position k.
template <typename Container = std::vector<std::size_t>>
Container random_permutation(std::size_t n, SplitMix64& rng)
{
    Container perm(n);
    for (std::size_t i = 0; i < n; ++i)
        perm[i] = i;
    for (std::size_t i = n; i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.randint(i));
        std::swap(perm[i - 1], perm[j]);
    }
    return perm;
}

} // namespace minutia
