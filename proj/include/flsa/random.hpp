#ifndef FLSA_RANDOM_HPP
#define FLSA_RANDOM_HPP

#include <cstdint>
#include <random>
#include <string_view>

namespace flsa {

using Rng = std::mt19937_64;

namespace detail {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline constexpr std::uint64_t fnv1a(std::string_view text) noexcept {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001B3ULL;
    }
    return h;
}

} // namespace detail

/**
 * Derive an independent seed for a named component from one master seed.
 * A command takes a single `--seed`; every stochastic step draws from
 * `derive_seed(seed, "<step>")`, optionally with an index for repeated steps.
 */
inline constexpr std::uint64_t derive_seed(std::uint64_t master, std::string_view component,
                                           std::uint64_t index = 0) noexcept {
    return detail::splitmix64(detail::splitmix64(master ^ detail::fnv1a(component)) + index);
}

} // namespace flsa

#endif
