#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace niss {

/// Identifies the generator scheme in serialized reports.
inline constexpr std::string_view kGeneratorName = "mt19937_64/splitmix64-streams";

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace detail

/// Derives an independent, named substream from a single 64-bit seed.
/// Distinct stream names never share state, so each party's local
/// randomness stays separated from the shared-bit and source streams.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::string_view stream_name) {
    std::uint64_t state = seed ^ detail::fnv1a(stream_name);
    std::seed_seq seq{detail::splitmix64(state), detail::splitmix64(state),
                      detail::splitmix64(state), detail::splitmix64(state)};
    return std::mt19937_64(seq);
}

/// Fair coin in {-1,+1}.
inline int fair_sign(std::mt19937_64& g) {
    return (g() & 1u) ? 1 : -1;
}

/// Uniform double in [0,1). Derived from the raw 64-bit draw so streams are
/// bit-identical across standard libraries.
inline double uniform01(std::mt19937_64& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

/// +1 with probability p, else -1.
inline int bernoulli_sign(std::mt19937_64& g, double p) {
    return uniform01(g) < p ? 1 : -1;
}

}  // namespace niss
