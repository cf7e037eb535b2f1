#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace thzloc {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Independent stream keyed by (seed, tags...). The same key always yields
/// the same stream, regardless of which thread asks for it.
inline Rng derive_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
    std::uint64_t h = mix64(seed);
    for (auto t : tags) {
        h = mix64(h ^ mix64(t));
    }
    return Rng(h);
}

}  // namespace thzloc
