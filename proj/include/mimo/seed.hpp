#pragma once

#include <cstdint>
#include <initializer_list>

namespace mimo {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Counter-based child seed: the same (master, path) always yields the same stream seed.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = mix64(master);
    for (std::uint64_t p : path) s = mix64(s ^ mix64(p + 0x632be59bd9b4e019ULL));
    return s;
}

// Stream tags for derive_seed paths.
namespace stream {
inline constexpr std::uint64_t geometry = 1;
inline constexpr std::uint64_t scene = 2;
inline constexpr std::uint64_t noise = 3;
inline constexpr std::uint64_t trial = 4;
inline constexpr std::uint64_t calibration = 5;
}  // namespace stream

}  // namespace mimo
