#pragma once

#include <cstdint>
#include <random>

namespace jointsparse {

using Engine = std::mt19937_64;

// SplitMix64 finalizer. Used to derive independent stream seeds from a
// (base seed, stream id) pair so that results never depend on the order in
// which streams are consumed.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept
{
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline Engine make_engine(std::uint64_t seed, std::uint64_t stream)
{
    return Engine{mix_seed(seed, stream)};
}

// Stream tags for the independent random draws that make up one trial.
namespace streams {
inline constexpr std::uint64_t support = 0x5u;
inline constexpr std::uint64_t values = 0x100u;
inline constexpr std::uint64_t masks = 0x10000u;
inline constexpr std::uint64_t noise = 0x1000000u;
} // namespace streams

} // namespace jointsparse
