#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace cphase {

// 64-bit finalizer (splitmix64 / Stafford variant 13). Sensing matrices are
// defined by hashing (seed, column, counter) so any column can be regenerated
// independently of the others.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t hash3(std::uint64_t seed, std::uint64_t a, std::uint64_t b) noexcept
{
    return mix64(seed ^ mix64(a ^ mix64(b + 0x632be59bd9b4e019ULL)));
}

/// Uniform double in (0, 1] from the top 53 bits.
constexpr double unit_interval(std::uint64_t bits) noexcept
{
    return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

/// Uniform integer in [0, range) (multiply-shift range reduction).
inline std::uint64_t bounded(std::uint64_t bits, std::uint64_t range) noexcept
{
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(bits) * range) >> 64);
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view tag, std::uint64_t index = 0);

/// Seeded engine for a named stream split from a master seed.
std::mt19937_64 make_stream(std::uint64_t master, std::string_view tag, std::uint64_t index = 0);

} // namespace cphase
