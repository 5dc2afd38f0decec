#include "cphase/random.hpp"

namespace cphase {

std::uint64_t derive_seed(std::uint64_t master, std::string_view tag, std::uint64_t index)
{
    // FNV-1a over the tag, then mixed with the master seed and index.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : tag) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return hash3(master, h, index);
}

std::mt19937_64 make_stream(std::uint64_t master, std::string_view tag, std::uint64_t index)
{
    const std::uint64_t s = derive_seed(master, tag, index);
    std::seed_seq seq{static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32)};
    return std::mt19937_64(seq);
}

} // namespace cphase
