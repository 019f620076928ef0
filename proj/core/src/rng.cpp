#include "seq2form/rng.hpp"

namespace s2f {

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

SeededRng::SeededRng(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream) {
    std::uint64_t state = seed;
    std::uint64_t mixed = splitmix64(state);
    state ^= stream * 0xD2B74407B1CE6E93ULL;
    mixed ^= splitmix64(state);
    engine_.seed(mixed);
}

std::uint64_t SeededRng::next_u64() { return engine_(); }

std::uint64_t SeededRng::next_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
}

double SeededRng::uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double SeededRng::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
}

}  // namespace s2f
