#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace s2f {

std::uint64_t splitmix64(std::uint64_t& state);
std::uint64_t fnv1a64(std::string_view s);

// Deterministic random stream. Identical (seed, stream) pairs produce
// identical draw sequences on every platform: the engine is the fully
// specified std::mt19937_64 and all value mappings below are hand-rolled
// (std distributions are implementation-defined and therefore avoided).
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    std::uint64_t next_u64();
    // Unbiased-enough bounded draw (Lemire multiply-shift); n > 0.
    std::uint64_t next_below(std::uint64_t n);
    // [0, 1), 53-bit resolution.
    double uniform01();
    double uniform(double lo, double hi);

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 engine_;
};

}  // namespace s2f
