#pragma once

#include <cstdint>
#include <random>
#include <utility>

namespace hvn {

// splitmix64 step; used everywhere a derived seed is needed.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Deterministic seed mixing: child = splitmix64(parent ^ splitmix64(stream+1)).
// Distinct stream indices give independent streams for our purposes.
inline std::uint64_t mix_seed(std::uint64_t parent, std::uint64_t stream) {
    return splitmix64(parent ^ splitmix64(stream + 1));
}

// Deterministic random stream. mt19937_64 gives a standard-specified u64
// sequence; uniform/normal conversion is done by hand so results do not
// depend on the standard library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1): 53 mantissa bits.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform on {0, ..., n-1}. Modulo bias is irrelevant at our n.
    std::uint64_t uniform_int(std::uint64_t n) { return engine_() % n; }

    // Standard normal via Box-Muller; the second draw is cached.
    double normal();

    // Fisher-Yates shuffle.
    template <typename Vec>
    void shuffle(Vec& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform_int(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // Independent stream derived from this rng's seed, not its state.
    Rng child(std::uint64_t stream) const { return Rng(mix_seed(seed_, stream)); }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace hvn
