#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace hoistream {

// splitmix64; used to derive independent stream seeds from (seed, tags).
inline uint64_t mix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline uint64_t mix64(uint64_t a, uint64_t b) { return mix64(mix64(a) ^ b); }
inline uint64_t mix64(uint64_t a, uint64_t b, uint64_t c) { return mix64(mix64(a, b) ^ c); }

// Deterministic RNG. normal() is stateless Box-Muller (two uniforms per
// draw, cosine branch only) so the stream is reproducible from the engine
// state alone.
class Rng {
public:
    explicit Rng(uint64_t seed = 0) : engine_(seed) {}

    double uniform() {  // [0, 1)
        return (engine_() >> 11) * 0x1.0p-53;
    }

    // inclusive range
    int uniform_int(int lo, int hi) {
        return lo + static_cast<int>(engine_() % static_cast<uint64_t>(hi - lo + 1));
    }

    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace hoistream
