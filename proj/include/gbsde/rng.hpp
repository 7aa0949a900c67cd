#ifndef GBSDE_RNG_HPP
#define GBSDE_RNG_HPP

#include <cstdint>
#include <random>

namespace gbsde {

// Seeded generator with explicit output mapping. std::uniform_real_distribution
// is implementation-defined, so uniforms are derived from raw 64-bit draws to
// keep runs reproducible byte-for-byte.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    // Uniform integer in [0, n).
    std::size_t uniform_index(std::size_t n) {
        return static_cast<std::size_t>(engine_() % n);
    }

    // +1 or -1 with equal probability.
    int sign() { return (engine_() & 1u) ? 1 : -1; }

private:
    std::mt19937_64 engine_;
};

}  // namespace gbsde

#endif
