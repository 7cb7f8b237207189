#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace diflow {

/// splitmix64 finalizer; the basis for stream derivation and jitter hashing.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Seed for sub-stream `stream` of a master seed. Streams are independent
/// splitmix64 outputs, so per-series noise in the generators never overlaps.
inline std::uint64_t stream_seed(std::uint64_t master, std::uint64_t stream) {
    return mix64(master + 0x9E3779B97F4A7C15ull * (stream + 1));
}

/// Uniform in [0,1) from a 64-bit hash; used for reproducible jitter that is
/// a pure function of (seed, sample, coordinate) rather than of call order.
inline double hash_unit(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    std::uint64_t h = mix64(seed ^ mix64(a + 0x9E3779B97F4A7C15ull * (b + 1)));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

/// Seedable generator with an explicit Box-Muller normal so that sequences
/// are identical across standard library implementations (std::mt19937_64 is
/// fully specified; std::normal_distribution is not).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 2.0 * M_PI * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace diflow
