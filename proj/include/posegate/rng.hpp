#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include "posegate/errors.hpp"

namespace posegate {

/// splitmix64 finalizer (Steele, Lea, Flood). Stateless bit mixer used both
/// as the stream generator core and for deriving per-trial seeds.
constexpr std::uint64_t splitmix64_mix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Published trial-seed derivation: two mixing rounds fold the scenario and
/// repeat indices into the base seed. Alternate implementations reproduce
/// the exact streams by copying this function.
constexpr std::uint64_t mix_seed(std::uint64_t base_seed,
                                 std::uint64_t scenario_index,
                                 std::uint64_t repeat_index) {
    std::uint64_t h = splitmix64_mix(base_seed);
    h = splitmix64_mix(h ^ (0x9E3779B97F4A7C15ULL * (scenario_index + 1)));
    h = splitmix64_mix(h ^ (0xC2B2AE3D27D4EB4FULL * (repeat_index + 1)));
    return h;
}

/// Deterministic, portable random stream (splitmix64 core). Not shared
/// between threads; distinct streams may run concurrently.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal draw via Box-Muller; consumes exactly two uniforms.
    double gaussian() {
        const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    double gaussian(double mean, double sigma) {
        if (sigma < 0.0) {
            throw InvalidParameterError("gaussian sigma must be >= 0");
        }
        return mean + sigma * gaussian();
    }

  private:
    std::uint64_t state_;
};

}  // namespace posegate
