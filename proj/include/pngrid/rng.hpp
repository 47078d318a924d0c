#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>

namespace pngrid {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Seeded random stream. Distribution transforms are hand-rolled on top of
// mt19937_64 so draw sequences are identical across standard libraries;
// mission replays and golden files rely on that.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    static Rng for_robot(std::uint64_t mission_seed, int robot_id) {
        return Rng(splitmix64(mission_seed) ^ splitmix64(0xA5A5A5A5ull + static_cast<std::uint64_t>(robot_id)));
    }

    // Uniform in [0, 1).
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        return engine_() % n;
    }

    bool chance(double p) { return uniform01() < p; }

    // Standard normal via Box-Muller; consumes exactly two uniforms per call.
    double normal() {
        double u1 = 1.0 - uniform01();
        double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    double normal(double mean, double sigma) { return mean + sigma * normal(); }

  private:
    std::mt19937_64 engine_;
};

}  // namespace pngrid
