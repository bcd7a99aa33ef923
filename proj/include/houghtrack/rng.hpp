#pragma once

#include <cmath>
#include <cstdint>

namespace houghtrack {

/// splitmix64: 64-bit state advanced by the golden-ratio increment
/// 0x9E3779B97F4A7C15, finalized with the standard 30/27/31 xor-shift mix.
/// Chosen for portability: sequences are reproducible from the documented
/// constants alone.
class SplitMix64 {
public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1), 53-bit resolution.
    double next_double() { return (next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    /// Box-Muller; draws exactly two uniforms per call.
    double gaussian(double mean = 0.0, double stddev = 1.0) {
        double u1 = next_double();
        const double u2 = next_double();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        const double mag = std::sqrt(-2.0 * std::log(u1));
        return mean + stddev * mag * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    /// Independent stream for a substream index (per-frame splitting).
    static SplitMix64 derive(uint64_t seed, uint64_t index) {
        SplitMix64 mixer(seed ^ (0xD1B54A32D192ED03ull * (index + 1)));
        return SplitMix64(mixer.next_u64());
    }

private:
    uint64_t state_;
};

}  // namespace houghtrack
