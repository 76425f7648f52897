#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace curveclust {

/// One step of SplitMix64.
inline std::uint64_t splitmix64(std::uint64_t& state)
{
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Seed of substream `stream` under master seed `seed`. Substreams are
/// independent of each other, so e.g. adding a curve to a generator does not
/// change the samples of earlier curves.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream)
{
    std::uint64_t state = seed;
    const std::uint64_t a = splitmix64(state);
    state = a ^ (stream * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL);
    return splitmix64(state);
}

/// MT19937-64 seeded through SplitMix64, with the uniform and normal
/// conversions done here rather than by <random> distributions, whose output
/// is implementation defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) : engine_(derive_seed(seed, stream)) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n).
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }

    /// Standard normal by Box-Muller; the second variate is kept for the next call.
    double normal()
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace curveclust
