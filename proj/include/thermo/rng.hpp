#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace thermo {

/// Named substreams so that changing one parameter never shifts the draws of
/// another (e.g. a different bath size leaves the sampling times untouched).
enum class StreamKind : std::uint64_t {
    Frequencies = 1,
    Energies = 2,
    Phases = 3,
    SamplingTimes = 4,
    Langevin = 5,
    Synthetic = 6,
};

constexpr std::uint64_t stream_id(StreamKind kind, std::uint64_t bath_index = 0) {
    return bath_index * 16 + static_cast<std::uint64_t>(kind);
}

constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Counter-based generator: draw i of (seed, stream) is a pure function of the
/// triple, so sequences are identical on every platform and compiler. The
/// floating-point conversions below are written out explicitly for the same
/// reason (std::*_distribution is implementation-defined).
class RngStream {
public:
    static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

    RngStream(std::uint64_t seed, std::uint64_t stream)
        : seed_(seed), stream_(stream), key_(splitmix64_mix(seed ^ splitmix64_mix(stream * kGolden + 0x632be59bd9b4e019ULL))) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }
    std::uint64_t position() const { return counter_; }

    std::uint64_t next_u64() { return splitmix64_mix(key_ + (++counter_) * kGolden); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1).
    double uniform_open() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Exponential with the given mean, by inversion.
    double exponential(double mean) { return -mean * std::log1p(-uniform()); }

    /// Standard normal (Box-Muller, second variate cached).
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform_open();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace thermo
