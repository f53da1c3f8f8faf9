#include "thermo/bath.hpp"

#include <cmath>
#include <numbers>

#include "thermo/error.hpp"

namespace thermo {

std::vector<double> sample_frequencies(const BathSpec& spec, RngStream& rng) {
    spec.validate();
    std::vector<double> w(spec.n_oscillators);
    for (auto& x : w) x = spec.dos.quantile(rng.uniform());
    return w;
}

std::vector<double> sample_energies(const BathSpec& spec, RngStream& rng) {
    spec.validate();
    std::vector<double> e(spec.n_oscillators);
    for (auto& x : e) x = rng.exponential(spec.temperature);
    return e;
}

BathRealization make_realization(double mass, std::vector<double> frequencies, std::vector<double> energies,
                                 std::span<const double> phases, std::uint64_t seed) {
    const std::size_t n = frequencies.size();
    if (energies.size() != n || phases.size() != n) {
        throw DimensionError("frequencies, energies and phases must have equal length");
    }
    BathRealization r;
    r.seed = seed;
    r.positions.resize(n);
    r.momenta.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double w = frequencies[i];
        const double e = energies[i];
        if (!(w > 0.0)) throw ConfigError("bath frequencies must be > 0");
        if (!(e >= 0.0)) throw ConfigError("bath energies must be >= 0");
        r.positions[i] = std::sqrt(2.0 * e / (mass * w * w)) * std::cos(phases[i]);
        r.momenta[i] = std::sqrt(2.0 * mass * e) * std::sin(phases[i]);
    }
    r.frequencies = std::move(frequencies);
    r.energies = std::move(energies);
    return r;
}

BathRealization realize_bath(const BathSpec& spec, std::uint64_t seed, std::uint64_t bath_index) {
    spec.validate();
    RngStream freq_rng(seed, stream_id(StreamKind::Frequencies, bath_index));
    RngStream energy_rng(seed, stream_id(StreamKind::Energies, bath_index));
    RngStream phase_rng(seed, stream_id(StreamKind::Phases, bath_index));
    auto w = sample_frequencies(spec, freq_rng);
    auto e = sample_energies(spec, energy_rng);
    std::vector<double> phi(spec.n_oscillators);
    for (auto& x : phi) x = 2.0 * std::numbers::pi * phase_rng.uniform();
    return make_realization(spec.mass, std::move(w), std::move(e), phi, seed);
}

PhaseSums symmetrize_check(const BathRealization& realization) {
    PhaseSums s;
    for (double q : realization.positions) s.sum_q += q;
    for (double p : realization.momenta) s.sum_p += p;
    return s;
}

}  // namespace thermo
