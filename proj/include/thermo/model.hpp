#pragma once

// Domain types for a harmonic test particle coupled to finite baths of
// harmonic oscillators. Everything is dimensionless with k_B = 1.

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace thermo {

struct TestParticleSpec {
    double mass = 1.0;   // M
    double omega = 1.0;  // bare angular frequency
    double q0 = 0.0;
    double p0 = 0.0;

    void validate() const;
};

enum class DosFamily { Uniform, InverseSquare, Square };

std::string_view to_string(DosFamily family);
DosFamily dos_family_from_string(std::string_view name);

/// Normalized density of states dN/dw supported on [omega_ir, omega_uv].
struct DensityOfStates {
    DosFamily family = DosFamily::Uniform;
    double omega_ir = 0.2;
    double omega_uv = 1.0;

    void validate() const;
    bool degenerate() const { return omega_ir == omega_uv; }

    /// Normalized density; zero outside the support. Undefined for a
    /// zero-bandwidth bath.
    double pdf(double w) const;
    double cdf(double w) const;
    /// Inverse CDF for u in [0, 1]; always returns a value inside the support.
    double quantile(double u) const;
    double mean() const;
    /// <w^2> under the density; used for coupling-strength estimates.
    double mean_square() const;
};

struct BathSpec {
    std::size_t n_oscillators = 400;
    double mass = 0.01;  // per-oscillator m
    double temperature = 5.0;
    DensityOfStates dos;

    void validate() const;
    double xi(double test_mass) const { return static_cast<double>(n_oscillators) * mass / test_mass; }
};

struct BathRealization {
    std::vector<double> frequencies;
    std::vector<double> energies;
    std::vector<double> positions;  // q_n(t0)
    std::vector<double> momenta;    // p_n(t0)
    std::uint64_t seed = 0;

    std::size_t size() const { return frequencies.size(); }
    /// Oscillator energies recomputed from the current positions/momenta.
    std::vector<double> phase_space_energies(double mass) const;
};

/// Full phase vector at one instant. Bath coordinates of several baths are
/// concatenated in bath order (bath 1 first).
struct SystemState {
    double time = 0.0;
    double test_q = 0.0;
    double test_p = 0.0;
    std::vector<double> bath_q;
    std::vector<double> bath_p;

    std::size_t n_bath() const { return bath_q.size(); }
    std::size_t dimension() const { return 2 * bath_q.size() + 2; }

    /// Interleaved layout (Q, P, q_1, p_1, ..., q_N, p_N).
    std::vector<double> to_vector() const;
    static SystemState from_vector(std::span<const double> v, double time = 0.0);
};

/// Read-only description of one bath as seen by the energy functions.
struct BathView {
    double mass = 1.0;
    std::span<const double> frequencies;
    bool coupled = true;
};

/// Which quadratic form is histogrammed as the "test particle energy".
enum class EnergyMeasure {
    Bare,          // P^2/2M + M Omega^2 Q^2 / 2
    Renormalized,  // adds sum_n m w_n^2 Q^2 / 2 from the coupled baths
};

std::string_view to_string(EnergyMeasure measure);
EnergyMeasure energy_measure_from_string(std::string_view name);

inline double oscillator_energy(double q, double p, double mass, double omega) {
    return 0.5 * p * p / mass + 0.5 * mass * omega * omega * q * q;
}

/// Bare oscillator energy of the test particle.
double test_particle_energy(const SystemState& state, const TestParticleSpec& tp);

/// Initial state with the test particle at (tp.q0, tp.p0) and the given baths
/// appended in order.
SystemState initial_state(const TestParticleSpec& tp, std::span<const BathRealization> baths);

/// Full Hamiltonian including the (q_n - Q)^2 interaction of every coupled bath.
/// Throws DimensionError when the bath sizes do not add up to the state.
double total_energy(const SystemState& state, const TestParticleSpec& tp, std::span<const BathView> baths);

}  // namespace thermo
