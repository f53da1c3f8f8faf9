#pragma once

// Closed-form references used to check the microscopic simulations.

#include <span>
#include <vector>

#include "thermo/ks.hpp"
#include "thermo/model.hpp"
#include "thermo/rng.hpp"

namespace thermo {

/// Gamma(t) = sum_n m w_n^2 cos(w_n t).
double memory_kernel(std::span<const double> frequencies, double m, double t);

/// Pi(t) = sum_n m w_n^2 [(q_n(t0) - Q(t0)) cos(w_n (t - t0)) + p_n(t0)/(m w_n) sin(w_n (t - t0))]
/// with Q(t0) = tp.q0.
double fluctuation_force(const BathRealization& bath, double m, const TestParticleSpec& tp, double t, double t0 = 0.0);

struct LangevinParams {
    double gamma = 0.1;
    double temperature = 1.0;
    double mass = 1.0;
    double omega = 1.0;

    void validate() const;
};

/// Ohmic damping gamma = pi m w^2 / (2M) * dN/dw at frequency w, with
/// dN/dw = N pdf(w). Constant in w only for the inverse-square family.
double langevin_gamma(const BathSpec& bath, double test_mass, double omega);

struct LangevinOptions {
    double t_final = 1e5;
    double dt = 0.01;
    /// Energies are recorded every sample_interval after burn_in.
    double sample_interval = 10.0;
    double burn_in = 0.0;
    double q0 = 0.0;
    double p0 = 0.0;
};

struct LangevinResult {
    std::vector<double> energies;
    /// Time average of the energy over every step after burn_in.
    double mean_energy = 0.0;
    std::size_t steps = 0;
};

/// Semi-implicit Euler-Maruyama for
///   dQ = P/M dt,  dP = -(gamma P + M Omega^2 Q) dt + sqrt(2 M gamma T) dW.
/// The momentum is updated first and the position uses the new momentum,
/// which keeps the stationary energy unbiased to O(gamma dt).
LangevinResult langevin_reference(const LangevinParams& params, const LangevinOptions& options, RngStream& rng);

struct DegenerateBathParams {
    double omega_r = 1.0;
    double xi = 0.01;
    double e0 = 1.0;

    void validate() const;
};

/// E0 sin(w_R t) clamped to [0, E0].
double degenerate_energy(const DegenerateBathParams& params, double t);
std::vector<double> degenerate_energy_series(const DegenerateBathParams& params, std::span<const double> times);

/// Normal-mode frequencies of the test particle coupled to the collective
/// coordinate of a zero-bandwidth bath, and the resulting energy exchange.
struct DegenerateExchange {
    double slow_mode = 0.0;
    double fast_mode = 0.0;
    /// Beat frequency fast_mode - slow_mode at which energy flows back and forth.
    double exchange_frequency = 0.0;
    /// Largest fraction of the test particle's energy handed to the bath.
    double transfer_fraction = 0.0;
};

DegenerateExchange degenerate_exchange(double omega, const DegenerateBathParams& params);

/// Bare frequency for which the renormalized test particle is resonant with
/// the bath, so the exchange is complete: Omega = w_R sqrt(1 - xi), xi < 1.
double resonant_test_frequency(const DegenerateBathParams& params);

/// F(E) = (2/pi) arcsin(sqrt(E/E0)).
double arcsine_cdf(double e, double e0);

struct ArcsineCheck {
    KsResult ks;
    /// Samples outside (0, E0), excluded from the test.
    std::size_t rejected = 0;
};

/// KS comparison with the arcsine law. Throws FitError if no sample lies in (0, E0).
ArcsineCheck arcsine_distribution_check(std::span<const double> samples, double e0);

/// Strongest line of a uniformly sampled series (mean removed, Hann window,
/// parabolic peak interpolation) and the strongest local maximum outside its
/// main lobe. Frequencies are angular.
struct SpectralLines {
    double frequency = 0.0;
    double amplitude = 0.0;
    double secondary_frequency = 0.0;
    /// Secondary amplitude over main amplitude.
    double secondary_ratio = 0.0;
};

SpectralLines dominant_line(std::span<const double> series, double dt);

/// Omega sqrt(1 + xi).
double renormalized_frequency(double omega, double xi);

/// Equal-weight mixture of two normalized Boltzmann densities.
double mixture_distribution(double e, double t1, double t2);

/// Solves T exp(-E/T) = [T1 exp(-E/T1) + T2 exp(-E/T2)] / 2 by bisection on
/// [min(T1,T2)/2, 2 max(T1,T2)]. Returns (T1 + T2)/2 for E = 0.
double effective_temperature(double e, double t1, double t2);

}  // namespace thermo
