#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "thermo/eigen_propagator.hpp"
#include "thermo/model.hpp"
#include "thermo/statistics.hpp"

namespace thermo {

enum class PropagatorKind { Eigen, SwitchedRK4 };

std::string_view to_string(PropagatorKind kind);
PropagatorKind propagator_kind_from_string(std::string_view name);

/// A grid of test-particle frequencies run against one or two baths for a set
/// of seeds.
struct SweepSpec {
    std::vector<double> omega_grid;
    /// Omega is taken from the grid; q0/p0 are used unless initial_energy > 0.
    TestParticleSpec tp_template;
    /// Zero baths gives an isolated oscillator; two baths need SwitchedRK4.
    std::vector<BathSpec> baths;
    std::vector<std::uint64_t> seeds;
    SamplingPlan sampling;
    PropagatorKind propagator = PropagatorKind::Eigen;
    /// E_tp(0), placed entirely in momentum: P0 = sqrt(2 M E0), Q0 = 0.
    double initial_energy = 0.0;
    EnergyMeasure measure = EnergyMeasure::Bare;
    HistogramOptions histogram;
    Diagonalization diagonalization = Diagonalization::NormalMode;
    /// Switching period in integrator steps (two-bath runs).
    std::size_t delta_t_steps = 1;
    /// RK4 step; 0 picks 50 steps per period of the fastest oscillator.
    double step_size = 0.0;
    /// Two-bath sweeps also run each bath alone.
    bool compare_single_baths = true;
    /// Keep the pooled energy samples of every grid point.
    bool keep_energies = false;
    /// Realization substream of the first bath (bath i uses first_bath_index + i).
    std::uint64_t first_bath_index = 0;
    /// Worker threads; 0 uses the hardware concurrency.
    std::size_t threads = 0;

    void validate() const;
    TestParticleSpec test_particle(double omega) const;
};

/// One (Omega, seed) run.
struct SeedRun {
    std::uint64_t seed = 0;
    std::vector<double> energies;
    bool fit_ok = false;
    std::string fit_error;
    TemperatureFit fit;
    double overflow_fraction = 0.0;
    /// Per bath; temperature is NaN when the bath fit failed or was not measured.
    std::vector<TemperatureFit> bath_initial, bath_final;
    double step_size = 0.0;
    double max_snap = 0.0;
    bool used_rk4_fallback = false;
};

struct CurvePoint {
    double omega = 0.0;
    /// Seed aggregate; NaN temperature when no seed produced a fit.
    TemperatureFit fit;
    bool ok = false;
    std::string error;
    std::size_t seeds_ok = 0;
    std::size_t seeds_failed = 0;
    double overflow_fraction = 0.0;
    double mean_energy = 0.0;
    double skewness = 0.0;
    std::vector<TemperatureFit> bath_initial, bath_final;
    double step_size = 0.0;
    double max_snap = 0.0;
    std::vector<double> energies;  // only with keep_energies

    /// Means over baths of the aggregated bath fits (NaN when unavailable).
    double bath_temperature_initial() const;
    double bath_temperature_final() const;
};

struct ThermalizationCurve {
    std::string label;
    std::vector<CurvePoint> points;
};

/// Runs one grid point for one seed. Propagator failures are raised with the
/// (Omega, seed) context; fit failures are recorded in the result.
SeedRun run_point_seed(double omega, const SweepSpec& spec, std::uint64_t seed);

/// Per-seed temperature fit; raises with (Omega, seed) context on any failure.
TemperatureFit run_single_bath_point(double omega, const SweepSpec& spec, std::uint64_t seed);

/// Aggregates per-seed runs into a curve point.
CurvePoint aggregate_point(double omega, std::span<const SeedRun> runs, const HistogramOptions& histogram,
                           bool keep_energies);

/// All grid points and seeds, run in parallel and aggregated deterministically.
/// Failures are recorded per grid point and the sweep continues.
ThermalizationCurve run_sweep(const SweepSpec& spec);

struct TwoBathSweep {
    ThermalizationCurve switched;
    ThermalizationCurve bath1_alone;
    ThermalizationCurve bath2_alone;
    /// Every bath's final fit within 2 sigma of its initial fit at every point.
    bool baths_preserved = false;
};

TwoBathSweep run_two_bath_sweep(const SweepSpec& spec);

struct EnergyScanPoint {
    double omega = 0.0;
    double e0 = 0.0;
    CurvePoint point;
    bool histogram_ok = false;
    EnergyHistogram histogram;  // pooled over seeds
};

/// Every (Omega, E0) combination of the base spec.
std::vector<EnergyScanPoint> run_initial_energy_scan(std::span<const double> omegas, std::span<const double> e0s,
                                                     const SweepSpec& base);

/// Test particle against a zero-bandwidth bath whose oscillators come in
/// pairs with opposite phases, so sum q_n = sum p_n = 0 and only the
/// collective bath coordinate exchanges energy with the test particle.
struct DegenerateSimSpec {
    std::size_t n_oscillators = 100;  // even
    double mass_ratio = 1e-5;         // m/M; xi = 1e-3 keeps the fast ripple small
    double test_mass = 1.0;
    double omega_r = 1.0;
    /// Initial test-particle energy, all in momentum.
    double e0 = 1.0;
    double bath_temperature = 1.0;
    /// Bare test frequency; 0 selects the resonant value w_R sqrt(1 - xi).
    double omega = 0.0;
    EnergyMeasure measure = EnergyMeasure::Renormalized;
    Diagonalization diagonalization = Diagonalization::NormalMode;
    std::uint64_t seed = 1;
};

struct DegenerateRun {
    double omega = 0.0;
    double xi = 0.0;
    std::vector<double> energies;
    double sum_q = 0.0, sum_p = 0.0;
    bool used_rk4_fallback = false;
};

DegenerateRun simulate_degenerate_bath(const DegenerateSimSpec& spec, std::span<const double> times);

/// |final - initial| <= n_sigma * sqrt(sigma_i^2 + sigma_f^2).
bool bath_preserved(const TemperatureFit& initial, const TemperatureFit& final, double n_sigma = 2.0);

/// Index of the maximum of the three-point moving average of T_tp over the
/// points with a fit. Throws FitError when no point has one.
std::size_t peak_index(const ThermalizationCurve& curve);
double peak_omega(const ThermalizationCurve& curve);

/// Runs fn(i) for i in [0, n) on up to `threads` workers (0: hardware
/// concurrency). Exceptions from fn are rethrown after all workers finish.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

/// Uniformly or logarithmically spaced grid including both end points.
std::vector<double> linear_grid(double lo, double hi, std::size_t n);
std::vector<double> log_grid(double lo, double hi, std::size_t n);

}  // namespace thermo
