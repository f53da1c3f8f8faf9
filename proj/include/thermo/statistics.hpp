#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "thermo/model.hpp"
#include "thermo/rng.hpp"

namespace thermo {

/// Random-interval sampling: each gap is uniform on (0, 2 tau), so the mean
/// gap is tau and no fixed period can alias with the motion.
struct SamplingPlan {
    double mean_interval = 10.0;
    std::size_t n_samples = 4000;
    double warmup = 0.0;

    void validate() const;
    /// Expected time of the last sample.
    double expected_duration() const { return warmup + mean_interval * static_cast<double>(n_samples); }
};

std::vector<double> make_sampling_times(const SamplingPlan& plan, RngStream& rng);
/// Cumulative sum of the given gaps, offset by warmup.
std::vector<double> sampling_times_from_gaps(std::span<const double> gaps, double warmup = 0.0);

struct HistogramOptions {
    std::size_t n_bins = 40;
    /// Histogram range is [0, range_factor * mean energy].
    double range_factor = 8.0;
};

/// Equal-width bins on [0, e_max]. A bin covers (lo, hi]; zero goes to the
/// first bin and values within a few ulps of an edge are snapped onto it.
struct EnergyHistogram {
    std::vector<double> edges;  // n_bins + 1
    std::vector<std::uint64_t> counts;
    std::size_t total = 0;     // samples offered, including overflow
    std::size_t overflow = 0;  // samples above e_max, never fitted
    bool degenerate = false;   // every sample was exactly zero

    std::size_t n_bins() const { return counts.size(); }
    double e_max() const { return edges.back(); }
    double bin_width() const { return edges.back() / static_cast<double>(counts.size()); }
    double center(std::size_t i) const { return 0.5 * (edges[i] + edges[i + 1]); }
    double overflow_fraction() const { return total == 0 ? 0.0 : static_cast<double>(overflow) / static_cast<double>(total); }
};

/// Throws FitError for empty input or a non-positive range, ConfigError for
/// negative or non-finite energies.
EnergyHistogram build_histogram(std::span<const double> energies, std::size_t n_bins, double e_max);
EnergyHistogram build_histogram(std::span<const double> energies, const HistogramOptions& options = {});

struct TemperatureFit {
    double temperature = 0.0;
    double std_error = 0.0;
    double slope = 0.0;
    double intercept = 0.0;
    std::size_t n_bins_used = 0;
    /// Weighted residual sum of squares of the ln-count fit.
    double goodness = 0.0;
};

/// Weighted least squares of ln N_i against bin centre with weights N_i
/// (Poisson errors sigma_i = sqrt(N_i) on N_i). Empty bins are skipped.
/// T = -1/slope and sigma_T follows from the slope variance 1/S_xx.
/// Throws FitError with fewer than three non-empty bins and NonThermalError
/// when the slope is not negative.
TemperatureFit fit_temperature(const EnergyHistogram& hist);

/// Inverse-variance weighted mean of per-seed fits. Independent of the input
/// order.
TemperatureFit aggregate_seeds(std::span<const TemperatureFit> fits);

/// Histogram with default binning followed by fit_temperature.
TemperatureFit fit_energies(std::span<const double> energies, const HistogramOptions& options = {});

/// Temperature of a bath from its sampled oscillator energies. Requires at
/// least 100 oscillators.
TemperatureFit bath_temperature(const BathRealization& realization, const HistogramOptions& options = {});
/// Per-realization fits combined with aggregate_seeds. Requires at least 100
/// oscillators in total.
TemperatureFit bath_temperature(std::span<const BathRealization> realizations, const HistogramOptions& options = {});

struct SampleMoments {
    double mean = 0.0;
    double variance = 0.0;
    double skewness = 0.0;
};

SampleMoments moments(std::span<const double> x);

}  // namespace thermo
