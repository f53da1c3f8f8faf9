#include "thermo/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "thermo/error.hpp"

namespace thermo {

void SamplingPlan::validate() const {
    if (!(mean_interval > 0.0) || !std::isfinite(mean_interval)) throw ConfigError("mean_interval must be > 0");
    if (n_samples < 100) throw ConfigError("n_samples must be >= 100");
    if (!(warmup >= 0.0) || !std::isfinite(warmup)) throw ConfigError("warmup must be >= 0");
}

std::vector<double> make_sampling_times(const SamplingPlan& plan, RngStream& rng) {
    plan.validate();
    std::vector<double> gaps(plan.n_samples);
    for (auto& g : gaps) g = 2.0 * plan.mean_interval * rng.uniform_open();
    return sampling_times_from_gaps(gaps, plan.warmup);
}

std::vector<double> sampling_times_from_gaps(std::span<const double> gaps, double warmup) {
    std::vector<double> times(gaps.size());
    double t = warmup;
    for (std::size_t i = 0; i < gaps.size(); ++i) {
        t += gaps[i];
        times[i] = t;
    }
    return times;
}

EnergyHistogram build_histogram(std::span<const double> energies, std::size_t n_bins, double e_max) {
    if (energies.empty()) throw FitError("cannot histogram an empty set of energies");
    if (n_bins < 1) throw ConfigError("histogram needs at least one bin");
    if (!(e_max > 0.0) || !std::isfinite(e_max)) throw FitError("histogram range must be > 0 (all energies zero?)");

    EnergyHistogram h;
    h.counts.assign(n_bins, 0);
    h.edges.resize(n_bins + 1);
    const double nb = static_cast<double>(n_bins);
    for (std::size_t i = 0; i <= n_bins; ++i) h.edges[i] = e_max * static_cast<double>(i) / nb;
    h.total = energies.size();

    bool all_zero = true;
    for (double e : energies) {
        if (!(e >= 0.0) || !std::isfinite(e)) throw ConfigError("energies must be finite and >= 0");
        if (e != 0.0) all_zero = false;
        double x = e * nb / e_max;
        const double r = std::round(x);
        if (std::abs(x - r) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(r, 1.0)) x = r;
        if (x > nb) {
            ++h.overflow;
            continue;
        }
        const auto idx = x <= 0.0 ? std::size_t{0} : static_cast<std::size_t>(std::ceil(x)) - 1;
        ++h.counts[std::min(idx, n_bins - 1)];
    }
    h.degenerate = all_zero;
    return h;
}

EnergyHistogram build_histogram(std::span<const double> energies, const HistogramOptions& options) {
    if (energies.empty()) throw FitError("cannot histogram an empty set of energies");
    const double mean = std::accumulate(energies.begin(), energies.end(), 0.0) / static_cast<double>(energies.size());
    if (!(mean > 0.0)) {
        EnergyHistogram h = build_histogram(energies, options.n_bins, 1.0);
        return h;
    }
    return build_histogram(energies, options.n_bins, options.range_factor * mean);
}

TemperatureFit fit_temperature(const EnergyHistogram& hist) {
    if (hist.degenerate) throw FitError("degenerate histogram: every energy sample is zero");
    double sw = 0.0, swx = 0.0, swy = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < hist.n_bins(); ++i) {
        if (hist.counts[i] == 0) continue;
        const double w = static_cast<double>(hist.counts[i]);
        sw += w;
        swx += w * hist.center(i);
        swy += w * std::log(w);
        ++used;
    }
    if (used < 3) {
        throw FitError("temperature fit needs at least 3 non-empty bins, got " + std::to_string(used));
    }
    const double xm = swx / sw;
    const double ym = swy / sw;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < hist.n_bins(); ++i) {
        if (hist.counts[i] == 0) continue;
        const double w = static_cast<double>(hist.counts[i]);
        const double dx = hist.center(i) - xm;
        sxx += w * dx * dx;
        sxy += w * dx * (std::log(w) - ym);
    }
    TemperatureFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = ym - fit.slope * xm;
    fit.n_bins_used = used;
    for (std::size_t i = 0; i < hist.n_bins(); ++i) {
        if (hist.counts[i] == 0) continue;
        const double w = static_cast<double>(hist.counts[i]);
        const double r = std::log(w) - (fit.intercept + fit.slope * hist.center(i));
        fit.goodness += w * r * r;
    }
    if (!(fit.slope < 0.0)) throw NonThermalError(fit.slope);
    const double slope_err = std::sqrt(1.0 / sxx);
    fit.temperature = -1.0 / fit.slope;
    fit.std_error = slope_err / (fit.slope * fit.slope);
    return fit;
}

TemperatureFit aggregate_seeds(std::span<const TemperatureFit> fits) {
    if (fits.empty()) throw FitError("aggregate_seeds needs at least one fit");
    if (fits.size() == 1) return fits.front();
    std::vector<TemperatureFit> sorted(fits.begin(), fits.end());
    for (const auto& f : sorted) {
        if (!(f.std_error > 0.0)) throw FitError("cannot inverse-variance weight a fit with zero uncertainty");
    }
    std::sort(sorted.begin(), sorted.end(), [](const TemperatureFit& a, const TemperatureFit& b) {
        return a.temperature != b.temperature ? a.temperature < b.temperature : a.std_error < b.std_error;
    });
    double sw = 0.0, swt = 0.0;
    TemperatureFit out;
    for (const auto& f : sorted) {
        const double w = 1.0 / (f.std_error * f.std_error);
        sw += w;
        swt += w * f.temperature;
        out.n_bins_used += f.n_bins_used;
        out.goodness += f.goodness;
    }
    out.temperature = swt / sw;
    out.std_error = 1.0 / std::sqrt(sw);
    out.slope = -1.0 / out.temperature;
    out.intercept = std::numeric_limits<double>::quiet_NaN();
    return out;
}

TemperatureFit fit_energies(std::span<const double> energies, const HistogramOptions& options) {
    return fit_temperature(build_histogram(energies, options));
}

TemperatureFit bath_temperature(const BathRealization& realization, const HistogramOptions& options) {
    if (realization.size() < 100) {
        throw FitError("bath temperature needs at least 100 oscillators, got " + std::to_string(realization.size()));
    }
    return fit_energies(realization.energies, options);
}

TemperatureFit bath_temperature(std::span<const BathRealization> realizations, const HistogramOptions& options) {
    std::size_t total = 0;
    for (const auto& r : realizations) total += r.size();
    if (total < 100) throw FitError("bath temperature needs at least 100 oscillators, got " + std::to_string(total));
    std::vector<TemperatureFit> fits;
    fits.reserve(realizations.size());
    for (const auto& r : realizations) fits.push_back(bath_temperature(r, options));
    return aggregate_seeds(fits);
}

SampleMoments moments(std::span<const double> x) {
    SampleMoments m;
    if (x.empty()) return m;
    const double n = static_cast<double>(x.size());
    m.mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double m2 = 0.0, m3 = 0.0;
    for (double v : x) {
        const double d = v - m.mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    m2 /= n;
    m3 /= n;
    m.variance = m2;
    m.skewness = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
    return m;
}

}  // namespace thermo
