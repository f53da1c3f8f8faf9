#include "thermo/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "thermo/error.hpp"

namespace thermo {

double memory_kernel(std::span<const double> frequencies, double m, double t) {
    double s = 0.0;
    for (double w : frequencies) s += m * w * w * std::cos(w * t);
    return s;
}

double fluctuation_force(const BathRealization& bath, double m, const TestParticleSpec& tp, double t, double t0) {
    const double tau = t - t0;
    double s = 0.0;
    for (std::size_t i = 0; i < bath.size(); ++i) {
        const double w = bath.frequencies[i];
        s += m * w * w * ((bath.positions[i] - tp.q0) * std::cos(w * tau) + bath.momenta[i] / (m * w) * std::sin(w * tau));
    }
    return s;
}

void LangevinParams::validate() const {
    if (!(gamma > 0.0)) throw ConfigError("langevin gamma must be > 0");
    if (!(temperature >= 0.0)) throw ConfigError("langevin temperature must be >= 0");
    if (!(mass > 0.0)) throw ConfigError("langevin mass must be > 0");
    if (!(omega > 0.0)) throw ConfigError("langevin omega must be > 0");
}

double langevin_gamma(const BathSpec& bath, double test_mass, double omega) {
    const double dn_dw = static_cast<double>(bath.n_oscillators) * bath.dos.pdf(omega);
    return std::numbers::pi * bath.mass * omega * omega / (2.0 * test_mass) * dn_dw;
}

LangevinResult langevin_reference(const LangevinParams& params, const LangevinOptions& options, RngStream& rng) {
    params.validate();
    if (!(options.dt > 0.0) || !(options.t_final > 0.0)) throw ConfigError("langevin dt and t_final must be > 0");
    if (!(options.sample_interval > 0.0)) throw ConfigError("langevin sample_interval must be > 0");
    const double dt = options.dt;
    const double m = params.mass;
    const double k = m * params.omega * params.omega;
    const double noise = std::sqrt(2.0 * m * params.gamma * params.temperature * dt);
    const auto n_steps = static_cast<std::size_t>(std::llround(options.t_final / dt));
    const auto burn = static_cast<std::size_t>(std::llround(options.burn_in / dt));
    const auto every = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(options.sample_interval / dt)));

    LangevinResult out;
    out.energies.reserve(n_steps > burn ? (n_steps - burn) / every + 1 : 0);
    double q = options.q0, p = options.p0;
    double acc = 0.0;
    std::size_t n_acc = 0;
    for (std::size_t s = 1; s <= n_steps; ++s) {
        p += -(params.gamma * p + k * q) * dt + noise * rng.normal();
        q += p / m * dt;
        if (s > burn) {
            const double e = 0.5 * p * p / m + 0.5 * k * q * q;
            acc += e;
            ++n_acc;
            if ((s - burn) % every == 0) out.energies.push_back(e);
        }
        if ((s & 1023) == 0 && !std::isfinite(q + p)) {
            throw NumericalError("langevin integration blew up at t=" + std::to_string(static_cast<double>(s) * dt));
        }
    }
    if (!std::isfinite(q + p)) throw NumericalError("langevin integration blew up");
    out.steps = n_steps;
    out.mean_energy = n_acc > 0 ? acc / static_cast<double>(n_acc) : 0.0;
    return out;
}

void DegenerateBathParams::validate() const {
    if (!(xi > 0.0)) throw ConfigError("xi must be > 0");
    if (!(omega_r > 0.0)) throw ConfigError("omega_r must be > 0");
    if (!(e0 >= 0.0)) throw ConfigError("e0 must be >= 0");
}

double degenerate_energy(const DegenerateBathParams& params, double t) {
    return std::clamp(params.e0 * std::sin(params.omega_r * t), 0.0, params.e0);
}

std::vector<double> degenerate_energy_series(const DegenerateBathParams& params, std::span<const double> times) {
    std::vector<double> e(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) e[i] = degenerate_energy(params, times[i]);
    return e;
}

DegenerateExchange degenerate_exchange(double omega, const DegenerateBathParams& params) {
    params.validate();
    // Mass-weighted 2x2 stiffness of (Q, collective bath coordinate).
    const double wr2 = params.omega_r * params.omega_r;
    const double a = omega * omega + params.xi * wr2;
    const double d = wr2;
    const double b = wr2 * std::sqrt(params.xi);
    const double mean = 0.5 * (a + d);
    const double half = std::sqrt(0.25 * (a - d) * (a - d) + b * b);
    DegenerateExchange ex;
    ex.slow_mode = std::sqrt(std::max(mean - half, 0.0));
    ex.fast_mode = std::sqrt(mean + half);
    ex.exchange_frequency = ex.fast_mode - ex.slow_mode;
    ex.transfer_fraction = b * b / (half * half);
    return ex;
}

double resonant_test_frequency(const DegenerateBathParams& params) {
    params.validate();
    if (!(params.xi < 1.0)) throw ConfigError("complete exchange needs xi < 1");
    return params.omega_r * std::sqrt(1.0 - params.xi);
}

double arcsine_cdf(double e, double e0) {
    if (e <= 0.0) return 0.0;
    if (e >= e0) return 1.0;
    return 2.0 / std::numbers::pi * std::asin(std::sqrt(e / e0));
}

ArcsineCheck arcsine_distribution_check(std::span<const double> samples, double e0) {
    if (!(e0 > 0.0)) throw ConfigError("arcsine check needs e0 > 0");
    std::vector<double> inside;
    inside.reserve(samples.size());
    ArcsineCheck out;
    for (double e : samples) {
        if (e > 0.0 && e < e0) {
            inside.push_back(e);
        } else {
            ++out.rejected;
        }
    }
    if (inside.empty()) {
        throw FitError("arcsine check: all " + std::to_string(samples.size()) + " samples lie outside (0, E0)");
    }
    out.ks = ks_one_sample(inside, [e0](double e) { return arcsine_cdf(e, e0); });
    return out;
}

SpectralLines dominant_line(std::span<const double> series, double dt) {
    const std::size_t n = series.size();
    if (n < 8) throw ConfigError("spectral analysis needs at least 8 samples");
    if (!(dt > 0.0)) throw ConfigError("sample spacing must be > 0");
    double mean = 0.0;
    for (double x : series) mean += x;
    mean /= static_cast<double>(n);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n - 1));
        y[i] = (series[i] - mean) * w;
    }
    // Plain DFT; series here are a few thousand points.
    const std::size_t half = n / 2;
    std::vector<double> mag(half + 1);
    for (std::size_t k = 0; k <= half; ++k) {
        const double step = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
        const double cs = std::cos(step), sn = std::sin(step);
        double c = 1.0, s = 0.0, re = 0.0, im = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            re += y[i] * c;
            im -= y[i] * s;
            const double c2 = c * cs - s * sn;
            s = s * cs + c * sn;
            c = c2;
            if ((i & 255) == 255) {
                // Re-anchor the rotation to stop drift.
                const double a = step * static_cast<double>(i + 1);
                c = std::cos(a);
                s = std::sin(a);
            }
        }
        mag[k] = std::hypot(re, im);
    }
    std::size_t peak = 1;
    for (std::size_t k = 1; k <= half; ++k) {
        if (mag[k] > mag[peak]) peak = k;
    }
    double offset = 0.0;
    if (peak > 0 && peak < half) {
        const double a = mag[peak - 1], b = mag[peak], c = mag[peak + 1];
        const double den = a - 2.0 * b + c;
        if (den != 0.0) offset = 0.5 * (a - c) / den;
    }
    const double df = 2.0 * std::numbers::pi / (static_cast<double>(n) * dt);
    SpectralLines out;
    out.frequency = (static_cast<double>(peak) + offset) * df;
    out.amplitude = mag[peak];
    std::size_t lo = peak, hi = peak;
    while (lo > 1 && mag[lo - 1] < mag[lo]) --lo;
    while (hi < half && mag[hi + 1] < mag[hi]) ++hi;
    double best = 0.0;
    for (std::size_t k = 1; k <= half; ++k) {
        if (k >= lo && k <= hi) continue;
        const bool local_max = (k == 1 || mag[k] >= mag[k - 1]) && (k == half || mag[k] >= mag[k + 1]);
        if (local_max && mag[k] > best) {
            best = mag[k];
            out.secondary_frequency = static_cast<double>(k) * df;
        }
    }
    out.secondary_ratio = out.amplitude > 0.0 ? best / out.amplitude : 0.0;
    return out;
}

double renormalized_frequency(double omega, double xi) {
    if (!(xi >= 0.0)) throw ConfigError("xi must be >= 0");
    return omega * std::sqrt(1.0 + xi);
}

double mixture_distribution(double e, double t1, double t2) {
    if (!(t1 > 0.0) || !(t2 > 0.0)) throw ConfigError("mixture temperatures must be > 0");
    if (e < 0.0) return 0.0;
    return 0.5 * (std::exp(-e / t1) / t1 + std::exp(-e / t2) / t2);
}

double effective_temperature(double e, double t1, double t2) {
    if (!(t1 > 0.0) || !(t2 > 0.0)) throw ConfigError("temperatures must be > 0");
    if (!(e >= 0.0)) throw ConfigError("energy must be >= 0");
    if (e == 0.0) return 0.5 * (t1 + t2);
    if (t1 == t2) return t1;
    const double rhs = 0.5 * (t1 * std::exp(-e / t1) + t2 * std::exp(-e / t2));
    auto f = [&](double t) { return t * std::exp(-e / t) - rhs; };
    double lo = 0.5 * std::min(t1, t2);
    double hi = 2.0 * std::max(t1, t2);
    double flo = f(lo);
    if (flo > 0.0 || f(hi) < 0.0) {
        throw NumericalError("effective temperature: no root in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    // T exp(-E/T) is increasing in T, so the root is unique.
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace thermo
