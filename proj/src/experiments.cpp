#include "thermo/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <thread>

#include "thermo/bath.hpp"
#include "thermo/coupling.hpp"
#include "thermo/error.hpp"
#include "thermo/switched.hpp"

namespace thermo {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

TemperatureFit missing_fit() {
    TemperatureFit f;
    f.temperature = kNaN;
    f.std_error = kNaN;
    f.slope = kNaN;
    f.intercept = kNaN;
    return f;
}

[[noreturn]] void rethrow_with_context(const std::string& context) {
    try {
        throw;
    } catch (const ConfigError& e) {
        throw ConfigError(context + e.what());
    } catch (const NumericalError& e) {
        throw NumericalError(context + e.what());
    } catch (const FitError& e) {
        throw FitError(context + e.what());
    }
}

std::string point_context(double omega, std::uint64_t seed) {
    return "Omega=" + std::to_string(omega) + " seed=" + std::to_string(seed) + ": ";
}

TemperatureFit try_fit(std::span<const double> energies, const HistogramOptions& options) {
    try {
        return fit_energies(energies, options);
    } catch (const Error&) {
        return missing_fit();
    }
}

double fastest_frequency(const CouplingMatrix& a, double fastest_bath) {
    return std::max(fastest_bath, std::sqrt(-a.test_self_term() / a.test_mass));
}

}  // namespace

std::string_view to_string(PropagatorKind kind) {
    return kind == PropagatorKind::Eigen ? "eigen" : "switched_rk4";
}

PropagatorKind propagator_kind_from_string(std::string_view name) {
    if (name == "eigen") return PropagatorKind::Eigen;
    if (name == "switched_rk4") return PropagatorKind::SwitchedRK4;
    throw ConfigError("unknown propagator '" + std::string(name) + "' (expected eigen or switched_rk4)");
}

void SweepSpec::validate() const {
    if (omega_grid.empty()) throw ConfigError("omega_grid must not be empty");
    for (std::size_t i = 0; i < omega_grid.size(); ++i) {
        if (!(omega_grid[i] > 0.0) || !std::isfinite(omega_grid[i])) throw ConfigError("omega_grid values must be > 0");
        if (i > 0 && !(omega_grid[i] > omega_grid[i - 1])) throw ConfigError("omega_grid must be strictly increasing");
    }
    if (seeds.empty()) throw ConfigError("seeds must not be empty");
    if (baths.size() > 2) throw ConfigError("at most two baths are supported");
    if (baths.size() == 2 && propagator != PropagatorKind::SwitchedRK4) {
        throw ConfigError("two baths require the switched_rk4 propagator");
    }
    for (const auto& b : baths) b.validate();
    tp_template.validate();
    sampling.validate();
    if (!(initial_energy >= 0.0) || !std::isfinite(initial_energy)) throw ConfigError("initial_energy must be >= 0");
    if (histogram.n_bins < 5) throw ConfigError("histogram n_bins must be >= 5");
    if (!(histogram.range_factor > 0.0)) throw ConfigError("histogram range_factor must be > 0");
    if (delta_t_steps < 1) throw ConfigError("delta_t_steps must be >= 1");
    if (!(step_size >= 0.0) || !std::isfinite(step_size)) throw ConfigError("step_size must be >= 0");
}

TestParticleSpec SweepSpec::test_particle(double omega) const {
    TestParticleSpec tp = tp_template;
    tp.omega = omega;
    if (initial_energy > 0.0) {
        tp.q0 = 0.0;
        tp.p0 = std::sqrt(2.0 * tp.mass * initial_energy);
    }
    return tp;
}

double CurvePoint::bath_temperature_initial() const {
    double s = 0.0;
    std::size_t n = 0;
    for (const auto& f : bath_initial) {
        if (std::isfinite(f.temperature)) {
            s += f.temperature;
            ++n;
        }
    }
    return n ? s / static_cast<double>(n) : kNaN;
}

double CurvePoint::bath_temperature_final() const {
    double s = 0.0;
    std::size_t n = 0;
    for (const auto& f : bath_final) {
        if (std::isfinite(f.temperature)) {
            s += f.temperature;
            ++n;
        }
    }
    return n ? s / static_cast<double>(n) : kNaN;
}

SeedRun run_point_seed(double omega, const SweepSpec& spec, std::uint64_t seed) {
    SeedRun out;
    out.seed = seed;
    try {
        spec.validate();
        const TestParticleSpec tp = spec.test_particle(omega);

        std::vector<BathRealization> baths;
        std::vector<BathView> views;
        double fastest_bath = 0.0;
        for (std::size_t i = 0; i < spec.baths.size(); ++i) {
            baths.push_back(realize_bath(spec.baths[i], seed, spec.first_bath_index + i));
            fastest_bath = std::max(fastest_bath, spec.baths[i].dos.omega_uv);
        }
        for (std::size_t i = 0; i < baths.size(); ++i) {
            views.push_back({spec.baths[i].mass, baths[i].frequencies, true});
            out.bath_initial.push_back(try_fit(baths[i].energies, spec.histogram));
        }
        out.bath_final.assign(baths.size(), missing_fit());

        RngStream time_rng(seed, stream_id(StreamKind::SamplingTimes));
        const std::vector<double> times = make_sampling_times(spec.sampling, time_rng);
        const SystemState v0 = initial_state(tp, baths);
        const double bare_k = tp.mass * tp.omega * tp.omega;
        out.energies.resize(times.size());

        auto run_rk4 = [&](const CouplingMatrix& a1, const CouplingMatrix& a2) {
            const double fastest = std::max(fastest_frequency(a1, fastest_bath), fastest_frequency(a2, fastest_bath));
            const double dt = spec.step_size > 0.0 ? spec.step_size : default_step_size(fastest);
            SwitchSchedule schedule{spec.delta_t_steps, dt, 0};
            const SwitchedRun run = run_switched(a1, a2, v0, schedule, times.back(), times);
            const double extra =
                spec.measure == EnergyMeasure::Renormalized ? 0.5 * (a1.coupled_stiffness() + a2.coupled_stiffness()) : 0.0;
            for (std::size_t i = 0; i < times.size(); ++i) {
                const auto& s = run.samples[i];
                out.energies[i] = 0.5 * s.p * s.p / tp.mass + 0.5 * (bare_k + extra) * s.q * s.q;
            }
            std::size_t offset = 0;
            for (std::size_t b = 0; b < baths.size(); ++b) {
                std::vector<double> e(baths[b].size());
                for (std::size_t n = 0; n < e.size(); ++n) {
                    e[n] = oscillator_energy(run.final_state.bath_q[offset + n], run.final_state.bath_p[offset + n],
                                             spec.baths[b].mass, baths[b].frequencies[n]);
                }
                out.bath_final[b] = try_fit(e, spec.histogram);
                offset += e.size();
            }
            out.step_size = dt;
            out.max_snap = run.max_snap;
        };

        if (spec.propagator == PropagatorKind::Eigen) {
            const CouplingMatrix a = build_coupling_matrix(tp, views);
            const double extra = spec.measure == EnergyMeasure::Renormalized ? a.coupled_stiffness() : 0.0;
            EigenOptions options;
            options.method = spec.diagonalization;
            options.keep_full_state = false;
            try {
                const EigenPropagator prop = EigenPropagator::diagonalize(a, v0, options);
                for (std::size_t i = 0; i < times.size(); ++i) {
                    const simd::QP qp = prop.observe(times[i]);
                    out.energies[i] = 0.5 * qp.p * qp.p / tp.mass + 0.5 * (bare_k + extra) * qp.q * qp.q;
                }
            } catch (const IllConditionedError&) {
                out.used_rk4_fallback = true;
                run_rk4(a, a);
            }
        } else if (baths.size() == 2) {
            const TwoBathSystem sys = build_switched_matrices(tp, spec.baths[0], baths[0], spec.baths[1], baths[1]);
            run_rk4(sys.a1, sys.a2);
        } else {
            const CouplingMatrix a = build_coupling_matrix(tp, views);
            run_rk4(a, a);
        }
    } catch (const Error&) {
        rethrow_with_context(point_context(omega, seed));
    }

    try {
        const EnergyHistogram h = build_histogram(out.energies, spec.histogram);
        out.overflow_fraction = h.overflow_fraction();
        out.fit = fit_temperature(h);
        out.fit_ok = true;
    } catch (const Error& e) {
        out.fit = missing_fit();
        out.fit_error = point_context(omega, seed) + e.what();
    }
    return out;
}

TemperatureFit run_single_bath_point(double omega, const SweepSpec& spec, std::uint64_t seed) {
    SeedRun run = run_point_seed(omega, spec, seed);
    if (!run.fit_ok) {
        // Re-run the fit to raise the original error type with context.
        try {
            return fit_energies(run.energies, spec.histogram);
        } catch (const Error&) {
            rethrow_with_context(point_context(omega, seed));
        }
    }
    return run.fit;
}

CurvePoint aggregate_point(double omega, std::span<const SeedRun> runs, const HistogramOptions& histogram,
                           bool keep_energies) {
    (void)histogram;
    CurvePoint p;
    p.omega = omega;
    p.fit = missing_fit();
    std::vector<TemperatureFit> fits;
    std::vector<double> pooled;
    std::size_t n_baths = 0;
    for (const auto& r : runs) {
        if (r.fit_ok) {
            fits.push_back(r.fit);
        } else if (p.error.empty()) {
            p.error = r.fit_error;
        }
        pooled.insert(pooled.end(), r.energies.begin(), r.energies.end());
        p.overflow_fraction += r.overflow_fraction;
        p.step_size = std::max(p.step_size, r.step_size);
        p.max_snap = std::max(p.max_snap, r.max_snap);
        n_baths = std::max(n_baths, r.bath_initial.size());
    }
    p.seeds_ok = fits.size();
    p.seeds_failed = runs.size() - fits.size();
    if (!runs.empty()) p.overflow_fraction /= static_cast<double>(runs.size());
    if (!fits.empty()) {
        try {
            p.fit = aggregate_seeds(fits);
            p.ok = true;
        } catch (const Error& e) {
            p.error = e.what();
        }
    }
    const SampleMoments m = moments(pooled);
    p.mean_energy = m.mean;
    p.skewness = m.skewness;

    auto aggregate_baths = [&](auto member) {
        std::vector<TemperatureFit> out(n_baths, missing_fit());
        for (std::size_t b = 0; b < n_baths; ++b) {
            std::vector<TemperatureFit> per_seed;
            for (const auto& r : runs) {
                const auto& v = r.*member;
                if (b < v.size() && std::isfinite(v[b].temperature)) per_seed.push_back(v[b]);
            }
            if (!per_seed.empty()) {
                try {
                    out[b] = aggregate_seeds(per_seed);
                } catch (const Error&) {
                }
            }
        }
        return out;
    };
    p.bath_initial = aggregate_baths(&SeedRun::bath_initial);
    p.bath_final = aggregate_baths(&SeedRun::bath_final);
    if (keep_energies) p.energies = std::move(pooled);
    return p;
}

ThermalizationCurve run_sweep(const SweepSpec& spec) {
    spec.validate();
    const std::size_t n_omega = spec.omega_grid.size();
    const std::size_t n_seed = spec.seeds.size();
    std::vector<SeedRun> runs(n_omega * n_seed);
    std::vector<std::string> errors(runs.size());
    std::vector<char> done(runs.size(), 0);

    parallel_for(runs.size(), spec.threads, [&](std::size_t task) {
        const std::size_t i = task / n_seed;
        const std::size_t j = task % n_seed;
        try {
            runs[task] = run_point_seed(spec.omega_grid[i], spec, spec.seeds[j]);
            done[task] = 1;
        } catch (const Error& e) {
            errors[task] = e.what();
        }
    });

    ThermalizationCurve curve;
    for (std::size_t i = 0; i < n_omega; ++i) {
        std::vector<SeedRun> ok_runs;
        std::string first_error;
        std::size_t failed = 0;
        for (std::size_t j = 0; j < n_seed; ++j) {
            const std::size_t task = i * n_seed + j;
            if (done[task]) {
                ok_runs.push_back(std::move(runs[task]));
            } else {
                ++failed;
                if (first_error.empty()) first_error = errors[task];
            }
        }
        CurvePoint p = aggregate_point(spec.omega_grid[i], ok_runs, spec.histogram, spec.keep_energies);
        p.seeds_failed += failed;
        if (!first_error.empty()) p.error = first_error;
        if (ok_runs.empty()) p.ok = false;
        curve.points.push_back(std::move(p));
    }
    return curve;
}

DegenerateRun simulate_degenerate_bath(const DegenerateSimSpec& spec, std::span<const double> times) {
    if (spec.n_oscillators < 2 || spec.n_oscillators % 2 != 0) throw ConfigError("degenerate bath needs an even N >= 2");
    if (!(spec.mass_ratio > 0.0) || !(spec.test_mass > 0.0)) throw ConfigError("masses must be > 0");
    if (!(spec.omega_r > 0.0)) throw ConfigError("omega_r must be > 0");
    if (!(spec.e0 >= 0.0) || !(spec.bath_temperature >= 0.0)) throw ConfigError("energies must be >= 0");
    const double m = spec.mass_ratio * spec.test_mass;
    DegenerateRun out;
    out.xi = static_cast<double>(spec.n_oscillators) * spec.mass_ratio;
    if (spec.omega > 0.0) {
        out.omega = spec.omega;
    } else {
        if (!(out.xi < 1.0)) throw ConfigError("resonant test frequency needs xi < 1");
        out.omega = spec.omega_r * std::sqrt(1.0 - out.xi);
    }

    const std::size_t half = spec.n_oscillators / 2;
    RngStream energy_rng(spec.seed, stream_id(StreamKind::Energies));
    RngStream phase_rng(spec.seed, stream_id(StreamKind::Phases));
    std::vector<double> w(spec.n_oscillators, spec.omega_r), e(spec.n_oscillators), phi(spec.n_oscillators);
    for (std::size_t i = 0; i < half; ++i) {
        e[i] = e[i + half] = spec.bath_temperature > 0.0 ? energy_rng.exponential(spec.bath_temperature) : 0.0;
        phi[i] = 2.0 * std::numbers::pi * phase_rng.uniform();
        phi[i + half] = phi[i] + std::numbers::pi;
    }
    BathRealization bath = make_realization(m, std::move(w), std::move(e), phi, spec.seed);
    const PhaseSums sums = symmetrize_check(bath);
    out.sum_q = sums.sum_q;
    out.sum_p = sums.sum_p;

    TestParticleSpec tp;
    tp.mass = spec.test_mass;
    tp.omega = out.omega;
    tp.p0 = std::sqrt(2.0 * tp.mass * spec.e0);
    const BathRealization baths[1] = {bath};
    const SystemState v0 = initial_state(tp, baths);
    const CouplingMatrix a = build_coupling_matrix(tp, bath.frequencies, m);
    const double k = tp.mass * tp.omega * tp.omega + (spec.measure == EnergyMeasure::Renormalized ? a.coupled_stiffness() : 0.0);

    out.energies.resize(times.size());
    EigenOptions options;
    options.method = spec.diagonalization;
    options.keep_full_state = false;
    try {
        const EigenPropagator prop = EigenPropagator::diagonalize(a, v0, options);
        for (std::size_t i = 0; i < times.size(); ++i) {
            const simd::QP qp = prop.observe(times[i]);
            out.energies[i] = 0.5 * qp.p * qp.p / tp.mass + 0.5 * k * qp.q * qp.q;
        }
    } catch (const IllConditionedError&) {
        out.used_rk4_fallback = true;
        const double fastest = std::max(spec.omega_r, std::sqrt(-a.test_self_term() / a.test_mass));
        SwitchSchedule schedule{1, default_step_size(fastest) / 4.0, 0};
        const SwitchedRun run = run_switched(a, a, v0, schedule, times.empty() ? schedule.step_size : times.back(), times);
        for (std::size_t i = 0; i < times.size(); ++i) {
            const auto& smp = run.samples[i];
            out.energies[i] = 0.5 * smp.p * smp.p / tp.mass + 0.5 * k * smp.q * smp.q;
        }
    }
    return out;
}

bool bath_preserved(const TemperatureFit& initial, const TemperatureFit& final, double n_sigma) {
    if (!std::isfinite(initial.temperature) || !std::isfinite(final.temperature)) return false;
    const double sigma = std::hypot(initial.std_error, final.std_error);
    return std::abs(final.temperature - initial.temperature) <= n_sigma * sigma;
}

TwoBathSweep run_two_bath_sweep(const SweepSpec& spec) {
    if (spec.baths.size() != 2) throw ConfigError("two-bath sweep needs exactly two baths");
    if (spec.propagator != PropagatorKind::SwitchedRK4) throw ConfigError("two-bath sweep needs the switched_rk4 propagator");
    TwoBathSweep out;
    out.switched = run_sweep(spec);
    out.switched.label = "switched";

    bool checked = false;
    bool preserved = true;
    for (const auto& p : out.switched.points) {
        if (p.seeds_ok + p.seeds_failed == 0 || p.bath_initial.size() != 2) continue;
        for (std::size_t b = 0; b < 2; ++b) {
            if (!std::isfinite(p.bath_final[b].temperature)) continue;
            checked = true;
            preserved = preserved && bath_preserved(p.bath_initial[b], p.bath_final[b]);
        }
    }
    out.baths_preserved = checked && preserved;

    if (spec.compare_single_baths) {
        for (std::size_t b = 0; b < 2; ++b) {
            SweepSpec alone = spec;
            alone.baths = {spec.baths[b]};
            alone.first_bath_index = spec.first_bath_index + b;
            alone.propagator = PropagatorKind::Eigen;
            auto curve = run_sweep(alone);
            curve.label = b == 0 ? "bath1_alone" : "bath2_alone";
            (b == 0 ? out.bath1_alone : out.bath2_alone) = std::move(curve);
        }
    }
    return out;
}

std::vector<EnergyScanPoint> run_initial_energy_scan(std::span<const double> omegas, std::span<const double> e0s,
                                                     const SweepSpec& base) {
    std::vector<EnergyScanPoint> out;
    for (double e0 : e0s) {
        if (!(e0 >= 0.0)) throw ConfigError("initial energies must be >= 0");
        SweepSpec spec = base;
        spec.omega_grid.assign(omegas.begin(), omegas.end());
        spec.initial_energy = e0;
        spec.keep_energies = true;
        ThermalizationCurve curve = run_sweep(spec);
        for (auto& p : curve.points) {
            EnergyScanPoint s;
            s.omega = p.omega;
            s.e0 = e0;
            try {
                s.histogram = build_histogram(p.energies, base.histogram);
                s.histogram_ok = true;
            } catch (const Error&) {
            }
            if (!base.keep_energies) {
                p.energies.clear();
                p.energies.shrink_to_fit();
            }
            s.point = std::move(p);
            out.push_back(std::move(s));
        }
    }
    return out;
}

std::size_t peak_index(const ThermalizationCurve& curve) {
    std::vector<std::size_t> ok;
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
        if (curve.points[i].ok && std::isfinite(curve.points[i].fit.temperature)) ok.push_back(i);
    }
    if (ok.empty()) throw FitError("no grid point has a temperature fit");
    std::size_t best = ok.front();
    double best_avg = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < ok.size(); ++k) {
        double s = 0.0;
        int n = 0;
        for (std::size_t j = (k == 0 ? 0 : k - 1); j <= std::min(k + 1, ok.size() - 1); ++j) {
            s += curve.points[ok[j]].fit.temperature;
            ++n;
        }
        const double avg = s / n;
        if (avg > best_avg) {
            best_avg = avg;
            best = ok[k];
        }
    }
    return best;
}

double peak_omega(const ThermalizationCurve& curve) { return curve.points[peak_index(curve)].omega; }

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, n);
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex mu;
    std::size_t error_index = n;
    std::exception_ptr error;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(mu);
                    // Keep the lowest failing index so the reported error does
                    // not depend on scheduling.
                    if (i < error_index) {
                        error_index = i;
                        error = std::current_exception();
                    }
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

std::vector<double> linear_grid(double lo, double hi, std::size_t n) {
    if (n < 1) throw ConfigError("grid needs at least one point");
    if (n == 1) return {lo};
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    g.back() = hi;
    return g;
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
    if (!(lo > 0.0) || !(hi > 0.0)) throw ConfigError("log grid bounds must be > 0");
    auto g = linear_grid(std::log(lo), std::log(hi), n);
    for (auto& x : g) x = std::exp(x);
    g.front() = lo;
    if (n > 1) g.back() = hi;
    return g;
}

}  // namespace thermo
