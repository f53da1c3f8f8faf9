// Command-line driver: single points, sweeps, two-bath runs, oracles and
// offline fitting. Exit codes: 0 ok, 2 configuration, 3 numerical, 4 fit.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <numbers>
#include <string>
#include <vector>

#include "thermo/bath.hpp"
#include "thermo/config.hpp"
#include "thermo/error.hpp"
#include "thermo/experiments.hpp"
#include "thermo/io.hpp"
#include "thermo/oracles.hpp"
#include "thermo/simd/kernels.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace thermo;

namespace {

struct CommonOptions {
    std::string config_path;
    std::vector<std::string> overrides;
    std::vector<std::uint64_t> seed_list;
    std::vector<double> omega;
    int threads = -1;
    long n_samples = -1;
    std::string out_dir = ".";
    std::string simd;
};

void add_common(CLI::App* app, CommonOptions& o) {
    app->add_option("-c,--config", o.config_path, "JSON configuration file");
    app->add_option("--set", o.overrides, "Override a config key, e.g. --set temperature=7.5")->take_all();
    app->add_option("--seed-list", o.seed_list, "Explicit seeds (replaces 'seeds')");
    app->add_option("--omega", o.omega, "Test-particle frequencies (replaces the omega grid)");
    app->add_option("--threads", o.threads, "Worker threads (0: all cores)");
    app->add_option("--n-samples", o.n_samples, "Energy samples per seed");
    app->add_option("-o,--out-dir", o.out_dir, "Directory for artifacts");
}

RunConfig load_config(const CommonOptions& o) {
    json doc = json::object();
    if (!o.config_path.empty()) {
        try {
            doc = json::parse(read_text_file(o.config_path));
        } catch (const json::parse_error& e) {
            throw ConfigError(o.config_path + ": not valid JSON: " + e.what());
        }
    }
    if (!o.seed_list.empty()) doc["seeds"] = o.seed_list;
    if (!o.omega.empty()) {
        for (const char* k : {"omega_min", "omega_max", "omega_points", "omega_spacing"}) doc.erase(k);
        doc["omega_grid"] = o.omega;
    }
    if (o.threads >= 0) doc["threads"] = o.threads;
    if (o.n_samples >= 0) doc["n_samples"] = o.n_samples;
    apply_overrides(doc, o.overrides);
    return parse_config_document(doc);
}

RunManifest make_manifest(const RunConfig& cfg, const std::string& command) {
    RunManifest m;
    m.config = cfg.snapshot;
    m.seeds = cfg.spec.seeds;
    m.code_version = code_version();
    m.command = command;
    m.propagator = std::string(to_string(cfg.spec.propagator));
    m.simd_level = std::string(simd::to_string(simd::active_level()));
    m.delta_t_steps = cfg.spec.delta_t_steps;
    m.started_at = utc_timestamp();
    return m;
}

void finish_manifest(RunManifest& m, const ThermalizationCurve& curve) {
    for (const auto& p : curve.points) {
        m.step_size = std::max(m.step_size, p.step_size);
        m.max_snap = std::max(m.max_snap, p.max_snap);
    }
    if (!curve.points.empty()) {
        m.bath_initial = curve.points.front().bath_initial;
        m.bath_final = curve.points.back().bath_final;
    }
    m.finished_at = utc_timestamp();
}

std::string out_path(const CommonOptions& o, const std::string& name) {
    fs::create_directories(o.out_dir);
    return (fs::path(o.out_dir) / name).string();
}

void print_curve(const ThermalizationCurve& curve, double t_ref) {
    std::printf("%-12s %-12s %-10s %-8s %s\n", "omega", "T_tp", "err", "ratio", "status");
    for (const auto& p : curve.points) {
        std::printf("%-12.6g %-12.6g %-10.3g %-8.3f %s\n", p.omega, p.fit.temperature, p.fit.std_error,
                    p.fit.temperature / t_ref, p.ok ? "ok" : p.error.c_str());
    }
}

double reference_temperature(const SweepSpec& s) {
    if (s.baths.empty()) return 1.0;
    double t = 0.0;
    for (const auto& b : s.baths) t += b.temperature;
    return t / static_cast<double>(s.baths.size());
}

int cmd_single(const CommonOptions& o) {
    RunConfig cfg = load_config(o);
    const double omega = cfg.spec.omega_grid.front();
    RunManifest manifest = make_manifest(cfg, "single");
    std::vector<SeedRun> runs;
    for (auto seed : cfg.spec.seeds) runs.push_back(run_point_seed(omega, cfg.spec, seed));
    CurvePoint p = aggregate_point(omega, runs, cfg.spec.histogram, true);
    ThermalizationCurve curve;
    curve.points.push_back(p);
    finish_manifest(manifest, curve);
    const std::string manifest_path = out_path(o, "manifest.json");
    write_manifest(manifest, manifest_path);

    const EnergyHistogram h = build_histogram(p.energies, cfg.spec.histogram);
    emit_histogram(h, p.ok ? &p.fit : nullptr, out_path(o, "histogram.csv"), "manifest.json");
    std::printf("omega=%g seeds=%zu mean_energy=%.6g skewness=%.4g overflow=%.4g\n", omega, cfg.spec.seeds.size(),
                p.mean_energy, p.skewness, p.overflow_fraction);
    if (!p.ok) throw FitError(p.error);
    std::printf("T_tp=%.6g +- %.3g (ratio %.4f)\n", p.fit.temperature, p.fit.std_error,
                p.fit.temperature / reference_temperature(cfg.spec));
    return 0;
}

int cmd_sweep(const CommonOptions& o) {
    RunConfig cfg = load_config(o);
    RunManifest manifest = make_manifest(cfg, "sweep");
    const double t_ref = reference_temperature(cfg.spec);
    if (cfg.initial_energies.empty()) {
        const ThermalizationCurve curve = run_sweep(cfg.spec);
        emit_curve(curve, out_path(o, "curve.csv"));
        finish_manifest(manifest, curve);
        write_manifest(manifest, out_path(o, "manifest.json"));
        print_curve(curve, t_ref);
        return 0;
    }
    const auto scan = run_initial_energy_scan(cfg.spec.omega_grid, cfg.initial_energies, cfg.spec);
    json summary = json::array();
    std::size_t k = 0;
    for (double e0 : cfg.initial_energies) {
        ThermalizationCurve curve;
        for (const auto& s : scan) {
            if (s.e0 != e0) continue;
            curve.points.push_back(s.point);
            const std::string stem = "hist_e0_" + std::to_string(k) + "_omega_" + std::to_string(curve.points.size() - 1);
            if (s.histogram_ok) {
                emit_histogram(s.histogram, s.point.ok ? &s.point.fit : nullptr, out_path(o, stem + ".csv"),
                               "manifest.json");
            }
            summary.push_back({{"omega", s.omega},
                               {"e0", e0},
                               {"T_tp", s.point.ok ? json(s.point.fit.temperature) : json(nullptr)},
                               {"mean_energy", s.point.mean_energy},
                               {"skewness", s.point.skewness}});
        }
        emit_curve(curve, out_path(o, "curve_e0_" + std::to_string(k) + ".csv"));
        std::printf("E0 = %g\n", e0);
        print_curve(curve, t_ref);
        finish_manifest(manifest, curve);
        ++k;
    }
    std::ofstream(out_path(o, "scan.json")) << summary.dump(2) << '\n';
    write_manifest(manifest, out_path(o, "manifest.json"));
    return 0;
}

int cmd_twobath(const CommonOptions& o) {
    RunConfig cfg = load_config(o);
    if (cfg.spec.baths.size() != 2) throw ConfigError("twobath needs two baths (set the bath2_* keys or n_baths = 2)");
    RunManifest manifest = make_manifest(cfg, "twobath");
    const TwoBathSweep r = run_two_bath_sweep(cfg.spec);
    emit_curve(r.switched, out_path(o, "switched.csv"));
    if (cfg.spec.compare_single_baths) {
        emit_curve(r.bath1_alone, out_path(o, "bath1_alone.csv"));
        emit_curve(r.bath2_alone, out_path(o, "bath2_alone.csv"));
    }
    finish_manifest(manifest, r.switched);
    write_manifest(manifest, out_path(o, "manifest.json"));
    const double t_ref = reference_temperature(cfg.spec);
    std::printf("switched:\n");
    print_curve(r.switched, t_ref);
    if (cfg.spec.compare_single_baths) {
        std::printf("bath 1 alone:\n");
        print_curve(r.bath1_alone, cfg.spec.baths[0].temperature);
        std::printf("bath 2 alone:\n");
        print_curve(r.bath2_alone, cfg.spec.baths[1].temperature);
    }
    std::printf("baths preserved: %s\n", r.baths_preserved ? "yes" : "no");
    return 0;
}

struct OracleOptions {
    double gamma = 0.1, temperature = 5.0, omega = 1.0, mass = 1.0;
    double t_final = 2e5, dt = 0.01, sample_interval = 30.0, burn_in = 100.0;
    std::uint64_t seed = 1;
    std::size_t n = 100;
    double mass_ratio = 1e-5, omega_r = 1.0, e0 = 1.0;
    std::size_t samples = 4096;
    double t = 0.0, e = 0.0, t1 = 5.0, t2 = 10.0;
    double horizon = 0.0;  // degenerate: 0 covers 20 exchange periods
    std::vector<double> frequencies;
};

int cmd_oracle(const std::string& which, const OracleOptions& o) {
    if (which == "langevin") {
        LangevinParams p{o.gamma, o.temperature, o.mass, o.omega};
        LangevinOptions opt;
        opt.t_final = o.t_final;
        opt.dt = o.dt;
        opt.sample_interval = o.sample_interval;
        opt.burn_in = o.burn_in;
        RngStream rng(o.seed, stream_id(StreamKind::Langevin));
        const LangevinResult r = langevin_reference(p, opt, rng);
        const TemperatureFit fit = fit_energies(r.energies);
        std::printf("samples=%zu mean_energy=%.6g fit_T=%.6g +- %.3g\n", r.energies.size(), r.mean_energy,
                    fit.temperature, fit.std_error);
        return 0;
    }
    if (which == "degenerate") {
        DegenerateSimSpec s;
        s.n_oscillators = o.n;
        s.mass_ratio = o.mass_ratio;
        s.omega_r = o.omega_r;
        s.e0 = o.e0;
        s.seed = o.seed;
        const DegenerateBathParams params{o.omega_r, static_cast<double>(o.n) * o.mass_ratio, o.e0};
        const double omega = resonant_test_frequency(params);
        const DegenerateExchange ex = degenerate_exchange(omega, params);
        const double period = 2.0 * std::numbers::pi / ex.exchange_frequency;
        const double horizon = o.horizon > 0.0 ? o.horizon : 20.0 * period;
        std::vector<double> times(o.samples);
        for (std::size_t i = 0; i < times.size(); ++i) times[i] = horizon * static_cast<double>(i) / static_cast<double>(times.size());
        const DegenerateRun run = simulate_degenerate_bath(s, times);
        const SpectralLines lines = dominant_line(run.energies, times[1] - times[0]);
        const ArcsineCheck ks = arcsine_distribution_check(run.energies, o.e0);
        std::printf("omega=%.6g xi=%.4g exchange_frequency(expected)=%.6g measured=%.6g secondary_ratio=%.4g\n", omega,
                    run.xi, ex.exchange_frequency, lines.frequency, lines.secondary_ratio);
        std::printf("arcsine KS D=%.4g p=%.4g rejected=%zu\n", ks.ks.statistic, ks.ks.p_value, ks.rejected);
        return 0;
    }
    if (which == "kernel") {
        if (o.frequencies.empty()) throw ConfigError("kernel oracle needs --frequencies");
        std::printf("Gamma(%g) = %.17g\n", o.t, memory_kernel(o.frequencies, o.mass_ratio * o.mass, o.t));
        return 0;
    }
    if (which == "efftemp") {
        const double te = effective_temperature(o.e, o.t1, o.t2);
        std::printf("T_eff(E=%g, T1=%g, T2=%g) = %.17g\n", o.e, o.t1, o.t2, te);
        return 0;
    }
    throw ConfigError("unknown oracle '" + which + "' (expected langevin, degenerate, kernel or efftemp)");
}

int cmd_fit(const std::string& energies_path, const std::string& histogram_path, std::size_t n_bins, double range_factor,
            const std::string& out) {
    if (energies_path.empty() == histogram_path.empty()) throw ConfigError("fit needs exactly one of --energies or --histogram");
    EnergyHistogram h;
    if (!energies_path.empty()) {
        const auto e = read_numbers(energies_path);
        h = build_histogram(e, HistogramOptions{n_bins, range_factor});
    } else {
        h = read_histogram(histogram_path);
    }
    const TemperatureFit fit = fit_temperature(h);
    if (!out.empty()) emit_histogram(h, &fit, out);
    std::printf("T=%.10g +- %.4g slope=%.6g bins_used=%zu goodness=%.6g overflow=%zu/%zu\n", fit.temperature,
                fit.std_error, fit.slope, fit.n_bins_used, fit.goodness, h.overflow, h.total);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Thermalization of a harmonic test particle in finite oscillator baths"};
    app.require_subcommand(1);
    std::string simd_level;
    app.add_option("--simd", simd_level, "Kernel level: scalar or avx2 (default: best available)");

    CommonOptions single_o, sweep_o, two_o;
    auto* single = app.add_subcommand("single", "One frequency point; writes histogram and manifest");
    add_common(single, single_o);
    auto* sweep = app.add_subcommand("sweep", "Frequency sweep against one bath (initial_energies: energy scan)");
    add_common(sweep, sweep_o);
    auto* two = app.add_subcommand("twobath", "Intermittent coupling to two baths");
    add_common(two, two_o);

    OracleOptions oo;
    std::string which;
    auto* oracle = app.add_subcommand("oracle", "Analytic reference diagnostics");
    oracle->add_option("which", which, "langevin | degenerate | kernel | efftemp")->required();
    oracle->add_option("--gamma", oo.gamma);
    oracle->add_option("--temperature", oo.temperature);
    oracle->add_option("--omega", oo.omega);
    oracle->add_option("--mass", oo.mass);
    oracle->add_option("--t-final", oo.t_final);
    oracle->add_option("--dt", oo.dt);
    oracle->add_option("--horizon", oo.horizon, "Degenerate run length (0: 20 exchange periods)");
    oracle->add_option("--sample-interval", oo.sample_interval);
    oracle->add_option("--burn-in", oo.burn_in);
    oracle->add_option("--seed", oo.seed);
    oracle->add_option("--n", oo.n, "Bath size (degenerate)");
    oracle->add_option("--mass-ratio", oo.mass_ratio);
    oracle->add_option("--omega-r", oo.omega_r);
    oracle->add_option("--e0", oo.e0);
    oracle->add_option("--samples", oo.samples);
    oracle->add_option("--t", oo.t);
    oracle->add_option("--energy", oo.e);
    oracle->add_option("--t1", oo.t1);
    oracle->add_option("--t2", oo.t2);
    oracle->add_option("--frequencies", oo.frequencies);

    std::string energies_path, histogram_path, fit_out;
    std::size_t n_bins = 40;
    double range_factor = 8.0;
    auto* fit = app.add_subcommand("fit", "Fit a temperature to stored energies or a histogram");
    fit->add_option("--energies", energies_path, "Text file of energy samples");
    fit->add_option("--histogram", histogram_path, "Histogram CSV (bin_lo,bin_hi,count)");
    fit->add_option("--n-bins", n_bins);
    fit->add_option("--range-factor", range_factor);
    fit->add_option("--out", fit_out, "Write the histogram and fit here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (!simd_level.empty()) simd::set_active_level(simd::level_from_string(simd_level));
        if (*single) return cmd_single(single_o);
        if (*sweep) return cmd_sweep(sweep_o);
        if (*two) return cmd_twobath(two_o);
        if (*oracle) return cmd_oracle(which, oo);
        if (*fit) return cmd_fit(energies_path, histogram_path, n_bins, range_factor, fit_out);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const FitError& e) {
        std::cerr << "fit failure: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
