#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "thermo/experiments.hpp"
#include "thermo/statistics.hpp"

namespace thermo {

/// Everything needed to re-execute a run bit for bit.
struct RunManifest {
    nlohmann::json config;
    std::vector<std::uint64_t> seeds;
    std::string code_version;
    std::string command;
    std::string propagator;
    std::string simd_level;
    double step_size = 0.0;
    std::size_t delta_t_steps = 0;
    double max_snap = 0.0;
    std::string started_at;
    std::string finished_at;
    /// One entry per bath: aggregated initial and final fits.
    std::vector<TemperatureFit> bath_initial, bath_final;

    nlohmann::json to_json() const;
};

std::string code_version();
/// UTC time in ISO 8601.
std::string utc_timestamp();

void write_manifest(const RunManifest& manifest, const std::string& path);

/// Shortest round-trip formatting used by every artifact (17 significant digits).
std::string format_double(double x);

struct CurveRow {
    double omega = 0.0;
    double t_tp = 0.0;
    double t_tp_err = 0.0;
    double goodness = 0.0;
    double overflow_frac = 0.0;
    double t_bath_init = 0.0;
    double t_bath_final = 0.0;
};

std::vector<CurveRow> curve_rows(const ThermalizationCurve& curve);

/// CSV with header omega,T_tp,T_tp_err,goodness,overflow_frac,T_bath_init,T_bath_final.
void emit_curve(const ThermalizationCurve& curve, const std::string& path);
std::vector<CurveRow> read_curve(const std::string& path);

/// CSV bin_lo,bin_hi,count plus a JSON sidecar (path + ".json") holding the
/// fit, totals and a reference to the run manifest.
void emit_histogram(const EnergyHistogram& hist, const TemperatureFit* fit, const std::string& path,
                    const std::string& manifest_ref = {});
/// Reads the CSV and, when present, the sidecar's total/overflow counts.
EnergyHistogram read_histogram(const std::string& path);

nlohmann::json to_json(const TemperatureFit& fit);
TemperatureFit fit_from_json(const nlohmann::json& j);

/// Whitespace- or comma-separated numbers; '#' starts a comment.
std::vector<double> read_numbers(const std::string& path);

}  // namespace thermo
