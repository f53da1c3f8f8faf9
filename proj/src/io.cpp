#include "thermo/io.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <limits>
#include <sstream>

#include "thermo/error.hpp"

#ifndef THERMO_VERSION
#define THERMO_VERSION "0.0.0"
#endif

namespace thermo {

using nlohmann::json;

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + path + "'");
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    return in;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& s, const std::string& where) {
    char* end = nullptr;
    const double x = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) throw ConfigError(where + ": cannot parse '" + s + "' as a number");
    return x;
}

// JSON has no NaN; missing values are written as null.
json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

double number_from(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::numeric_limits<double>::quiet_NaN();
    return j.at(key).get<double>();
}

}  // namespace

std::string code_version() { return THERMO_VERSION; }

std::string utc_timestamp() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

json to_json(const TemperatureFit& fit) {
    return json{{"temperature", number_or_null(fit.temperature)},
                {"std_error", number_or_null(fit.std_error)},
                {"slope", number_or_null(fit.slope)},
                {"intercept", number_or_null(fit.intercept)},
                {"n_bins_used", fit.n_bins_used},
                {"goodness", number_or_null(fit.goodness)}};
}

TemperatureFit fit_from_json(const json& j) {
    TemperatureFit f;
    f.temperature = number_from(j, "temperature");
    f.std_error = number_from(j, "std_error");
    f.slope = number_from(j, "slope");
    f.intercept = number_from(j, "intercept");
    f.n_bins_used = j.value("n_bins_used", std::size_t{0});
    f.goodness = number_from(j, "goodness");
    return f;
}

json RunManifest::to_json() const {
    json j;
    j["code_version"] = code_version;
    j["command"] = command;
    j["config"] = config;
    j["seeds"] = seeds;
    j["propagator"] = propagator;
    j["simd_level"] = simd_level;
    j["step_size"] = step_size;
    j["delta_t_steps"] = delta_t_steps;
    j["max_snap"] = max_snap;
    j["started_at"] = started_at;
    j["finished_at"] = finished_at;
    json baths = json::array();
    for (std::size_t b = 0; b < std::max(bath_initial.size(), bath_final.size()); ++b) {
        json e;
        e["initial"] = b < bath_initial.size() ? thermo::to_json(bath_initial[b]) : json(nullptr);
        e["final"] = b < bath_final.size() ? thermo::to_json(bath_final[b]) : json(nullptr);
        baths.push_back(e);
    }
    j["baths"] = baths;
    return j;
}

void write_manifest(const RunManifest& manifest, const std::string& path) {
    auto out = open_out(path);
    out << manifest.to_json().dump(2) << '\n';
}

std::vector<CurveRow> curve_rows(const ThermalizationCurve& curve) {
    std::vector<CurveRow> rows;
    rows.reserve(curve.points.size());
    for (const auto& p : curve.points) {
        CurveRow r;
        r.omega = p.omega;
        r.t_tp = p.fit.temperature;
        r.t_tp_err = p.fit.std_error;
        r.goodness = p.fit.goodness;
        r.overflow_frac = p.overflow_fraction;
        r.t_bath_init = p.bath_temperature_initial();
        r.t_bath_final = p.bath_temperature_final();
        rows.push_back(r);
    }
    return rows;
}

static const char* kCurveHeader = "omega,T_tp,T_tp_err,goodness,overflow_frac,T_bath_init,T_bath_final";

void emit_curve(const ThermalizationCurve& curve, const std::string& path) {
    auto out = open_out(path);
    out << kCurveHeader << '\n';
    for (const auto& r : curve_rows(curve)) {
        out << format_double(r.omega) << ',' << format_double(r.t_tp) << ',' << format_double(r.t_tp_err) << ','
            << format_double(r.goodness) << ',' << format_double(r.overflow_frac) << ',' << format_double(r.t_bath_init)
            << ',' << format_double(r.t_bath_final) << '\n';
    }
    if (!out) throw Error("failed writing '" + path + "'");
}

std::vector<CurveRow> read_curve(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line) || split(line, ',') != split(kCurveHeader, ',')) {
        throw ConfigError(path + ": missing or unexpected curve header");
    }
    std::vector<CurveRow> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto f = split(line, ',');
        const std::string where = path + ":" + std::to_string(lineno);
        if (f.size() != 7) throw ConfigError(where + ": expected 7 fields");
        rows.push_back({parse_double(f[0], where), parse_double(f[1], where), parse_double(f[2], where),
                        parse_double(f[3], where), parse_double(f[4], where), parse_double(f[5], where),
                        parse_double(f[6], where)});
    }
    return rows;
}

void emit_histogram(const EnergyHistogram& hist, const TemperatureFit* fit, const std::string& path,
                    const std::string& manifest_ref) {
    {
        auto out = open_out(path);
        out << "bin_lo,bin_hi,count\n";
        for (std::size_t i = 0; i < hist.n_bins(); ++i) {
            out << format_double(hist.edges[i]) << ',' << format_double(hist.edges[i + 1]) << ',' << hist.counts[i]
                << '\n';
        }
        if (!out) throw Error("failed writing '" + path + "'");
    }
    json side;
    side["histogram"] = path;
    side["total"] = hist.total;
    side["overflow"] = hist.overflow;
    side["degenerate"] = hist.degenerate;
    side["fit"] = fit ? to_json(*fit) : json(nullptr);
    side["manifest"] = manifest_ref.empty() ? json(nullptr) : json(manifest_ref);
    auto out = open_out(path + ".json");
    out << side.dump(2) << '\n';
}

EnergyHistogram read_histogram(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line) || split(line, ',') != std::vector<std::string>{"bin_lo", "bin_hi", "count"}) {
        throw ConfigError(path + ": missing or unexpected histogram header");
    }
    EnergyHistogram h;
    std::size_t lineno = 1;
    std::uint64_t sum = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto f = split(line, ',');
        const std::string where = path + ":" + std::to_string(lineno);
        if (f.size() != 3) throw ConfigError(where + ": expected 3 fields");
        const double lo = parse_double(f[0], where);
        const double hi = parse_double(f[1], where);
        std::uint64_t c = 0;
        const auto res = std::from_chars(f[2].data(), f[2].data() + f[2].size(), c);
        if (res.ec != std::errc() || res.ptr != f[2].data() + f[2].size()) {
            throw ConfigError(where + ": count must be a non-negative integer");
        }
        if (h.edges.empty()) {
            h.edges.push_back(lo);
        } else if (lo != h.edges.back()) {
            throw ConfigError(where + ": bins must be contiguous");
        }
        h.edges.push_back(hi);
        h.counts.push_back(c);
        sum += c;
    }
    h.total = sum;
    std::ifstream side(path + ".json");
    if (side) {
        try {
            const json j = json::parse(side);
            h.total = j.value("total", static_cast<std::size_t>(sum));
            h.overflow = j.value("overflow", std::size_t{0});
            h.degenerate = j.value("degenerate", false);
        } catch (const json::exception& e) {
            throw ConfigError(path + ".json: " + e.what());
        }
    }
    return h;
}

std::vector<double> read_numbers(const std::string& path) {
    auto in = open_in(path);
    std::vector<double> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        for (auto& c : line) {
            if (c == ',' || c == '\t' || c == ';' || c == '\r') c = ' ';
        }
        std::istringstream ss(line);
        std::string tok;
        while (ss >> tok) out.push_back(parse_double(tok, path + ":" + std::to_string(lineno)));
    }
    return out;
}

}  // namespace thermo
