#include "thermo/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "thermo/error.hpp"

namespace thermo {

using nlohmann::json;

namespace {

const std::vector<std::string> kBathKeys = {"n_oscillators", "mass_ratio", "temperature", "dos", "omega_ir", "omega_uv"};

const std::vector<std::string>& all_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k = {
            "omega_grid",    "omega_min",      "omega_max",    "omega_points",         "omega_spacing",
            "test_mass",     "test_q0",        "test_p0",      "initial_energy",       "initial_energies",
            "n_baths",       "seeds",          "n_samples",    "mean_interval",        "warmup",
            "propagator",    "diagonalization", "energy_measure", "n_bins",            "range_factor",
            "delta_t_steps", "step_size",      "compare_single_baths", "threads",
        };
        for (const auto& b : kBathKeys) {
            k.push_back(b);
            k.push_back("bath2_" + b);
        }
        return k;
    }();
    return keys;
}

[[noreturn]] void key_error(const std::string& key, const std::string& reason) {
    throw ConfigError("config key '" + key + "': " + reason);
}

class Reader {
public:
    explicit Reader(const json& doc) : doc_(doc) {}

    bool has(const std::string& key) const { return doc_.contains(key) && !doc_.at(key).is_null(); }

    double number(const std::string& key, double fallback) const {
        if (!has(key)) return fallback;
        const json& v = doc_.at(key);
        if (!v.is_number()) key_error(key, "expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) key_error(key, "must be finite");
        return x;
    }

    std::uint64_t count(const std::string& key, std::uint64_t fallback) const {
        if (!has(key)) return fallback;
        return as_count(key, doc_.at(key));
    }

    std::string string(const std::string& key, const std::string& fallback) const {
        if (!has(key)) return fallback;
        const json& v = doc_.at(key);
        if (!v.is_string()) key_error(key, "expected a string");
        return v.get<std::string>();
    }

    bool boolean(const std::string& key, bool fallback) const {
        if (!has(key)) return fallback;
        const json& v = doc_.at(key);
        if (!v.is_boolean()) key_error(key, "expected true or false");
        return v.get<bool>();
    }

    std::vector<double> numbers(const std::string& key) const {
        std::vector<double> out;
        if (!has(key)) return out;
        const json& v = doc_.at(key);
        if (!v.is_array()) key_error(key, "expected a list of numbers");
        for (const auto& x : v) {
            if (!x.is_number()) key_error(key, "expected a list of numbers");
            out.push_back(x.get<double>());
        }
        return out;
    }

    std::vector<std::uint64_t> counts(const std::string& key) const {
        std::vector<std::uint64_t> out;
        if (!has(key)) return out;
        const json& v = doc_.at(key);
        if (!v.is_array()) key_error(key, "expected a list of non-negative integers");
        for (const auto& x : v) out.push_back(as_count(key, x));
        return out;
    }

private:
    static std::uint64_t as_count(const std::string& key, const json& v) {
        if (v.is_number_unsigned()) return v.get<std::uint64_t>();
        if (v.is_number_integer()) {
            if (v.get<std::int64_t>() < 0) key_error(key, "must be >= 0");
            return static_cast<std::uint64_t>(v.get<std::int64_t>());
        }
        if (v.is_number_float()) {
            const double d = v.get<double>();
            if (d >= 0.0 && d == std::floor(d) && d < 1.8e19) return static_cast<std::uint64_t>(d);
        }
        key_error(key, "expected a non-negative integer");
    }

    const json& doc_;
};

template <class F>
auto with_key(const std::string& key, F&& f) {
    try {
        return f();
    } catch (const ConfigError& e) {
        key_error(key, e.what());
    }
}

BathSpec read_bath(const Reader& r, const std::string& prefix, const BathSpec& fallback, double test_mass) {
    BathSpec b;
    b.n_oscillators = r.count(prefix + "n_oscillators", fallback.n_oscillators);
    b.mass = r.number(prefix + "mass_ratio", fallback.mass / test_mass) * test_mass;
    b.temperature = r.number(prefix + "temperature", fallback.temperature);
    const std::string dos = r.string(prefix + "dos", std::string(to_string(fallback.dos.family)));
    b.dos.family = with_key(prefix + "dos", [&] { return dos_family_from_string(dos); });
    b.dos.omega_ir = r.number(prefix + "omega_ir", fallback.dos.omega_ir);
    b.dos.omega_uv = r.number(prefix + "omega_uv", fallback.dos.omega_uv);
    if (b.dos.omega_ir > b.dos.omega_uv) {
        throw ConfigError("config keys '" + prefix + "omega_ir' (" + std::to_string(b.dos.omega_ir) + ") and '" + prefix +
                          "omega_uv' (" + std::to_string(b.dos.omega_uv) + "): omega_ir must not exceed omega_uv");
    }
    if (b.n_oscillators < 1) key_error(prefix + "n_oscillators", "must be >= 1");
    if (!(b.mass > 0.0)) key_error(prefix + "mass_ratio", "must be > 0");
    if (!(b.temperature > 0.0)) key_error(prefix + "temperature", "must be > 0");
    if (!(b.dos.omega_ir > 0.0)) key_error(prefix + "omega_ir", "must be > 0");
    return b;
}

json bath_snapshot(const BathSpec& b, const std::string& prefix, double test_mass) {
    json j;
    j[prefix + "n_oscillators"] = b.n_oscillators;
    j[prefix + "mass_ratio"] = b.mass / test_mass;
    j[prefix + "temperature"] = b.temperature;
    j[prefix + "dos"] = std::string(to_string(b.dos.family));
    j[prefix + "omega_ir"] = b.dos.omega_ir;
    j[prefix + "omega_uv"] = b.dos.omega_uv;
    return j;
}

}  // namespace

const std::vector<std::string>& config_keys() { return all_keys(); }

RunConfig parse_config(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config_document(doc);
}

RunConfig parse_config_document(const json& doc) {
    if (!doc.is_object()) throw ConfigError("config must be a JSON object of key/value pairs");
    const auto& keys = all_keys();
    for (const auto& [k, v] : doc.items()) {
        if (std::find(keys.begin(), keys.end(), k) == keys.end()) key_error(k, "unknown key");
        if (v.is_object()) key_error(k, "nested objects are not allowed");
    }

    const Reader r(doc);
    RunConfig cfg;
    SweepSpec& s = cfg.spec;

    s.tp_template.mass = r.number("test_mass", 1.0);
    if (!(s.tp_template.mass > 0.0)) key_error("test_mass", "must be > 0");
    s.tp_template.q0 = r.number("test_q0", 0.0);
    s.tp_template.p0 = r.number("test_p0", 0.0);
    s.initial_energy = r.number("initial_energy", 0.0);
    if (s.initial_energy < 0.0) key_error("initial_energy", "must be >= 0");
    cfg.initial_energies = r.numbers("initial_energies");
    for (double e : cfg.initial_energies) {
        if (!(e >= 0.0)) key_error("initial_energies", "values must be >= 0");
    }

    // Omega grid: explicit list or generated range.
    const bool has_list = r.has("omega_grid");
    const bool has_range = r.has("omega_min") || r.has("omega_max") || r.has("omega_points");
    if (has_list && has_range) key_error("omega_grid", "give either omega_grid or omega_min/omega_max/omega_points");
    if (has_list) {
        s.omega_grid = r.numbers("omega_grid");
    } else if (has_range) {
        for (const char* k : {"omega_min", "omega_max", "omega_points"}) {
            if (!r.has(k)) key_error(k, "required together with the other omega range keys");
        }
        const double lo = r.number("omega_min", 0.0);
        const double hi = r.number("omega_max", 0.0);
        const auto n = r.count("omega_points", 0);
        if (!(lo > 0.0)) key_error("omega_min", "must be > 0");
        if (!(hi > lo)) key_error("omega_max", "must exceed omega_min");
        if (n < 1) key_error("omega_points", "must be >= 1");
        const std::string spacing = r.string("omega_spacing", "log");
        if (spacing == "log") {
            s.omega_grid = log_grid(lo, hi, n);
        } else if (spacing == "linear") {
            s.omega_grid = linear_grid(lo, hi, n);
        } else {
            key_error("omega_spacing", "expected 'log' or 'linear'");
        }
    } else if (r.has("omega_spacing")) {
        key_error("omega_spacing", "only valid with omega_min/omega_max/omega_points");
    }
    if (s.omega_grid.empty()) key_error("omega_grid", "required (or omega_min/omega_max/omega_points)");
    for (std::size_t i = 0; i < s.omega_grid.size(); ++i) {
        if (!(s.omega_grid[i] > 0.0)) key_error("omega_grid", "values must be > 0");
        if (i > 0 && !(s.omega_grid[i] > s.omega_grid[i - 1])) key_error("omega_grid", "must be strictly increasing");
    }

    bool any_bath2 = false;
    for (const auto& b : kBathKeys) any_bath2 = any_bath2 || r.has("bath2_" + b);
    const auto n_baths = r.count("n_baths", any_bath2 ? 2 : 1);
    if (n_baths > 2) key_error("n_baths", "must be 0, 1 or 2");
    if (any_bath2 && n_baths != 2) key_error("n_baths", "bath2_* keys require n_baths = 2");
    const BathSpec defaults;
    BathSpec b1 = read_bath(r, "", BathSpec{400, 0.01 * s.tp_template.mass, 5.0, defaults.dos}, s.tp_template.mass);
    if (n_baths >= 1) s.baths.push_back(b1);
    if (n_baths == 2) s.baths.push_back(read_bath(r, "bath2_", b1, s.tp_template.mass));

    s.seeds = r.counts("seeds");
    if (!r.has("seeds")) s.seeds = {1};
    if (s.seeds.empty()) key_error("seeds", "must not be empty");
    {
        std::set<std::uint64_t> unique(s.seeds.begin(), s.seeds.end());
        if (unique.size() != s.seeds.size()) key_error("seeds", "must not repeat");
    }

    s.sampling.n_samples = r.count("n_samples", 4000);
    s.sampling.mean_interval = r.number("mean_interval", 10.0);
    s.sampling.warmup = r.number("warmup", 0.0);
    if (s.sampling.n_samples < 100) key_error("n_samples", "must be >= 100");
    if (!(s.sampling.mean_interval > 0.0)) key_error("mean_interval", "must be > 0");
    if (!(s.sampling.warmup >= 0.0)) key_error("warmup", "must be >= 0");

    const std::string prop = r.string("propagator", n_baths == 2 ? "switched_rk4" : "eigen");
    s.propagator = with_key("propagator", [&] { return propagator_kind_from_string(prop); });
    if (n_baths == 2 && s.propagator != PropagatorKind::SwitchedRK4) key_error("propagator", "two baths need switched_rk4");
    const std::string diag = r.string("diagonalization", "normal_mode");
    s.diagonalization = with_key("diagonalization", [&] { return diagonalization_from_string(diag); });
    const std::string measure = r.string("energy_measure", "bare");
    s.measure = with_key("energy_measure", [&] { return energy_measure_from_string(measure); });

    s.histogram.n_bins = r.count("n_bins", 40);
    s.histogram.range_factor = r.number("range_factor", 8.0);
    if (s.histogram.n_bins < 5) key_error("n_bins", "must be >= 5");
    if (!(s.histogram.range_factor > 0.0)) key_error("range_factor", "must be > 0");

    s.delta_t_steps = r.count("delta_t_steps", 1);
    if (s.delta_t_steps < 1) key_error("delta_t_steps", "must be >= 1");
    s.step_size = r.number("step_size", 0.0);
    if (s.step_size < 0.0) key_error("step_size", "must be >= 0 (0 selects the automatic step)");
    s.compare_single_baths = r.boolean("compare_single_baths", true);
    s.threads = r.count("threads", 0);

    s.validate();

    json& snap = cfg.snapshot;
    snap = json::object();
    snap["omega_grid"] = s.omega_grid;
    snap["test_mass"] = s.tp_template.mass;
    snap["test_q0"] = s.tp_template.q0;
    snap["test_p0"] = s.tp_template.p0;
    snap["initial_energy"] = s.initial_energy;
    if (!cfg.initial_energies.empty()) snap["initial_energies"] = cfg.initial_energies;
    snap["n_baths"] = n_baths;
    if (n_baths >= 1) snap.update(bath_snapshot(s.baths[0], "", s.tp_template.mass));
    if (n_baths == 2) snap.update(bath_snapshot(s.baths[1], "bath2_", s.tp_template.mass));
    snap["seeds"] = s.seeds;
    snap["n_samples"] = s.sampling.n_samples;
    snap["mean_interval"] = s.sampling.mean_interval;
    snap["warmup"] = s.sampling.warmup;
    snap["propagator"] = std::string(to_string(s.propagator));
    snap["diagonalization"] = std::string(to_string(s.diagonalization));
    snap["energy_measure"] = std::string(to_string(s.measure));
    snap["n_bins"] = s.histogram.n_bins;
    snap["range_factor"] = s.histogram.range_factor;
    snap["delta_t_steps"] = s.delta_t_steps;
    snap["step_size"] = s.step_size;
    snap["compare_single_baths"] = s.compare_single_baths;
    snap["threads"] = s.threads;
    return cfg;
}

void apply_overrides(json& doc, const std::vector<std::string>& assignments) {
    if (!doc.is_object()) doc = json::object();
    for (const auto& a : assignments) {
        const auto eq = a.find('=');
        if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + a + "' must look like key=value");
        const std::string key = a.substr(0, eq);
        const std::string value = a.substr(eq + 1);
        json parsed = json::parse(value, nullptr, false);
        doc[key] = parsed.is_discarded() ? json(value) : parsed;
    }
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace thermo
