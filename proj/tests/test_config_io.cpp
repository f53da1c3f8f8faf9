#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "thermo/config.hpp"
#include "thermo/error.hpp"
#include "thermo/io.hpp"

using namespace thermo;
namespace fs = std::filesystem;

namespace {

std::string error_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "thermo_tests";
    fs::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST(Config, MinimalSingleBath) {
    const RunConfig c = parse_config(R"({"omega_grid": [0.3, 0.5, 0.7], "n_oscillators": 400, "temperature": 5,
                                         "omega_ir": 0.2, "omega_uv": 1.0})");
    const SweepSpec& s = c.spec;
    EXPECT_EQ(s.omega_grid.size(), 3u);
    ASSERT_EQ(s.baths.size(), 1u);
    EXPECT_EQ(s.baths[0].n_oscillators, 400u);
    EXPECT_DOUBLE_EQ(s.baths[0].mass, 0.01);
    EXPECT_EQ(s.propagator, PropagatorKind::Eigen);
    EXPECT_EQ(s.seeds, (std::vector<std::uint64_t>{1}));
    EXPECT_NO_THROW(s.validate());
    EXPECT_EQ(c.snapshot.at("n_oscillators"), 400);
}

TEST(Config, RangeGridAndSecondBath) {
    const RunConfig c = parse_config(R"({"omega_min": 0.1, "omega_max": 1.0, "omega_points": 4,
                                         "omega_spacing": "log", "bath2_temperature": 10, "bath2_omega_ir": 2,
                                         "bath2_omega_uv": 10, "mass_ratio": 0.001, "seeds": [3, 1, 2]})");
    const SweepSpec& s = c.spec;
    ASSERT_EQ(s.omega_grid.size(), 4u);
    EXPECT_NEAR(s.omega_grid.front(), 0.1, 1e-15);
    EXPECT_NEAR(s.omega_grid.back(), 1.0, 1e-15);
    EXPECT_NEAR(s.omega_grid[1], std::pow(10.0, -2.0 / 3.0), 1e-14);
    ASSERT_EQ(s.baths.size(), 2u);
    EXPECT_EQ(s.propagator, PropagatorKind::SwitchedRK4);
    // Unset bath-2 keys fall back to bath 1.
    EXPECT_DOUBLE_EQ(s.baths[1].mass, 0.001);
    EXPECT_EQ(s.baths[1].temperature, 10.0);
    EXPECT_EQ(s.baths[1].dos.omega_ir, 2.0);
}

TEST(Config, ErrorsNameTheKey) {
    EXPECT_NE(error_of(R"({"omega_grid": [0.5], "omega_ir": 2.0, "omega_uv": 1.0})").find("omega_uv"),
              std::string::npos);
    EXPECT_NE(error_of(R"({"omega_grid": [0.5], "bogus": 1})").find("bogus"), std::string::npos);
    EXPECT_NE(error_of(R"({"omega_grid": [0.5], "temperature": -1})").find("temperature"), std::string::npos);
    EXPECT_NE(error_of(R"({"omega_grid": [0.5, 0.4]})").find("omega_grid"), std::string::npos);
    EXPECT_NE(error_of(R"({"omega_grid": [0.5], "n_samples": "many"})").find("n_samples"), std::string::npos);
    EXPECT_NE(error_of(R"({"omega_grid": [0.5], "propagator": "leapfrog"})").find("propagator"), std::string::npos);
    EXPECT_NE(error_of(R"({"omega_grid": [0.5], "n_baths": 1, "bath2_temperature": 3})").find("n_baths"),
              std::string::npos);
    EXPECT_NE(error_of(R"({"n_oscillators": 10})").find("omega_grid"), std::string::npos);
    EXPECT_FALSE(error_of("{not json").empty());
    EXPECT_FALSE(error_of("[1, 2]").empty());
}

TEST(Config, OverridesParseJsonValues) {
    nlohmann::json doc = {{"omega_grid", {0.5}}};
    apply_overrides(doc, {"n_oscillators=50", "propagator=switched_rk4", "omega_grid=[0.2,0.4]", "seeds=[5,6]"});
    EXPECT_EQ(doc["n_oscillators"], 50);
    EXPECT_EQ(doc["propagator"], "switched_rk4");
    const RunConfig c = parse_config_document(doc);
    EXPECT_EQ(c.spec.omega_grid, (std::vector<double>{0.2, 0.4}));
    EXPECT_EQ(c.spec.seeds, (std::vector<std::uint64_t>{5, 6}));
    EXPECT_THROW(apply_overrides(doc, {"novalue"}), ConfigError);
}

TEST(Config, SnapshotReparses) {
    const RunConfig a = parse_config(R"({"omega_min": 0.2, "omega_max": 0.8, "omega_points": 3,
                                         "omega_spacing": "linear", "seeds": [4]})");
    const RunConfig b = parse_config_document(a.snapshot);
    EXPECT_EQ(a.spec.omega_grid, b.spec.omega_grid);
    EXPECT_EQ(a.snapshot, b.snapshot);
}

TEST(Config, EveryKeyIsAccepted) {
    const auto& keys = config_keys();
    EXPECT_NE(std::find(keys.begin(), keys.end(), "bath2_omega_uv"), keys.end());
    EXPECT_NE(std::find(keys.begin(), keys.end(), "delta_t_steps"), keys.end());
    EXPECT_THROW(read_text_file("/nonexistent/thermo.json"), ConfigError);
}

TEST(Io, FormatDouble) {
    EXPECT_EQ(format_double(0.1), "0.10000000000000001");
    EXPECT_EQ(format_double(std::nan("")), "nan");
    EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Io, EmptyCurveIsHeaderOnly) {
    const auto path = scratch("empty.csv").string();
    emit_curve(ThermalizationCurve{}, path);
    std::ifstream in(path);
    std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    EXPECT_EQ(all, "omega,T_tp,T_tp_err,goodness,overflow_frac,T_bath_init,T_bath_final\n");
    EXPECT_TRUE(read_curve(path).empty());
}

TEST(Io, CurveRoundTrip) {
    ThermalizationCurve c;
    for (int i = 0; i < 3; ++i) {
        CurvePoint p;
        p.omega = 0.1 * (i + 1) + 1e-17;
        p.fit.temperature = 5.0 / 3.0 + i;
        p.fit.std_error = 0.123456789012345;
        p.fit.goodness = 1.0 / 7.0;
        p.overflow_fraction = 0.001;
        c.points.push_back(p);
    }
    const auto path = scratch("curve.csv").string();
    emit_curve(c, path);
    const auto rows = read_curve(path);
    const auto expected = curve_rows(c);
    ASSERT_EQ(rows.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(rows[i].omega, expected[i].omega);
        EXPECT_EQ(rows[i].t_tp, expected[i].t_tp);
        EXPECT_EQ(rows[i].t_tp_err, expected[i].t_tp_err);
        EXPECT_EQ(rows[i].goodness, expected[i].goodness);
        EXPECT_TRUE(std::isnan(rows[i].t_bath_init));
    }
}

TEST(Io, HistogramRoundTripPreservesCounts) {
    const std::vector<double> e{0.5, 1.5, 1.7, 2.2, 9.0, 3.3};
    const EnergyHistogram h = build_histogram(e, 5, 5.0);
    TemperatureFit f;
    f.temperature = 2.0;
    f.std_error = 0.5;
    const auto path = scratch("hist.csv").string();
    emit_histogram(h, &f, path, "manifest.json");
    const EnergyHistogram r = read_histogram(path);
    EXPECT_EQ(r.counts, h.counts);
    EXPECT_EQ(r.edges, h.edges);
    EXPECT_EQ(r.total, h.total);
    EXPECT_EQ(r.overflow, 1u);
    std::ifstream side(path + ".json");
    const auto j = nlohmann::json::parse(side);
    EXPECT_EQ(fit_from_json(j.at("fit")).temperature, 2.0);
    EXPECT_EQ(j.at("manifest"), "manifest.json");
}

TEST(Io, FitJsonHandlesMissingValues) {
    TemperatureFit f;
    f.temperature = std::nan("");
    f.std_error = 0.1;
    const auto j = to_json(f);
    EXPECT_TRUE(j.at("temperature").is_null());
    EXPECT_TRUE(std::isnan(fit_from_json(j).temperature));
    EXPECT_EQ(fit_from_json(j).std_error, 0.1);
}

TEST(Io, ReadNumbers) {
    const auto path = scratch("numbers.txt").string();
    {
        std::ofstream out(path);
        out << "# energies\n1.5, 2\n3e-1\t4 # trailing\n\n";
    }
    EXPECT_EQ(read_numbers(path), (std::vector<double>{1.5, 2.0, 0.3, 4.0}));
    {
        std::ofstream out(path);
        out << "1 two\n";
    }
    EXPECT_THROW(read_numbers(path), ConfigError);
}

TEST(Io, ManifestContainsReproductionFields) {
    RunManifest m;
    m.config = {{"n_oscillators", 10}};
    m.seeds = {1, 2};
    m.code_version = code_version();
    m.command = "sweep";
    m.bath_initial.resize(1);
    const auto j = m.to_json();
    for (const char* k : {"code_version", "config", "seeds", "propagator", "simd_level", "step_size", "baths"}) {
        EXPECT_TRUE(j.contains(k)) << k;
    }
    EXPECT_EQ(j.at("baths").size(), 1u);
    EXPECT_EQ(utc_timestamp().size(), 20u);
}
