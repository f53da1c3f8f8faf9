#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "thermo/bath.hpp"
#include "thermo/error.hpp"
#include "thermo/ks.hpp"
#include "thermo/rng.hpp"
#include "thermo/statistics.hpp"

using namespace thermo;

namespace {

EnergyHistogram exact_histogram(double t, double scale, std::size_t n_bins = 20, double width = 1.0) {
    EnergyHistogram h;
    for (std::size_t i = 0; i <= n_bins; ++i) h.edges.push_back(width * static_cast<double>(i));
    for (std::size_t i = 0; i < n_bins; ++i) {
        h.counts.push_back(static_cast<std::uint64_t>(std::llround(scale * std::exp(-h.center(i) / t))));
        h.total += h.counts.back();
    }
    return h;
}

std::vector<double> exponential_samples(double t, std::size_t n, std::uint64_t seed) {
    RngStream r(seed, stream_id(StreamKind::Synthetic));
    std::vector<double> x(n);
    for (auto& e : x) e = r.exponential(t);
    return x;
}

}  // namespace

TEST(Sampling, TimesFromGaps) {
    const std::vector<double> gaps{0.5, 1.5, 0.2};
    const auto t = sampling_times_from_gaps(gaps);
    ASSERT_EQ(t.size(), 3u);
    EXPECT_DOUBLE_EQ(t[0], 0.5);
    EXPECT_DOUBLE_EQ(t[1], 2.0);
    EXPECT_DOUBLE_EQ(t[2], 2.2);
    const auto w = sampling_times_from_gaps(gaps, 10.0);
    EXPECT_DOUBLE_EQ(w[0], 10.5);
}

TEST(Sampling, RandomTimesAreIncreasingWithMeanGap) {
    SamplingPlan plan;
    plan.mean_interval = 3.0;
    plan.n_samples = 20000;
    plan.warmup = 5.0;
    RngStream r(1, stream_id(StreamKind::SamplingTimes));
    const auto t = make_sampling_times(plan, r);
    ASSERT_EQ(t.size(), plan.n_samples);
    EXPECT_GT(t.front(), plan.warmup);
    for (std::size_t i = 1; i < t.size(); ++i) ASSERT_GT(t[i], t[i - 1]);
    EXPECT_NEAR((t.back() - plan.warmup) / plan.n_samples, 3.0, 0.05);
    SamplingPlan bad;
    bad.n_samples = 10;
    EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(Histogram, EdgeSamplesLandInTheirOwnBin) {
    const std::vector<double> e{0.1, 0.2, 0.3};
    const EnergyHistogram h = build_histogram(e, 3, 0.3);
    EXPECT_EQ(h.counts, (std::vector<std::uint64_t>{1, 1, 1}));
    EXPECT_EQ(h.overflow, 0u);
}

TEST(Histogram, OverflowAndDegenerate) {
    const std::vector<double> e{0.0, 1.0, 5.0, 11.0};
    const EnergyHistogram h = build_histogram(e, 5, 10.0);
    EXPECT_EQ(h.overflow, 1u);
    EXPECT_EQ(h.total, 4u);
    EXPECT_EQ(h.counts[0], 2u);
    EXPECT_DOUBLE_EQ(h.overflow_fraction(), 0.25);

    const std::vector<double> zeros(10, 0.0);
    const EnergyHistogram z = build_histogram(zeros, HistogramOptions{});
    EXPECT_TRUE(z.degenerate);
    EXPECT_THROW(fit_temperature(z), FitError);

    const std::vector<double> neg{1.0, -0.1};
    EXPECT_THROW(build_histogram(neg, 5, 1.0), ConfigError);
    EXPECT_THROW(build_histogram(std::vector<double>{}, 5, 1.0), FitError);
}

TEST(Histogram, ExponentialCountsMatchCdf) {
    const auto x = exponential_samples(5.0, 100000, 21);
    const EnergyHistogram h = build_histogram(x, 40, 40.0);
    for (std::size_t i = 0; i < 40; ++i) {
        const double expected = 1e5 * (std::exp(-h.edges[i] / 5.0) - std::exp(-h.edges[i + 1] / 5.0));
        EXPECT_LT(std::abs(static_cast<double>(h.counts[i]) - expected), 4.0 * std::sqrt(expected) + 1.0) << i;
    }
}

TEST(Histogram, CountsSumToTotal) {
    const auto x = exponential_samples(2.0, 5000, 3);
    const EnergyHistogram h = build_histogram(x, HistogramOptions{});
    std::uint64_t sum = 0;
    for (auto c : h.counts) sum += c;
    EXPECT_EQ(sum + h.overflow, h.total);
    EXPECT_EQ(h.total, x.size());
}

TEST(Fit, ExactLogLinearBins) {
    const TemperatureFit f = fit_temperature(exact_histogram(5.0, 1000.0));
    EXPECT_NEAR(f.temperature, 5.0, 0.02);
    EXPECT_LT(f.std_error, 0.1);
    EXPECT_EQ(f.n_bins_used, 20u);
    EXPECT_NEAR(f.slope, -0.2, 1e-3);
    EXPECT_NEAR(f.intercept, std::log(1000.0), 0.01);
}

TEST(Fit, ErrorShrinksWithSqrtCounts) {
    const EnergyHistogram h = exact_histogram(3.0, 500.0);
    EnergyHistogram h4 = h;
    for (auto& c : h4.counts) c *= 4;
    h4.total *= 4;
    const TemperatureFit a = fit_temperature(h);
    const TemperatureFit b = fit_temperature(h4);
    EXPECT_NEAR(a.temperature, b.temperature, 1e-12);
    EXPECT_NEAR(b.std_error, a.std_error / 2.0, 1e-12 * a.std_error);
}

TEST(Fit, TooFewBinsAndNonThermal) {
    EnergyHistogram h;
    h.edges = {0, 1, 2, 3, 4};
    h.counts = {5, 0, 7, 0};
    EXPECT_THROW(fit_temperature(h), FitError);
    h.counts = {1, 2, 4, 8};
    try {
        fit_temperature(h);
        FAIL();
    } catch (const NonThermalError& e) {
        EXPECT_GT(e.slope(), 0.0);
    }
}

TEST(Fit, RecoversSyntheticTemperatures) {
    for (double t : {1.0, 5.0, 10.0}) {
        const auto x = exponential_samples(t, 100000, static_cast<std::uint64_t>(t * 10));
        const TemperatureFit f = fit_energies(x);
        EXPECT_LT(std::abs(f.temperature - t), 3.0 * f.std_error) << t;
    }
}

TEST(Aggregate, InverseVarianceMean) {
    TemperatureFit a, b;
    a.temperature = 4.0;
    a.std_error = 1.0;
    b.temperature = 6.0;
    b.std_error = 2.0;
    const std::vector<TemperatureFit> ab{a, b}, ba{b, a};
    const TemperatureFit m = aggregate_seeds(ab);
    EXPECT_NEAR(m.temperature, 4.4, 1e-12);
    EXPECT_NEAR(m.std_error, 1.0 / std::sqrt(1.25), 1e-12);
    const TemperatureFit n = aggregate_seeds(ba);
    EXPECT_EQ(m.temperature, n.temperature);
    EXPECT_EQ(m.std_error, n.std_error);
    b.temperature = 5.0;
    b.std_error = 1.0;
    const TemperatureFit e = aggregate_seeds(std::vector<TemperatureFit>{b, b});
    EXPECT_DOUBLE_EQ(e.temperature, 5.0);
    EXPECT_DOUBLE_EQ(e.std_error, 1.0 / std::sqrt(2.0));
}

TEST(Aggregate, SingleFitUnchangedAndErrors) {
    TemperatureFit a;
    a.temperature = 3.0;
    a.std_error = 0.2;
    a.goodness = 1.5;
    a.n_bins_used = 17;
    const std::vector<TemperatureFit> one{a};
    const TemperatureFit m = aggregate_seeds(one);
    EXPECT_EQ(m.temperature, 3.0);
    EXPECT_EQ(m.std_error, 0.2);
    EXPECT_EQ(m.n_bins_used, 17u);
    EXPECT_THROW(aggregate_seeds(std::vector<TemperatureFit>{}), FitError);
    TemperatureFit z;
    z.std_error = 0.0;
    EXPECT_THROW(aggregate_seeds(std::vector<TemperatureFit>{a, z}), FitError);
}

TEST(BathTemperature, RecoversSampledTemperature) {
    BathSpec spec;
    spec.n_oscillators = 400;
    spec.temperature = 5.0;
    std::vector<BathRealization> rs;
    for (std::uint64_t s = 1; s <= 7; ++s) rs.push_back(realize_bath(spec, s));
    // 400 samples leave the tail bins sparse; the fit runs about 10% high there.
    const TemperatureFit f = bath_temperature(rs);
    EXPECT_NEAR(f.temperature, 5.0, 0.75);
    double lo = 1e9, hi = 0;
    for (const auto& r : rs) {
        const double t = bath_temperature(r).temperature;
        lo = std::min(lo, t);
        hi = std::max(hi, t);
    }
    EXPECT_GT(hi - lo, 0.1);
    spec.n_oscillators = 50;
    EXPECT_THROW(bath_temperature(realize_bath(spec, 1)), FitError);
}

TEST(BathTemperature, SampledEnergyMean) {
    BathSpec spec;
    spec.n_oscillators = 1000000;
    spec.temperature = 5.0;
    RngStream r(2, stream_id(StreamKind::Energies));
    const auto e = sample_energies(spec, r);
    EXPECT_NEAR(moments(e).mean, 5.0, 0.01);
}

TEST(Moments, ExponentialSkewness) {
    const auto x = exponential_samples(2.0, 400000, 8);
    const SampleMoments m = moments(x);
    EXPECT_NEAR(m.mean, 2.0, 0.02);
    EXPECT_NEAR(m.variance, 4.0, 0.1);
    EXPECT_NEAR(m.skewness, 2.0, 0.1);
}

TEST(Ks, SurvivalFunctionValues) {
    EXPECT_DOUBLE_EQ(kolmogorov_survival(0.0), 1.0);
    // Tabulated critical values: Q(1.358) = 0.05, Q(1.628) = 0.01.
    EXPECT_NEAR(kolmogorov_survival(1.3581), 0.05, 5e-4);
    EXPECT_NEAR(kolmogorov_survival(1.6276), 0.01, 2e-4);
    EXPECT_NEAR(kolmogorov_survival(0.5), 0.9639, 1e-4);
    EXPECT_LT(kolmogorov_survival(5.0), 1e-20);
}

TEST(Ks, OneSampleAcceptsTrueAndRejectsWrongLaw) {
    const auto x = exponential_samples(1.0, 5000, 4);
    const KsResult good = ks_one_sample(x, [](double e) { return 1.0 - std::exp(-e); });
    const KsResult bad = ks_one_sample(x, [](double e) { return 1.0 - std::exp(-e / 1.2); });
    EXPECT_GT(good.p_value, 0.01);
    EXPECT_LT(bad.p_value, 1e-6);
    EXPECT_EQ(good.effective_n, 5000u);
}

TEST(Ks, TwoSample) {
    const auto a = exponential_samples(1.0, 4000, 10);
    const auto b = exponential_samples(1.0, 3000, 11);
    const auto c = exponential_samples(1.3, 3000, 12);
    EXPECT_GT(ks_two_sample(a, b).p_value, 0.01);
    EXPECT_LT(ks_two_sample(a, c).p_value, 1e-6);
    EXPECT_EQ(ks_two_sample(a, b).effective_n, 4000u * 3000u / 7000u);
    const KsResult same = ks_two_sample(a, a);
    EXPECT_EQ(same.statistic, 0.0);
    EXPECT_DOUBLE_EQ(same.p_value, 1.0);
}

TEST(Ks, StatisticIsExactForSmallSample) {
    // Samples 0.25, 0.5 against U(0,1): D = max(0.5-0.25, 1-0.5, ...) = 0.5.
    const std::vector<double> x{0.5, 0.25};
    const KsResult r = ks_one_sample(x, [](double u) { return std::clamp(u, 0.0, 1.0); });
    EXPECT_DOUBLE_EQ(r.statistic, 0.5);
}
