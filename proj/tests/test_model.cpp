#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "thermo/bath.hpp"
#include "thermo/coupling.hpp"
#include "thermo/error.hpp"
#include "thermo/model.hpp"
#include "thermo/rng.hpp"

using namespace thermo;

namespace {

BathSpec small_bath(std::size_t n = 50) {
    BathSpec b;
    b.n_oscillators = n;
    b.mass = 0.01;
    b.temperature = 2.0;
    return b;
}

}  // namespace

TEST(TestParticle, RejectsBadValues) {
    TestParticleSpec tp;
    tp.mass = 0.0;
    EXPECT_THROW(tp.validate(), ConfigError);
    tp.mass = 1.0;
    tp.omega = -1.0;
    EXPECT_THROW(tp.validate(), ConfigError);
    tp.omega = 0.0;
    EXPECT_NO_THROW(tp.validate());
}

TEST(Dos, CutoffOrderErrorNamesBothKeys) {
    DensityOfStates d;
    d.omega_ir = 2.0;
    d.omega_uv = 1.0;
    try {
        d.validate();
        FAIL();
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("omega_ir"), std::string::npos);
        EXPECT_NE(msg.find("omega_uv"), std::string::npos);
    }
}

TEST(Dos, FamiliesAreNormalizedAndInvertible) {
    for (auto fam : {DosFamily::Uniform, DosFamily::InverseSquare, DosFamily::Square}) {
        DensityOfStates d{fam, 0.2, 1.0};
        // Trapezoid integral of the pdf.
        const int n = 20000;
        double integral = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double w = 0.2 + 0.8 * i / n;
            integral += (i == 0 || i == n ? 0.5 : 1.0) * d.pdf(w) * 0.8 / n;
        }
        EXPECT_NEAR(integral, 1.0, 1e-6) << to_string(fam);
        for (double u : {0.0, 0.1, 0.5, 0.9, 1.0}) {
            const double w = d.quantile(u);
            EXPECT_GE(w, 0.2);
            EXPECT_LE(w, 1.0);
            EXPECT_NEAR(d.cdf(w), u, 1e-12);
        }
        EXPECT_EQ(d.pdf(0.1), 0.0);
        EXPECT_EQ(d.pdf(1.1), 0.0);
        EXPECT_EQ(dos_family_from_string(to_string(fam)), fam);
    }
    EXPECT_THROW(dos_family_from_string("lorentzian"), ConfigError);
}

TEST(Dos, UniformMoments) {
    DensityOfStates d{DosFamily::Uniform, 0.2, 1.0};
    EXPECT_NEAR(d.mean(), 0.6, 1e-14);
    EXPECT_NEAR(d.mean_square(), (1.0 - 0.008) / (3.0 * 0.8), 1e-14);
}

TEST(Rng, CounterBasedAndStreamSeparated) {
    RngStream a(42, stream_id(StreamKind::Energies));
    RngStream b(42, stream_id(StreamKind::Energies));
    RngStream c(42, stream_id(StreamKind::Phases));
    RngStream d(43, stream_id(StreamKind::Energies));
    bool differs_c = false, differs_d = false;
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next_u64();
        EXPECT_EQ(x, b.next_u64());
        differs_c |= x != c.next_u64();
        differs_d |= x != d.next_u64();
    }
    EXPECT_TRUE(differs_c);
    EXPECT_TRUE(differs_d);
    EXPECT_NE(stream_id(StreamKind::Energies, 0), stream_id(StreamKind::Energies, 1));
}

TEST(Rng, UniformAndNormalMoments) {
    RngStream r(7, 99);
    const int n = 200000;
    double su = 0, sn = 0, sn2 = 0;
    for (int i = 0; i < n; ++i) {
        const double u = r.uniform_open();
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
        su += u;
        const double z = r.normal();
        sn += z;
        sn2 += z * z;
    }
    EXPECT_NEAR(su / n, 0.5, 0.003);
    EXPECT_NEAR(sn / n, 0.0, 0.01);
    EXPECT_NEAR(sn2 / n, 1.0, 0.01);
}

TEST(Bath, RealizationIsDeterministic) {
    const BathSpec spec = small_bath();
    const BathRealization a = realize_bath(spec, 11);
    const BathRealization b = realize_bath(spec, 11);
    const BathRealization c = realize_bath(spec, 12);
    EXPECT_EQ(a.frequencies, b.frequencies);
    EXPECT_EQ(a.positions, b.positions);
    EXPECT_EQ(a.momenta, b.momenta);
    EXPECT_NE(a.energies, c.energies);
}

TEST(Bath, BathSizeDoesNotShiftOtherStreams) {
    // The first draws of a larger bath reproduce the smaller one.
    const BathRealization a = realize_bath(small_bath(20), 5);
    const BathRealization b = realize_bath(small_bath(40), 5);
    for (std::size_t i = 0; i < 20; ++i) {
        EXPECT_EQ(a.frequencies[i], b.frequencies[i]);
        EXPECT_EQ(a.energies[i], b.energies[i]);
    }
}

TEST(Bath, PhaseSpaceMatchesSampledEnergies) {
    const BathSpec spec = small_bath();
    const BathRealization r = realize_bath(spec, 3);
    const auto e = r.phase_space_energies(spec.mass);
    for (std::size_t i = 0; i < r.size(); ++i) {
        EXPECT_NEAR(e[i], r.energies[i], 1e-12 * (1.0 + r.energies[i]));
        EXPECT_GE(r.frequencies[i], spec.dos.omega_ir);
        EXPECT_LE(r.frequencies[i], spec.dos.omega_uv);
    }
}

TEST(Bath, RandomPhasesNearlyCancel) {
    BathSpec spec = small_bath(4000);
    const BathRealization r = realize_bath(spec, 8);
    const PhaseSums s = symmetrize_check(r);
    // Each term has zero mean; the sums grow like sqrt(N) times a typical amplitude.
    double rms_q = 0, rms_p = 0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        rms_q += r.positions[i] * r.positions[i];
        rms_p += r.momenta[i] * r.momenta[i];
    }
    EXPECT_LT(std::abs(s.sum_q), 4.0 * std::sqrt(rms_q));
    EXPECT_LT(std::abs(s.sum_p), 4.0 * std::sqrt(rms_p));
}

TEST(Bath, MakeRealizationChecksLengths) {
    std::vector<double> phases{0.0};
    EXPECT_THROW(make_realization(1.0, {1.0, 2.0}, {1.0, 1.0}, phases), DimensionError);
}

TEST(State, VectorRoundTrip) {
    SystemState s;
    s.test_q = 1;
    s.test_p = 2;
    s.bath_q = {3, 5};
    s.bath_p = {4, 6};
    const auto v = s.to_vector();
    EXPECT_EQ(v, (std::vector<double>{1, 2, 3, 4, 5, 6}));
    const SystemState t = SystemState::from_vector(v);
    EXPECT_EQ(t.bath_q, s.bath_q);
    EXPECT_EQ(t.bath_p, s.bath_p);
    std::vector<double> odd{1, 2, 3};
    EXPECT_THROW(SystemState::from_vector(odd), DimensionError);
}

TEST(State, TotalEnergyDimensionMismatch) {
    TestParticleSpec tp;
    SystemState s;
    s.bath_q = {0.0};
    s.bath_p = {0.0};
    std::vector<double> freqs{1.0, 2.0};
    std::vector<BathView> views{{0.01, freqs, true}};
    EXPECT_THROW(total_energy(s, tp, views), DimensionError);
}

TEST(Coupling, ApplyMatchesDense) {
    TestParticleSpec tp{1.3, 0.7, 0.0, 0.0};
    const BathRealization b1 = realize_bath(small_bath(7), 1);
    const BathRealization b2 = realize_bath(small_bath(5), 2, 1);
    std::vector<BathView> views{{0.01, b1.frequencies, true}, {0.02, b2.frequencies, false}};
    const CouplingMatrix a = build_coupling_matrix(tp, views);
    ASSERT_EQ(a.dimension(), 26u);
    RngStream r(1, 1);
    std::vector<double> v(a.dimension());
    for (auto& x : v) x = r.uniform(-1, 1);
    const auto fast = a.apply(v);
    const Eigen::VectorXd dense = a.dense() * Eigen::Map<const Eigen::VectorXd>(v.data(), v.size());
    for (std::size_t i = 0; i < v.size(); ++i) EXPECT_NEAR(fast[i], dense[i], 1e-14);

    double sum_c = 0;
    for (double w : b1.frequencies) sum_c += 0.01 * w * w;
    EXPECT_NEAR(a.coupled_stiffness(), sum_c, 1e-14);
    EXPECT_NEAR(a.test_self_term(), -(1.3 * 0.49 + sum_c), 1e-14);
}

TEST(Coupling, HamiltonEquationsMatchTotalEnergy) {
    // dq/dt = dH/dp and dp/dt = -dH/dq, checked by central differences of H.
    TestParticleSpec tp{1.0, 0.5, 0.3, -0.2};
    const BathRealization b = realize_bath(small_bath(9), 4);
    const BathRealization bs[] = {b};
    const SystemState s = initial_state(tp, bs);
    std::vector<BathView> views{{0.01, b.frequencies, true}};
    const CouplingMatrix a = build_coupling_matrix(tp, views);
    const auto v = s.to_vector();
    const auto dv = a.apply(v);
    const double h = 1e-4;
    for (std::size_t i = 0; i < v.size(); ++i) {
        auto plus = v, minus = v;
        plus[i] += h;
        minus[i] -= h;
        const double grad = (total_energy(SystemState::from_vector(plus), tp, views) -
                             total_energy(SystemState::from_vector(minus), tp, views)) /
                            (2 * h);
        const double expected = i % 2 == 0 ? -dv[i + 1] : dv[i - 1];
        EXPECT_NEAR(grad, expected, 1e-8 * (1.0 + std::abs(expected))) << i;
    }
}
