#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "thermo/bath.hpp"
#include "thermo/coupling.hpp"
#include "thermo/eigen_propagator.hpp"
#include "thermo/error.hpp"
#include "thermo/simd/kernels.hpp"
#include "thermo/switched.hpp"

using namespace thermo;

namespace {

struct Fixture {
    TestParticleSpec tp;
    BathSpec spec;
    BathRealization bath;
    std::vector<BathView> views;
    CouplingMatrix a;
    SystemState v0;
};

Fixture make_fixture(std::size_t n, double omega, std::uint64_t seed = 1) {
    Fixture f;
    f.tp = {1.0, omega, 0.4, -0.3};
    f.spec.n_oscillators = n;
    f.spec.mass = 0.01;
    f.spec.temperature = 1.0;
    f.bath = realize_bath(f.spec, seed);
    f.views = {{f.spec.mass, f.bath.frequencies, true}};
    f.a = build_coupling_matrix(f.tp, f.views);
    const BathRealization bs[] = {f.bath};
    f.v0 = initial_state(f.tp, bs);
    return f;
}

double max_abs_diff(const SystemState& a, const SystemState& b) {
    double d = std::max(std::abs(a.test_q - b.test_q), std::abs(a.test_p - b.test_p));
    for (std::size_t i = 0; i < a.n_bath(); ++i) {
        d = std::max({d, std::abs(a.bath_q[i] - b.bath_q[i]), std::abs(a.bath_p[i] - b.bath_p[i])});
    }
    return d;
}

}  // namespace

TEST(Eigen, ReproducesInitialState) {
    for (auto method : {Diagonalization::NormalMode, Diagonalization::Complex}) {
        const Fixture f = make_fixture(20, 0.6);
        const EigenPropagator prop = EigenPropagator::diagonalize(f.a, f.v0, {method});
        EXPECT_LT(max_abs_diff(prop.full_state(0.0), f.v0), 1e-10) << to_string(method);
        const simd::QP qp = prop.observe(0.0);
        EXPECT_NEAR(qp.q, f.v0.test_q, 1e-10);
        EXPECT_NEAR(qp.p, f.v0.test_p, 1e-10);
        EXPECT_LT(prop.reconstruction_error(), 1e-10);
    }
}

TEST(Eigen, ConservesEnergy) {
    const Fixture f = make_fixture(100, 0.5);
    const EigenPropagator prop = EigenPropagator::diagonalize(f.a, f.v0);
    const double e0 = total_energy(f.v0, f.tp, f.views);
    for (double t : {1.0, 137.0, 2500.0, 1e4}) {
        const double e = total_energy(prop.full_state(t), f.tp, f.views);
        EXPECT_LT(std::abs(e - e0) / e0, 1e-9) << t;
    }
}

TEST(Eigen, RoutesAgree) {
    const Fixture f = make_fixture(30, 0.8, 4);
    const EigenPropagator nm = EigenPropagator::diagonalize(f.a, f.v0, {Diagonalization::NormalMode});
    const EigenPropagator cx = EigenPropagator::diagonalize(f.a, f.v0, {Diagonalization::Complex});
    for (double t : {0.5, 10.0, 300.0}) {
        const auto a = nm.observe(t);
        const auto b = cx.observe(t);
        EXPECT_NEAR(a.q, b.q, 1e-8);
        EXPECT_NEAR(a.p, b.p, 1e-8);
        const auto im = cx.imaginary_residue(t);
        EXPECT_LT(std::abs(im.q) + std::abs(im.p), 1e-8);
        EXPECT_NO_THROW(cx.observe_checked(t));
    }
    auto fa = nm.mode_frequencies();
    auto fb = cx.mode_frequencies();
    std::sort(fa.begin(), fa.end());
    std::sort(fb.begin(), fb.end());
    ASSERT_EQ(fa.size(), fb.size());
    for (std::size_t i = 0; i < fa.size(); ++i) EXPECT_NEAR(fa[i], fb[i], 1e-9);
}

TEST(Eigen, IsolatedOscillatorClosedForm) {
    TestParticleSpec tp{2.0, 1.5, 0.7, 0.2};
    const CouplingMatrix a = build_coupling_matrix(tp, std::span<const BathView>{});
    SystemState v0;
    v0.test_q = tp.q0;
    v0.test_p = tp.p0;
    const EigenPropagator prop = EigenPropagator::diagonalize(a, v0);
    for (double t : {0.3, 5.0, 100.0}) {
        const double q = tp.q0 * std::cos(1.5 * t) + tp.p0 / (2.0 * 1.5) * std::sin(1.5 * t);
        EXPECT_NEAR(prop.observe(t).q, q, 1e-12);
    }
}

TEST(Eigen, FreeParticleDrifts) {
    // Omega = 0 with no bath: a zero-frequency mode.
    TestParticleSpec tp{1.0, 0.0, 0.5, 0.25};
    const CouplingMatrix a = build_coupling_matrix(tp, std::span<const BathView>{});
    SystemState v0;
    v0.test_q = tp.q0;
    v0.test_p = tp.p0;
    const EigenPropagator prop = EigenPropagator::diagonalize(a, v0);
    EXPECT_NEAR(prop.observe(4.0).q, 1.5, 1e-12);
    EXPECT_NEAR(prop.observe(4.0).p, 0.25, 1e-12);
}

TEST(Eigen, DegenerateFrequenciesHandledByNormalModes) {
    TestParticleSpec tp{1.0, 0.99, 0.0, 1.0};
    std::vector<double> freqs(10, 1.0);
    std::vector<double> energies(10, 0.5), phases(10, 0.0);
    for (std::size_t i = 0; i < 10; ++i) phases[i] = i % 2 ? std::numbers::pi : 0.0;
    const BathRealization b = make_realization(1e-3, freqs, energies, phases);
    std::vector<BathView> views{{1e-3, b.frequencies, true}};
    const CouplingMatrix a = build_coupling_matrix(tp, views);
    const BathRealization bs[] = {b};
    const SystemState v0 = initial_state(tp, bs);
    const EigenPropagator prop = EigenPropagator::diagonalize(a, v0, {Diagonalization::NormalMode});
    const double e0 = total_energy(v0, tp, views);
    EXPECT_NEAR(total_energy(prop.full_state(250.0), tp, views), e0, 1e-9 * e0);
}

TEST(Rk4, IsolatedOscillatorMatchesClosedForm) {
    TestParticleSpec tp{1.0, 1.0, 1.0, 0.0};
    const CouplingMatrix a = build_coupling_matrix(tp, std::span<const BathView>{});
    SystemState s;
    s.test_q = 1.0;
    Rk4Integrator rk(0);
    for (int i = 0; i < 10000; ++i) rk.step(a, s, 0.01);
    EXPECT_NEAR(s.test_q, std::cos(100.0), 1e-6);
    EXPECT_NEAR(s.test_p, -std::sin(100.0), 1e-6);
}

TEST(Rk4, FourthOrderConvergence) {
    const Fixture f = make_fixture(20, 0.7, 2);
    const EigenPropagator exact = EigenPropagator::diagonalize(f.a, f.v0);
    const double t_end = 20.0;
    const double q_ref = exact.observe(t_end).q;
    std::vector<double> errors;
    for (double dt : {0.04, 0.02, 0.01}) {
        SystemState s = f.v0;
        Rk4Integrator rk(s.n_bath());
        const int steps = static_cast<int>(std::lround(t_end / dt));
        for (int i = 0; i < steps; ++i) rk.step(f.a, s, dt);
        errors.push_back(std::abs(s.test_q - q_ref));
    }
    EXPECT_NEAR(std::log2(errors[0] / errors[1]), 4.0, 0.3);
    EXPECT_NEAR(std::log2(errors[1] / errors[2]), 4.0, 0.3);
}

TEST(Rk4, BlowUpIsReported) {
    TestParticleSpec tp{1.0, 1.0, 1.0, 0.0};
    const CouplingMatrix a = build_coupling_matrix(tp, std::span<const BathView>{});
    SystemState s;
    s.test_q = 1.0;
    Rk4Integrator rk(0);
    EXPECT_THROW(
        {
            for (int i = 0; i < 2000; ++i) rk.step(a, s, 10.0);
        },
        NumericalError);
}

TEST(Switched, IdenticalMatricesEqualContinuousRun) {
    const Fixture f = make_fixture(15, 0.5, 3);
    const double dt = 0.01;
    std::vector<double> obs{0.0, 0.5, 1.234, 3.0};
    for (std::size_t dT : {1u, 7u}) {
        const SwitchedRun run = run_switched(f.a, f.a, f.v0, {dT, dt, 0}, 3.0, obs);
        SystemState s = f.v0;
        Rk4Integrator rk(s.n_bath());
        for (int i = 0; i < 300; ++i) rk.step(f.a, s, dt);
        EXPECT_EQ(run.steps, 300u);
        EXPECT_EQ(run.final_state.test_q, s.test_q);
        EXPECT_EQ(run.final_state.test_p, s.test_p);
        EXPECT_EQ(run.final_state.bath_q, s.bath_q);
        EXPECT_EQ(run.final_state.bath_p, s.bath_p);
        ASSERT_EQ(run.samples.size(), obs.size());
        EXPECT_LE(run.max_snap, dt / 2 + 1e-15);
        EXPECT_NEAR(run.samples[2].time, 1.23, 1e-12);
    }
}

TEST(Switched, ScheduleAlternates) {
    SwitchSchedule s{3, 0.1, 0};
    const int expected[] = {0, 0, 0, 1, 1, 1, 0, 0, 0, 1};
    for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(s.active_bath(i), expected[i]);
    SwitchSchedule bad{0, 0.1, 0};
    EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(Switched, FreeBathEvolvesUncoupled) {
    // With bath 2 never coupled, its oscillators rotate freely.
    TestParticleSpec tp{1.0, 0.5, 0.2, 0.0};
    BathSpec s1, s2;
    s1.n_oscillators = 10;
    s2.n_oscillators = 6;
    s1.mass = s2.mass = 0.01;
    const TwoBathSystem sys =
        build_switched_matrices(tp, s1, realize_bath(s1, 1, 0), s2, realize_bath(s2, 1, 1));
    EXPECT_EQ(sys.a1.n_bath(), 16u);
    const SwitchedRun run = run_switched(sys.a1, sys.a1, sys.initial_state(), {1, 0.001, 0}, 2.0, {});
    for (std::size_t n = 0; n < sys.n2(); ++n) {
        const double w = sys.bath2.frequencies[n];
        const double q0 = sys.bath2.positions[n], p0 = sys.bath2.momenta[n];
        const double q = q0 * std::cos(w * 2.0) + p0 / (s2.mass * w) * std::sin(w * 2.0);
        EXPECT_NEAR(run.final_state.bath_q[10 + n], q, 1e-9 * (1 + std::abs(q)));
    }
}

TEST(Switched, StepSizeAndErrors) {
    EXPECT_NEAR(default_step_size(1.0), 2 * std::numbers::pi / 50, 1e-15);
    const Fixture f = make_fixture(4, 0.5);
    std::vector<double> bad{1.0, 0.5};
    EXPECT_THROW(run_switched(f.a, f.a, f.v0, {1, 0.01, 0}, 2.0, bad), ConfigError);
    SystemState wrong = f.v0;
    wrong.bath_q.pop_back();
    wrong.bath_p.pop_back();
    EXPECT_THROW(run_switched(f.a, f.a, wrong, {1, 0.01, 0}, 2.0, {}), DimensionError);
}

class SimdEquivalence : public ::testing::Test {
protected:
    void SetUp() override {
        if (!simd::available(simd::Level::Avx2)) GTEST_SKIP() << "AVX2 not available";
    }
};

TEST_F(SimdEquivalence, ObserveKernel) {
    const Fixture f = make_fixture(101, 0.5, 9);
    const EigenPropagator prop = EigenPropagator::diagonalize(f.a, f.v0);
    for (double t : {0.0, 3.3, 1234.5, 98765.4}) {
        const auto s = prop.observe(t, simd::Level::Scalar);
        const auto v = prop.observe(t, simd::Level::Avx2);
        EXPECT_NEAR(s.q, v.q, 1e-11 * (1 + std::abs(s.q)));
        EXPECT_NEAR(s.p, v.p, 1e-11 * (1 + std::abs(s.p)));
    }
}

TEST_F(SimdEquivalence, SincosKernel) {
    std::vector<double> x(37), s1(37), c1(37), s2(37), c2(37);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = -500.0 + 27.3 * static_cast<double>(i);
    simd::kernels(simd::Level::Scalar).sincos(x.data(), s1.data(), c1.data(), x.size());
    simd::kernels(simd::Level::Avx2).sincos(x.data(), s2.data(), c2.data(), x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        EXPECT_NEAR(s1[i], std::sin(x[i]), 1e-14);
        EXPECT_NEAR(s2[i], s1[i], 1e-14);
        EXPECT_NEAR(c2[i], c1[i], 1e-14);
    }
}

TEST_F(SimdEquivalence, Rk4Trajectory) {
    const Fixture f = make_fixture(53, 0.5, 5);
    std::vector<double> obs{10.0, 50.0};
    const SwitchedRun a = run_switched(f.a, f.a, f.v0, {1, 0.01, 0}, 50.0, obs, {}, simd::Level::Scalar);
    const SwitchedRun b = run_switched(f.a, f.a, f.v0, {1, 0.01, 0}, 50.0, obs, {}, simd::Level::Avx2);
    EXPECT_LT(max_abs_diff(a.final_state, b.final_state), 1e-11);
    EXPECT_NEAR(a.samples[1].q, b.samples[1].q, 1e-12);
}

TEST(Simd, LevelNames) {
    EXPECT_EQ(simd::level_from_string("scalar"), simd::Level::Scalar);
    EXPECT_EQ(simd::level_from_string("avx2"), simd::Level::Avx2);
    EXPECT_THROW(simd::level_from_string("sse9"), ConfigError);
    EXPECT_TRUE(simd::available(simd::Level::Scalar));
}
