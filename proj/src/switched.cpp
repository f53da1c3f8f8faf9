#include "thermo/switched.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "thermo/error.hpp"

namespace thermo {

void SwitchSchedule::validate() const {
    if (delta_t_steps < 1) throw ConfigError("delta_t_steps must be >= 1");
    if (!(step_size > 0.0) || !std::isfinite(step_size)) throw ConfigError("step size must be > 0");
    if (active_first != 0 && active_first != 1) throw ConfigError("active_first must be 0 or 1");
}

double default_step_size(double fastest_frequency) {
    if (!(fastest_frequency > 0.0)) throw ConfigError("fastest frequency must be > 0");
    return 2.0 * std::numbers::pi / fastest_frequency / 50.0;
}

SystemState TwoBathSystem::initial_state() const {
    const BathRealization baths[2] = {bath1, bath2};
    return thermo::initial_state(tp, baths);
}

TwoBathSystem build_switched_matrices(const TestParticleSpec& tp, const BathSpec& spec1, BathRealization bath1,
                                      const BathSpec& spec2, BathRealization bath2) {
    tp.validate();
    constexpr std::size_t kMaxOscillators = std::size_t{1} << 26;
    if (bath1.size() + bath2.size() > kMaxOscillators) {
        throw ConfigError("N1 + N2 = " + std::to_string(bath1.size() + bath2.size()) + " exceeds the supported maximum of " +
                          std::to_string(kMaxOscillators) + " oscillators");
    }
    TwoBathSystem s;
    s.tp = tp;
    s.spec1 = spec1;
    s.spec2 = spec2;
    s.bath1 = std::move(bath1);
    s.bath2 = std::move(bath2);
    const BathView first[2] = {{spec1.mass, s.bath1.frequencies, true}, {spec2.mass, s.bath2.frequencies, false}};
    const BathView second[2] = {{spec1.mass, s.bath1.frequencies, false}, {spec2.mass, s.bath2.frequencies, true}};
    s.a1 = build_coupling_matrix(tp, first);
    s.a2 = build_coupling_matrix(tp, second);
    return s;
}

Rk4Integrator::Rk4Integrator(std::size_t n_bath, simd::Level level) : kernels_(&simd::kernels(level)) {
    for (int i = 0; i < 4; ++i) {
        kq_[i].resize(n_bath);
        kp_[i].resize(n_bath);
    }
}

void Rk4Integrator::step(const CouplingMatrix& a, SystemState& s, double dt) {
    const std::size_t n = a.n_bath();
    if (s.n_bath() != n || kq_[0].size() != n) {
        throw DimensionError("RK4 state has " + std::to_string(s.n_bath()) + " bath oscillators, matrix has " +
                             std::to_string(n));
    }
    const double inv_mass = 1.0 / a.test_mass;
    const double self = a.test_self_term();
    const double* q = s.bath_q.data();
    const double* p = s.bath_p.data();
    const auto& k = *kernels_;

    const double h[4] = {0.0, 0.5 * dt, 0.5 * dt, dt};
    double dQ[4], dP[4];
    for (int stage = 0; stage < 4; ++stage) {
        const double hs = h[stage];
        const double Qs = stage == 0 ? s.test_q : s.test_q + hs * dQ[stage - 1];
        const double Ps = stage == 0 ? s.test_p : s.test_p + hs * dP[stage - 1];
        const double* dq_in = stage == 0 ? nullptr : kq_[stage - 1].data();
        const double* dp_in = stage == 0 ? nullptr : kp_[stage - 1].data();
        const double force = k.rk_stage(n, q, p, dq_in, dp_in, hs, Qs, a.inv_mass.data(), a.coupling.data(),
                                        a.stiffness.data(), kq_[stage].data(), kp_[stage].data());
        dQ[stage] = Ps * inv_mass;
        dP[stage] = self * Qs + force;
    }
    const double c = dt / 6.0;
    k.rk_combine(n, s.bath_q.data(), kq_[0].data(), kq_[1].data(), kq_[2].data(), kq_[3].data(), c);
    k.rk_combine(n, s.bath_p.data(), kp_[0].data(), kp_[1].data(), kp_[2].data(), kp_[3].data(), c);
    s.test_q += c * (dQ[0] + 2.0 * dQ[1] + 2.0 * dQ[2] + dQ[3]);
    s.test_p += c * (dP[0] + 2.0 * dP[1] + 2.0 * dP[2] + dP[3]);
    s.time += dt;
    if (!std::isfinite(s.test_q) || !std::isfinite(s.test_p)) {
        throw NumericalError("numerical blow-up: non-finite test particle state at t=" + std::to_string(s.time));
    }
}

SystemState rk4_step(const CouplingMatrix& a, const SystemState& state, double dt, simd::Level level) {
    if (!(dt > 0.0)) throw ConfigError("dt must be > 0");
    SystemState out = state;
    Rk4Integrator integrator(a.n_bath(), level);
    integrator.step(a, out, dt);
    return out;
}

SwitchedRun run_switched(const CouplingMatrix& first, const CouplingMatrix& second, const SystemState& initial,
                         const SwitchSchedule& schedule, double t_final, std::span<const double> observation_times,
                         const StateObserver& observer, simd::Level level) {
    schedule.validate();
    if (!(t_final > 0.0) || !std::isfinite(t_final)) throw ConfigError("t_final must be > 0");
    if (first.n_bath() != second.n_bath() || first.n_bath() != initial.n_bath()) {
        throw DimensionError("switched matrices and initial state disagree on the number of bath oscillators");
    }
    const double dt = schedule.step_size;

    std::vector<std::size_t> obs_step(observation_times.size());
    for (std::size_t i = 0; i < observation_times.size(); ++i) {
        const double t = observation_times[i];
        if (!(t >= 0.0) || !std::isfinite(t)) throw ConfigError("observation times must be finite and >= 0");
        if (i > 0 && t < observation_times[i - 1]) throw ConfigError("observation times must be non-decreasing");
        obs_step[i] = static_cast<std::size_t>(std::llround(t / dt));
    }
    std::size_t total_steps = static_cast<std::size_t>(std::llround(t_final / dt));
    if (!obs_step.empty()) total_steps = std::max(total_steps, obs_step.back());

    SwitchedRun run;
    run.samples.reserve(observation_times.size());
    SystemState state = initial;
    state.time = 0.0;
    Rk4Integrator integrator(initial.n_bath(), level);

    std::size_t next_obs = 0;
    auto record = [&](std::size_t step) {
        while (next_obs < obs_step.size() && obs_step[next_obs] == step) {
            TrajectorySample smp;
            smp.requested_time = observation_times[next_obs];
            smp.time = static_cast<double>(step) * dt;
            smp.q = state.test_q;
            smp.p = state.test_p;
            run.max_snap = std::max(run.max_snap, std::abs(smp.time - smp.requested_time));
            run.samples.push_back(smp);
            if (observer) observer(next_obs, state);
            ++next_obs;
        }
    };

    record(0);
    for (std::size_t step = 0; step < total_steps; ++step) {
        const CouplingMatrix& a = schedule.active_bath(step) == 0 ? first : second;
        integrator.step(a, state, dt);
        // Grid time, free of accumulated rounding.
        state.time = static_cast<double>(step + 1) * dt;
        record(step + 1);
    }
    run.steps = total_steps;
    for (std::size_t i = 0; i < state.n_bath(); ++i) {
        if (!std::isfinite(state.bath_q[i]) || !std::isfinite(state.bath_p[i])) {
            throw NumericalError("numerical blow-up: non-finite bath coordinate at end of run");
        }
    }
    run.final_state = std::move(state);
    return run;
}

SwitchedRun run_switched(const TwoBathSystem& system, const SwitchSchedule& schedule, double t_final,
                         std::span<const double> observation_times, const StateObserver& observer, simd::Level level) {
    return run_switched(system.a1, system.a2, system.initial_state(), schedule, t_final, observation_times, observer,
                        level);
}

}  // namespace thermo
