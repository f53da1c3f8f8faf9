#pragma once

#include <functional>
#include <span>
#include <vector>

#include "thermo/coupling.hpp"
#include "thermo/model.hpp"
#include "thermo/simd/kernels.hpp"

namespace thermo {

/// Square-wave contact schedule: bath 1 coupled during steps
/// [2k dT, (2k+1) dT), bath 2 during [(2k+1) dT, (2k+2) dT), with dT counted
/// in integrator steps. Switching happens only on step boundaries.
struct SwitchSchedule {
    std::size_t delta_t_steps = 1;
    double step_size = 0.01;
    /// 0 when bath 1 is coupled first, 1 for bath 2.
    int active_first = 0;

    void validate() const;
    /// Index (0 or 1) of the bath coupled during step s.
    int active_bath(std::size_t step) const {
        const std::size_t phase = (step / delta_t_steps) % 2;
        return static_cast<int>(phase) ^ active_first;
    }
};

/// Default step: 50 steps per period of the fastest bath oscillator.
double default_step_size(double fastest_frequency);

struct TwoBathSystem {
    TestParticleSpec tp;
    BathSpec spec1, spec2;
    BathRealization bath1, bath2;
    CouplingMatrix a1;  // bath 1 coupled, bath 2 free
    CouplingMatrix a2;  // bath 2 coupled, bath 1 free

    SystemState initial_state() const;
    std::size_t n1() const { return bath1.size(); }
    std::size_t n2() const { return bath2.size(); }
};

/// Builds A1 and A2 over the common coordinate vector (Q, P, bath 1, bath 2).
/// bath2 may be empty (N2 = 0).
TwoBathSystem build_switched_matrices(const TestParticleSpec& tp, const BathSpec& spec1, BathRealization bath1,
                                      const BathSpec& spec2, BathRealization bath2);

/// Classical RK4 integrator for v' = A v over an arrowhead matrix, reusing its
/// stage buffers between steps.
class Rk4Integrator {
public:
    explicit Rk4Integrator(std::size_t n_bath, simd::Level level = simd::active_level());

    /// Advances the state by dt with the given matrix. Throws NumericalError
    /// when the test-particle coordinates become non-finite.
    void step(const CouplingMatrix& a, SystemState& state, double dt);

private:
    const simd::KernelTable* kernels_;
    std::vector<double> kq_[4], kp_[4];
};

/// One RK4 step; allocates its own buffers.
SystemState rk4_step(const CouplingMatrix& a, const SystemState& state, double dt,
                     simd::Level level = simd::active_level());

struct TrajectorySample {
    double requested_time = 0.0;
    double time = 0.0;  // snapped to the step grid
    double q = 0.0;
    double p = 0.0;
};

struct SwitchedRun {
    std::vector<TrajectorySample> samples;
    SystemState final_state;
    std::size_t steps = 0;
    double max_snap = 0.0;  // largest |time - requested_time|, <= dt/2
};

using StateObserver = std::function<void(std::size_t sample_index, const SystemState& state)>;

/// Integrates from `initial` to t_final (or the last observation time,
/// whichever is later), alternating between `first` and `second` as the
/// schedule dictates. Observation times must be non-decreasing and >= 0;
/// each is snapped to the nearest step.
SwitchedRun run_switched(const CouplingMatrix& first, const CouplingMatrix& second, const SystemState& initial,
                         const SwitchSchedule& schedule, double t_final, std::span<const double> observation_times,
                         const StateObserver& observer = {}, simd::Level level = simd::active_level());

SwitchedRun run_switched(const TwoBathSystem& system, const SwitchSchedule& schedule, double t_final,
                         std::span<const double> observation_times, const StateObserver& observer = {},
                         simd::Level level = simd::active_level());

}  // namespace thermo
