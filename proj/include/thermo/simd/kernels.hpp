#pragma once

// Data-parallel inner loops of the propagators. Every kernel has a scalar
// reference implementation; vector variants are compiled separately with
// their own target flags and picked at runtime from the CPU features. The
// THERMO_SIMD_LEVEL environment variable ("scalar", "avx2") overrides the
// automatic choice.
//
// Results are deterministic for a fixed level. Different levels agree to
// rounding only (FMA contraction and summation order differ).

#include <cstddef>
#include <string_view>

namespace thermo::simd {

enum class Level { Scalar = 0, Avx2 = 1 };

std::string_view to_string(Level level);
Level level_from_string(std::string_view name);

/// True when the variant was compiled in and the CPU supports it.
bool available(Level level);
/// Best available level on this machine.
Level detected_level();
/// Level used by kernels(); honours THERMO_SIMD_LEVEL on first use.
Level active_level();
/// Overrides the active level. Throws ConfigError when unavailable.
void set_active_level(Level level);

struct QP {
    double q = 0.0;
    double p = 0.0;
};

struct KernelTable {
    /// Sum over modes k of (q_cos[k] cos(w_k t) + q_sin[k] sin(w_k t)) and the
    /// same for p. O(n) observation of the test particle.
    QP (*observe)(const double* freq, const double* q_cos, const double* q_sin, const double* p_cos,
                  const double* p_sin, std::size_t n, double t);

    /// One Runge-Kutta stage for the bath block of an arrowhead system.
    /// Evaluates at x = q + h*dq_in, y = p + h*dp_in (dq_in/dp_in may be null
    /// when h == 0):
    ///   dq_out = inv_m * y,  dp_out = coupling * q_test - stiffness * x
    /// and returns sum(coupling * x), the bath force on the test particle.
    double (*rk_stage)(std::size_t n, const double* q, const double* p, const double* dq_in, const double* dp_in,
                       double h, double q_test, const double* inv_m, const double* coupling,
                       const double* stiffness, double* dq_out, double* dp_out);

    /// x += c * (k1 + 2 k2 + 2 k3 + k4)
    void (*rk_combine)(std::size_t n, double* x, const double* k1, const double* k2, const double* k3,
                       const double* k4, double c);

    /// Elementwise sin and cos.
    void (*sincos)(const double* x, double* s, double* c, std::size_t n);
};

const KernelTable& kernels(Level level);
inline const KernelTable& kernels() { return kernels(active_level()); }

namespace detail {
extern const KernelTable scalar_table;
#if defined(THERMO_HAVE_AVX2)
extern const KernelTable avx2_table;
#endif
}  // namespace detail

}  // namespace thermo::simd
