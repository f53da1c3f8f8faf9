#include <cmath>

#include "thermo/simd/kernels.hpp"

namespace thermo::simd {
namespace {

QP observe_scalar(const double* freq, const double* q_cos, const double* q_sin, const double* p_cos,
                  const double* p_sin, std::size_t n, double t) {
    QP out;
    for (std::size_t k = 0; k < n; ++k) {
        const double arg = freq[k] * t;
        const double c = std::cos(arg);
        const double s = std::sin(arg);
        out.q += q_cos[k] * c + q_sin[k] * s;
        out.p += p_cos[k] * c + p_sin[k] * s;
    }
    return out;
}

double rk_stage_scalar(std::size_t n, const double* q, const double* p, const double* dq_in, const double* dp_in,
                       double h, double q_test, const double* inv_m, const double* coupling,
                       const double* stiffness, double* dq_out, double* dp_out) {
    double force = 0.0;
    if (dq_in == nullptr || dp_in == nullptr) {
        for (std::size_t i = 0; i < n; ++i) {
            dq_out[i] = inv_m[i] * p[i];
            dp_out[i] = coupling[i] * q_test - stiffness[i] * q[i];
            force += coupling[i] * q[i];
        }
        return force;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double x = q[i] + h * dq_in[i];
        const double y = p[i] + h * dp_in[i];
        dq_out[i] = inv_m[i] * y;
        dp_out[i] = coupling[i] * q_test - stiffness[i] * x;
        force += coupling[i] * x;
    }
    return force;
}

void rk_combine_scalar(std::size_t n, double* x, const double* k1, const double* k2, const double* k3,
                       const double* k4, double c) {
    for (std::size_t i = 0; i < n; ++i) x[i] += c * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

void sincos_scalar(const double* x, double* s, double* c, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        s[i] = std::sin(x[i]);
        c[i] = std::cos(x[i]);
    }
}

}  // namespace

namespace detail {
const KernelTable scalar_table{observe_scalar, rk_stage_scalar, rk_combine_scalar, sincos_scalar};
}

}  // namespace thermo::simd
