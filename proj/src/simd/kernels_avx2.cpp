// Compiled with -mavx2 -mfma. Only reached through the dispatch table after a
// runtime CPU check.

#include <immintrin.h>

#include <cmath>

#include "thermo/simd/kernels.hpp"

namespace thermo::simd {
namespace {

// Cody-Waite split of pi/4 and the minimax polynomials of the Cephes sin/cos
// routines. Lossless reduction for |x| up to about 2^30.
constexpr double kFourOverPi = 1.27323954473516268615;
constexpr double kDP1 = 7.85398125648498535156e-1;
constexpr double kDP2 = 3.77489470793079817668e-8;
constexpr double kDP3 = 2.69515142907905952645e-15;

constexpr double kSin[6] = {1.58962301576546568060e-10, -2.50507477628578072866e-8, 2.75573136213857245213e-6,
                            -1.98412698295895385996e-4, 8.33333333332211858878e-3, -1.66666666666666307295e-1};
constexpr double kCos[6] = {-1.13585365213876817300e-11, 2.08757008419747316778e-9, -2.75573141792967388112e-7,
                            2.48015872888517045348e-5,  -1.38888888888730564116e-3, 4.16666666666665929218e-2};

inline __m256d horner(__m256d x, const double (&c)[6]) {
    __m256d r = _mm256_set1_pd(c[0]);
    for (int i = 1; i < 6; ++i) r = _mm256_fmadd_pd(r, x, _mm256_set1_pd(c[i]));
    return r;
}

inline void sincos_pd(__m256d x, __m256d& s, __m256d& c) {
    const __m256d sign_mask = _mm256_set1_pd(-0.0);
    const __m256d x_sign = _mm256_and_pd(x, sign_mask);
    const __m256d ax = _mm256_andnot_pd(sign_mask, x);

    // Octant index, rounded up to even so the reduced argument is in [-pi/4, pi/4].
    __m256d y = _mm256_round_pd(_mm256_mul_pd(ax, _mm256_set1_pd(kFourOverPi)), _MM_FROUND_TO_NEG_INF | _MM_FROUND_NO_EXC);
    const __m256d half_y = _mm256_mul_pd(y, _mm256_set1_pd(0.5));
    const __m256d odd = _mm256_cmp_pd(_mm256_round_pd(half_y, _MM_FROUND_TO_NEG_INF | _MM_FROUND_NO_EXC), half_y, _CMP_NEQ_OQ);
    y = _mm256_add_pd(y, _mm256_and_pd(odd, _mm256_set1_pd(1.0)));
    // j = y mod 8, in {0, 2, 4, 6}
    const __m256d j = _mm256_fnmadd_pd(
        _mm256_round_pd(_mm256_mul_pd(y, _mm256_set1_pd(0.125)), _MM_FROUND_TO_NEG_INF | _MM_FROUND_NO_EXC),
        _mm256_set1_pd(8.0), y);

    __m256d z = _mm256_fnmadd_pd(y, _mm256_set1_pd(kDP1), ax);
    z = _mm256_fnmadd_pd(y, _mm256_set1_pd(kDP2), z);
    z = _mm256_fnmadd_pd(y, _mm256_set1_pd(kDP3), z);
    const __m256d zz = _mm256_mul_pd(z, z);

    const __m256d ps = _mm256_fmadd_pd(_mm256_mul_pd(z, zz), horner(zz, kSin), z);
    const __m256d pc = _mm256_fmadd_pd(_mm256_mul_pd(zz, zz), horner(zz, kCos),
                                       _mm256_fnmadd_pd(_mm256_set1_pd(0.5), zz, _mm256_set1_pd(1.0)));

    const __m256d hi = _mm256_cmp_pd(j, _mm256_set1_pd(3.0), _CMP_GT_OQ);
    const __m256d jr = _mm256_sub_pd(j, _mm256_and_pd(hi, _mm256_set1_pd(4.0)));
    const __m256d swap = _mm256_cmp_pd(jr, _mm256_set1_pd(1.0), _CMP_GT_OQ);

    __m256d sv = _mm256_blendv_pd(ps, pc, swap);
    __m256d cv = _mm256_blendv_pd(pc, ps, swap);
    sv = _mm256_xor_pd(sv, _mm256_xor_pd(_mm256_and_pd(hi, sign_mask), x_sign));
    cv = _mm256_xor_pd(cv, _mm256_and_pd(_mm256_xor_pd(hi, swap), sign_mask));
    s = sv;
    c = cv;
}

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline __m256i tail_mask(std::size_t remaining) {
    const __m256i idx = _mm256_setr_epi64x(0, 1, 2, 3);
    return _mm256_cmpgt_epi64(_mm256_set1_epi64x(static_cast<long long>(remaining)), idx);
}

QP observe_avx2(const double* freq, const double* q_cos, const double* q_sin, const double* p_cos,
                const double* p_sin, std::size_t n, double t) {
    const __m256d tv = _mm256_set1_pd(t);
    __m256d qa = _mm256_setzero_pd();
    __m256d pa = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        __m256d s, c;
        sincos_pd(_mm256_mul_pd(_mm256_loadu_pd(freq + k), tv), s, c);
        qa = _mm256_fmadd_pd(_mm256_loadu_pd(q_cos + k), c, qa);
        qa = _mm256_fmadd_pd(_mm256_loadu_pd(q_sin + k), s, qa);
        pa = _mm256_fmadd_pd(_mm256_loadu_pd(p_cos + k), c, pa);
        pa = _mm256_fmadd_pd(_mm256_loadu_pd(p_sin + k), s, pa);
    }
    if (k < n) {
        // Masked lanes load as zero and contribute nothing.
        const __m256i m = tail_mask(n - k);
        __m256d s, c;
        sincos_pd(_mm256_mul_pd(_mm256_maskload_pd(freq + k, m), tv), s, c);
        qa = _mm256_fmadd_pd(_mm256_maskload_pd(q_cos + k, m), c, qa);
        qa = _mm256_fmadd_pd(_mm256_maskload_pd(q_sin + k, m), s, qa);
        pa = _mm256_fmadd_pd(_mm256_maskload_pd(p_cos + k, m), c, pa);
        pa = _mm256_fmadd_pd(_mm256_maskload_pd(p_sin + k, m), s, pa);
    }
    return {hsum(qa), hsum(pa)};
}

double rk_stage_avx2(std::size_t n, const double* q, const double* p, const double* dq_in, const double* dp_in,
                     double h, double q_test, const double* inv_m, const double* coupling, const double* stiffness,
                     double* dq_out, double* dp_out) {
    const __m256d qt = _mm256_set1_pd(q_test);
    __m256d force = _mm256_setzero_pd();
    std::size_t i = 0;
    if (dq_in == nullptr || dp_in == nullptr) {
        for (; i + 4 <= n; i += 4) {
            const __m256d x = _mm256_loadu_pd(q + i);
            const __m256d y = _mm256_loadu_pd(p + i);
            const __m256d kc = _mm256_loadu_pd(coupling + i);
            _mm256_storeu_pd(dq_out + i, _mm256_mul_pd(_mm256_loadu_pd(inv_m + i), y));
            _mm256_storeu_pd(dp_out + i, _mm256_fnmadd_pd(_mm256_loadu_pd(stiffness + i), x, _mm256_mul_pd(kc, qt)));
            force = _mm256_fmadd_pd(kc, x, force);
        }
        double f = hsum(force);
        for (; i < n; ++i) {
            dq_out[i] = inv_m[i] * p[i];
            dp_out[i] = coupling[i] * q_test - stiffness[i] * q[i];
            f += coupling[i] * q[i];
        }
        return f;
    }
    const __m256d hv = _mm256_set1_pd(h);
    for (; i + 4 <= n; i += 4) {
        const __m256d x = _mm256_fmadd_pd(hv, _mm256_loadu_pd(dq_in + i), _mm256_loadu_pd(q + i));
        const __m256d y = _mm256_fmadd_pd(hv, _mm256_loadu_pd(dp_in + i), _mm256_loadu_pd(p + i));
        const __m256d kc = _mm256_loadu_pd(coupling + i);
        _mm256_storeu_pd(dq_out + i, _mm256_mul_pd(_mm256_loadu_pd(inv_m + i), y));
        _mm256_storeu_pd(dp_out + i, _mm256_fnmadd_pd(_mm256_loadu_pd(stiffness + i), x, _mm256_mul_pd(kc, qt)));
        force = _mm256_fmadd_pd(kc, x, force);
    }
    double f = hsum(force);
    for (; i < n; ++i) {
        const double x = q[i] + h * dq_in[i];
        const double y = p[i] + h * dp_in[i];
        dq_out[i] = inv_m[i] * y;
        dp_out[i] = coupling[i] * q_test - stiffness[i] * x;
        f += coupling[i] * x;
    }
    return f;
}

void rk_combine_avx2(std::size_t n, double* x, const double* k1, const double* k2, const double* k3,
                     const double* k4, double c) {
    const __m256d cv = _mm256_set1_pd(c);
    const __m256d two = _mm256_set1_pd(2.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d acc = _mm256_add_pd(_mm256_loadu_pd(k1 + i), _mm256_loadu_pd(k4 + i));
        acc = _mm256_fmadd_pd(two, _mm256_add_pd(_mm256_loadu_pd(k2 + i), _mm256_loadu_pd(k3 + i)), acc);
        _mm256_storeu_pd(x + i, _mm256_fmadd_pd(cv, acc, _mm256_loadu_pd(x + i)));
    }
    for (; i < n; ++i) x[i] += c * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

void sincos_avx2(const double* x, double* s, double* c, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d sv, cv;
        sincos_pd(_mm256_loadu_pd(x + i), sv, cv);
        _mm256_storeu_pd(s + i, sv);
        _mm256_storeu_pd(c + i, cv);
    }
    if (i < n) {
        const __m256i m = tail_mask(n - i);
        __m256d sv, cv;
        sincos_pd(_mm256_maskload_pd(x + i, m), sv, cv);
        _mm256_maskstore_pd(s + i, m, sv);
        _mm256_maskstore_pd(c + i, m, cv);
    }
}

}  // namespace

namespace detail {
const KernelTable avx2_table{observe_avx2, rk_stage_avx2, rk_combine_avx2, sincos_avx2};
}

}  // namespace thermo::simd
