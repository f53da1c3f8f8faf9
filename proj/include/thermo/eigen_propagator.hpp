#pragma once

#include <Eigen/Core>
#include <complex>
#include <span>
#include <string_view>
#include <vector>

#include "thermo/coupling.hpp"
#include "thermo/model.hpp"
#include "thermo/simd/kernels.hpp"

namespace thermo {

/// How A = C D C^-1 is obtained.
enum class Diagonalization {
    /// Symmetric eigenproblem of the mass-weighted stiffness matrix. Robust
    /// for degenerate frequencies and O((N+1)^3) instead of O((2N+2)^3).
    NormalMode,
    /// General complex eigendecomposition of the (2N+2)x(2N+2) matrix A.
    Complex,
};

std::string_view to_string(Diagonalization method);
Diagonalization diagonalization_from_string(std::string_view name);

struct EigenOptions {
    Diagonalization method = Diagonalization::NormalMode;
    /// Keep the mode matrix for full_state(). Observation of the test particle
    /// alone needs only O(N) storage.
    bool keep_full_state = true;
    /// Complex route: condition number of C above which IllConditionedError is raised.
    double max_condition = 1e12;
    /// Complex route: |Re d_k| must stay below this fraction of max |d_k|.
    double stability_tolerance = 1e-9;
};

/// Exact solution v(t) = C exp(D t) C^-1 v0 of the linear Hamiltonian system.
/// Immutable after construction; observations are thread-safe.
///
/// Internally every conjugate pair of modes is kept in real form
/// a cos(w t) + b sin(w t), so an observation of (Q, P) is one pass of the
/// observe kernel over the modes.
class EigenPropagator {
public:
    /// Diagonalizes A and projects v0 onto the modes. Throws NumericalError on
    /// eigensolver failure or an unstable spectrum, IllConditionedError when
    /// the complex-route mode matrix cannot be inverted reliably.
    static EigenPropagator diagonalize(const CouplingMatrix& a, const SystemState& v0, const EigenOptions& options = {});

    Diagonalization method() const { return method_; }
    std::size_t dimension() const { return dimension_; }

    /// All 2N+2 eigenvalues of A (purely imaginary, in conjugate pairs).
    const std::vector<std::complex<double>>& eigenvalues() const { return eigenvalues_; }
    /// Non-negative normal-mode angular frequencies.
    std::vector<double> mode_frequencies() const;

    /// max|C D C^-1 - A| / max|A| (complex route) or the equivalent residual of
    /// the symmetric eigenproblem, measured at construction.
    double reconstruction_error() const { return reconstruction_error_; }
    /// Condition number estimate of the mode matrix (1 for the orthogonal route).
    double condition_number() const { return condition_; }

    /// (Q(t), P(t)) in O(N).
    simd::QP observe(double t) const { return observe(t, simd::active_level()); }
    simd::QP observe(double t, simd::Level level) const;

    /// Imaginary part of the complex-route sum at time t; identically zero for
    /// the normal-mode route.
    simd::QP imaginary_residue(double t) const;
    /// Like observe(), but raises NumericalError when the imaginary residue
    /// exceeds 1e-9 of the trajectory scale.
    simd::QP observe_checked(double t) const;

    /// Complete state in O(N^2). Requires keep_full_state.
    SystemState full_state(double t) const;

private:
    EigenPropagator() = default;
    static EigenPropagator from_normal_modes(const CouplingMatrix& a, const SystemState& v0, const EigenOptions& o);
    static EigenPropagator from_complex(const CouplingMatrix& a, const SystemState& v0, const EigenOptions& o);

    Diagonalization method_ = Diagonalization::NormalMode;
    std::size_t dimension_ = 0;
    std::vector<std::complex<double>> eigenvalues_;
    double reconstruction_error_ = 0.0;
    double condition_ = 1.0;

    // Oscillating terms for the test particle.
    std::vector<double> freq_, q_cos_, q_sin_, p_cos_, p_sin_;
    // Imaginary parts (complex route only).
    std::vector<double> q_cos_im_, q_sin_im_, p_cos_im_, p_sin_im_;
    double q_scale_ = 0.0, p_scale_ = 0.0;
    // Zero-frequency modes: Q += drift_q0 + drift_q1 t, P += drift_p0.
    double drift_q0_ = 0.0, drift_q1_ = 0.0, drift_p0_ = 0.0;

    // Full-state data. Columns are modes; rows follow the interleaved layout.
    bool has_full_ = false;
    Eigen::MatrixXd full_cos_, full_sin_;
    Eigen::VectorXd full_drift0_, full_drift1_;
};

}  // namespace thermo
