#include "thermo/eigen_propagator.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "thermo/error.hpp"

namespace thermo {

std::string_view to_string(Diagonalization method) {
    return method == Diagonalization::NormalMode ? "normal_mode" : "complex";
}

Diagonalization diagonalization_from_string(std::string_view name) {
    if (name == "normal_mode") return Diagonalization::NormalMode;
    if (name == "complex") return Diagonalization::Complex;
    throw ConfigError("unknown diagonalization '" + std::string(name) + "' (expected normal_mode or complex)");
}

EigenPropagator EigenPropagator::diagonalize(const CouplingMatrix& a, const SystemState& v0, const EigenOptions& options) {
    if (v0.n_bath() != a.n_bath() || v0.bath_p.size() != v0.bath_q.size()) {
        throw DimensionError("initial state has " + std::to_string(v0.n_bath()) + " bath oscillators, matrix has " +
                             std::to_string(a.n_bath()));
    }
    if (options.method == Diagonalization::Complex) return from_complex(a, v0, options);
    return from_normal_modes(a, v0, options);
}

EigenPropagator EigenPropagator::from_normal_modes(const CouplingMatrix& a, const SystemState& v0,
                                                   const EigenOptions& o) {
    const std::size_t nb = a.n_bath();
    const auto n1 = static_cast<Eigen::Index>(nb + 1);

    // Mass-weighted coordinates x_j = sqrt(m_j) r_j turn M^-1 K into the
    // symmetric dynamical matrix; A's eigenvalues are +-i sqrt(lambda).
    Eigen::VectorXd sqrt_mass(n1);
    sqrt_mass(0) = std::sqrt(a.test_mass);
    for (std::size_t n = 0; n < nb; ++n) sqrt_mass(static_cast<Eigen::Index>(n + 1)) = std::sqrt(a.masses[n]);

    Eigen::MatrixXd dyn = Eigen::MatrixXd::Zero(n1, n1);
    dyn(0, 0) = -a.test_self_term() / a.test_mass;
    for (std::size_t n = 0; n < nb; ++n) {
        const auto j = static_cast<Eigen::Index>(n + 1);
        const double off = -a.coupling[n] / (sqrt_mass(0) * sqrt_mass(j));
        dyn(0, j) = off;
        dyn(j, 0) = off;
        dyn(j, j) = a.stiffness[n] / a.masses[n];
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dyn);
    if (es.info() != Eigen::Success) {
        throw NumericalError("symmetric eigensolver did not converge (dimension " + std::to_string(n1) +
                             "); perturbing exactly degenerate bath frequencies may help");
    }
    const Eigen::VectorXd& lambda = es.eigenvalues();
    const Eigen::MatrixXd& u = es.eigenvectors();

    const double lambda_max = lambda.cwiseAbs().maxCoeff();
    const double zero_tol = 1e-12 * std::max(lambda_max, 1e-300);
    if (lambda.minCoeff() < -zero_tol) {
        throw NumericalError("stiffness matrix is not positive semi-definite; the system is unstable");
    }

    EigenPropagator prop;
    prop.method_ = Diagonalization::NormalMode;
    prop.dimension_ = a.dimension();
    const double dyn_max = std::max(dyn.cwiseAbs().maxCoeff(), 1e-300);
    prop.reconstruction_error_ = (dyn * u - u * lambda.asDiagonal()).cwiseAbs().maxCoeff() / dyn_max;
    prop.condition_ = 1.0;

    Eigen::VectorXd x0(n1), u0(n1);
    x0(0) = sqrt_mass(0) * v0.test_q;
    u0(0) = v0.test_p / sqrt_mass(0);
    for (std::size_t n = 0; n < nb; ++n) {
        const auto j = static_cast<Eigen::Index>(n + 1);
        x0(j) = sqrt_mass(j) * v0.bath_q[n];
        u0(j) = v0.bath_p[n] / sqrt_mass(j);
    }
    const Eigen::VectorXd y0 = u.transpose() * x0;
    const Eigen::VectorXd yd0 = u.transpose() * u0;

    std::vector<Eigen::Index> oscillating;
    std::vector<Eigen::Index> zero_modes;
    for (Eigen::Index k = 0; k < n1; ++k) {
        if (lambda(k) > zero_tol) {
            oscillating.push_back(k);
        } else {
            zero_modes.push_back(k);
        }
    }

    const double sm = sqrt_mass(0);
    for (Eigen::Index k : oscillating) {
        const double nu = std::sqrt(lambda(k));
        const double u0k = u(0, k);
        prop.freq_.push_back(nu);
        prop.q_cos_.push_back(u0k * y0(k) / sm);
        prop.q_sin_.push_back(u0k * yd0(k) / (nu * sm));
        prop.p_cos_.push_back(sm * u0k * yd0(k));
        prop.p_sin_.push_back(-sm * u0k * y0(k) * nu);
        prop.eigenvalues_.emplace_back(0.0, nu);
        prop.eigenvalues_.emplace_back(0.0, -nu);
    }
    for (Eigen::Index k : zero_modes) {
        prop.drift_q0_ += u(0, k) * y0(k) / sm;
        prop.drift_q1_ += u(0, k) * yd0(k) / sm;
        prop.drift_p0_ += sm * u(0, k) * yd0(k);
        prop.eigenvalues_.emplace_back(0.0, 0.0);
        prop.eigenvalues_.emplace_back(0.0, 0.0);
    }
    for (std::size_t k = 0; k < prop.freq_.size(); ++k) {
        prop.q_scale_ += std::hypot(prop.q_cos_[k], prop.q_sin_[k]);
        prop.p_scale_ += std::hypot(prop.p_cos_[k], prop.p_sin_[k]);
    }

    if (o.keep_full_state) {
        const auto dim = static_cast<Eigen::Index>(prop.dimension_);
        const auto n_osc = static_cast<Eigen::Index>(oscillating.size());
        prop.full_cos_ = Eigen::MatrixXd::Zero(dim, n_osc);
        prop.full_sin_ = Eigen::MatrixXd::Zero(dim, n_osc);
        prop.full_drift0_ = Eigen::VectorXd::Zero(dim);
        prop.full_drift1_ = Eigen::VectorXd::Zero(dim);
        for (Eigen::Index j = 0; j < n1; ++j) {
            const Eigen::Index row_q = 2 * j;  // Q for j = 0, q_n otherwise
            const Eigen::Index row_p = 2 * j + 1;
            const double s = sqrt_mass(j);
            for (Eigen::Index c = 0; c < n_osc; ++c) {
                const Eigen::Index k = oscillating[static_cast<std::size_t>(c)];
                const double nu = prop.freq_[static_cast<std::size_t>(c)];
                prop.full_cos_(row_q, c) = u(j, k) * y0(k) / s;
                prop.full_sin_(row_q, c) = u(j, k) * yd0(k) / (nu * s);
                prop.full_cos_(row_p, c) = s * u(j, k) * yd0(k);
                prop.full_sin_(row_p, c) = -s * u(j, k) * y0(k) * nu;
            }
            for (Eigen::Index k : zero_modes) {
                prop.full_drift0_(row_q) += u(j, k) * y0(k) / s;
                prop.full_drift1_(row_q) += u(j, k) * yd0(k) / s;
                prop.full_drift0_(row_p) += s * u(j, k) * yd0(k);
            }
        }
        prop.has_full_ = true;
    }
    return prop;
}

EigenPropagator EigenPropagator::from_complex(const CouplingMatrix& a, const SystemState& v0, const EigenOptions& o) {
    const Eigen::MatrixXd dense = a.dense();
    const auto dim = dense.rows();

    Eigen::EigenSolver<Eigen::MatrixXd> es(dense, true);
    if (es.info() != Eigen::Success) {
        throw NumericalError("complex eigensolver did not converge (dimension " + std::to_string(dim) +
                             "); perturbing exactly degenerate bath frequencies may help");
    }
    const Eigen::VectorXcd d = es.eigenvalues();
    const Eigen::MatrixXcd c = es.eigenvectors();

    const double d_max = std::max(d.cwiseAbs().maxCoeff(), 1e-300);
    const double re_max = d.real().cwiseAbs().maxCoeff();
    if (re_max > o.stability_tolerance * d_max) {
        throw NumericalError("eigenvalues of A have real parts up to " + std::to_string(re_max) +
                             "; expected a purely oscillatory spectrum");
    }

    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(c);
    const double rcond = lu.rcond();
    const double cond = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
    if (!(cond <= o.max_condition)) {
        throw IllConditionedError("mode matrix condition number " + std::to_string(cond) + " exceeds " +
                                      std::to_string(o.max_condition) +
                                      " (degenerate bath frequencies?); use time stepping instead",
                                  cond);
    }

    EigenPropagator prop;
    prop.method_ = Diagonalization::Complex;
    prop.dimension_ = static_cast<std::size_t>(dim);
    prop.condition_ = cond;
    const Eigen::MatrixXcd rebuilt = c * d.asDiagonal() * lu.inverse();
    prop.reconstruction_error_ =
        (rebuilt - dense.cast<std::complex<double>>()).cwiseAbs().maxCoeff() / std::max(dense.cwiseAbs().maxCoeff(), 1e-300);

    const std::vector<double> v0_vec = v0.to_vector();
    const Eigen::VectorXcd v0c = Eigen::Map<const Eigen::VectorXd>(v0_vec.data(), dim).cast<std::complex<double>>();
    const Eigen::VectorXcd vp0 = lu.solve(v0c);

    // Real parts of d are dropped: they are rounding noise of a Hamiltonian spectrum.
    for (Eigen::Index k = 0; k < dim; ++k) {
        const std::complex<double> wq = c(0, k) * vp0(k);
        const std::complex<double> wp = c(1, k) * vp0(k);
        prop.eigenvalues_.push_back(d(k));
        prop.freq_.push_back(d(k).imag());
        prop.q_cos_.push_back(wq.real());
        prop.q_sin_.push_back(-wq.imag());
        prop.p_cos_.push_back(wp.real());
        prop.p_sin_.push_back(-wp.imag());
        prop.q_cos_im_.push_back(wq.imag());
        prop.q_sin_im_.push_back(wq.real());
        prop.p_cos_im_.push_back(wp.imag());
        prop.p_sin_im_.push_back(wp.real());
        prop.q_scale_ += std::abs(wq);
        prop.p_scale_ += std::abs(wp);
    }

    if (o.keep_full_state) {
        const Eigen::MatrixXcd w = c * vp0.asDiagonal();
        prop.full_cos_ = w.real();
        prop.full_sin_ = -w.imag();
        prop.full_drift0_ = Eigen::VectorXd::Zero(dim);
        prop.full_drift1_ = Eigen::VectorXd::Zero(dim);
        prop.has_full_ = true;
    }
    return prop;
}

std::vector<double> EigenPropagator::mode_frequencies() const {
    std::vector<double> out;
    out.reserve(eigenvalues_.size() / 2 + 1);
    for (const auto& d : eigenvalues_) {
        if (d.imag() >= 0.0) out.push_back(d.imag());
    }
    std::sort(out.begin(), out.end());
    if (method_ == Diagonalization::NormalMode) {
        // Zero modes were stored twice as +0i; keep one per mode.
        std::vector<double> unique;
        std::size_t zeros = 0;
        for (double w : out) {
            if (w == 0.0) {
                if (zeros++ % 2 == 0) unique.push_back(w);
            } else {
                unique.push_back(w);
            }
        }
        return unique;
    }
    return out;
}

simd::QP EigenPropagator::observe(double t, simd::Level level) const {
    simd::QP r = simd::kernels(level).observe(freq_.data(), q_cos_.data(), q_sin_.data(), p_cos_.data(),
                                              p_sin_.data(), freq_.size(), t);
    r.q += drift_q0_ + drift_q1_ * t;
    r.p += drift_p0_;
    return r;
}

simd::QP EigenPropagator::imaginary_residue(double t) const {
    if (method_ != Diagonalization::Complex) return {};
    return simd::kernels(simd::Level::Scalar)
        .observe(freq_.data(), q_cos_im_.data(), q_sin_im_.data(), p_cos_im_.data(), p_sin_im_.data(), freq_.size(), t);
}

simd::QP EigenPropagator::observe_checked(double t) const {
    const simd::QP r = observe(t);
    const simd::QP im = imaginary_residue(t);
    const double tol_q = 1e-9 * std::max(q_scale_, std::abs(r.q));
    const double tol_p = 1e-9 * std::max(p_scale_, std::abs(r.p));
    if (std::abs(im.q) > tol_q || std::abs(im.p) > tol_p) {
        throw NumericalError("imaginary residue of the eigen solution exceeds 1e-9 of its magnitude at t=" +
                             std::to_string(t));
    }
    return r;
}

SystemState EigenPropagator::full_state(double t) const {
    if (!has_full_) throw NumericalError("propagator was built without full-state data (keep_full_state=false)");
    const auto n = static_cast<Eigen::Index>(freq_.size());
    Eigen::VectorXd cs(n), sn(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double arg = freq_[static_cast<std::size_t>(k)] * t;
        cs(k) = std::cos(arg);
        sn(k) = std::sin(arg);
    }
    const Eigen::VectorXd v = full_cos_ * cs + full_sin_ * sn + full_drift0_ + full_drift1_ * t;
    return SystemState::from_vector(std::span<const double>(v.data(), static_cast<std::size_t>(v.size())), t);
}

}  // namespace thermo
