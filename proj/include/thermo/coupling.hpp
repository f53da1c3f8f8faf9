#pragma once

#include <Eigen/Core>
#include <span>
#include <vector>

#include "thermo/model.hpp"

namespace thermo {

/// Linear system matrix A of v' = A v for a test particle and any number of
/// baths, in the interleaved layout (Q, P, q_1, p_1, ...).
///
/// A is an arrowhead matrix, so only its defining coefficients are stored:
///   row Q   : 1/M on P
///   row P   : -(M Omega^2 + sum_n c_n) on Q, +c_n on q_n
///   row q_n : 1/m_n on p_n
///   row p_n : +c_n on Q, -k_n on q_n
/// with stiffness k_n = m_n w_n^2 and coupling c_n = alpha_n k_n, alpha_n in
/// {0, 1}. An uncoupled oscillator (alpha = 0) evolves freely.
struct CouplingMatrix {
    double test_mass = 1.0;
    double test_omega = 0.0;
    std::vector<double> frequencies;
    std::vector<double> masses;
    std::vector<double> inv_mass;
    std::vector<double> stiffness;
    std::vector<double> coupling;

    std::size_t n_bath() const { return frequencies.size(); }
    std::size_t dimension() const { return 2 * n_bath() + 2; }

    /// sum_n c_n: the renormalization of the test particle's spring constant.
    double coupled_stiffness() const;
    /// A(1,0) = -(M Omega^2 + sum_n c_n).
    double test_self_term() const;

    /// A v for a vector in interleaved layout, in O(N).
    std::vector<double> apply(std::span<const double> v) const;
    /// Dense (2N+2)x(2N+2) matrix.
    Eigen::MatrixXd dense() const;
};

/// Single bath with identical oscillator mass m, fully coupled.
CouplingMatrix build_coupling_matrix(const TestParticleSpec& tp, std::span<const double> frequencies, double m);

/// Several baths appended in order; each bath is coupled or free per its flag.
CouplingMatrix build_coupling_matrix(const TestParticleSpec& tp, std::span<const BathView> baths);

}  // namespace thermo
