#include "thermo/coupling.hpp"

#include <numeric>
#include <string>

#include "thermo/error.hpp"

namespace thermo {

double CouplingMatrix::coupled_stiffness() const { return std::accumulate(coupling.begin(), coupling.end(), 0.0); }

double CouplingMatrix::test_self_term() const {
    return -(test_mass * test_omega * test_omega + coupled_stiffness());
}

std::vector<double> CouplingMatrix::apply(std::span<const double> v) const {
    if (v.size() != dimension()) {
        throw DimensionError("vector of length " + std::to_string(v.size()) + " applied to coupling matrix of dimension " +
                             std::to_string(dimension()));
    }
    std::vector<double> out(dimension());
    const double Q = v[0];
    double force = test_self_term() * Q;
    for (std::size_t n = 0; n < n_bath(); ++n) {
        const double q = v[2 + 2 * n];
        const double p = v[3 + 2 * n];
        out[2 + 2 * n] = inv_mass[n] * p;
        out[3 + 2 * n] = coupling[n] * Q - stiffness[n] * q;
        force += coupling[n] * q;
    }
    out[0] = v[1] / test_mass;
    out[1] = force;
    return out;
}

Eigen::MatrixXd CouplingMatrix::dense() const {
    const auto dim = static_cast<Eigen::Index>(dimension());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
    a(0, 1) = 1.0 / test_mass;
    a(1, 0) = test_self_term();
    for (std::size_t n = 0; n < n_bath(); ++n) {
        const auto iq = static_cast<Eigen::Index>(2 + 2 * n);
        a(1, iq) = coupling[n];
        a(iq, iq + 1) = inv_mass[n];
        a(iq + 1, 0) = coupling[n];
        a(iq + 1, iq) = -stiffness[n];
    }
    return a;
}

CouplingMatrix build_coupling_matrix(const TestParticleSpec& tp, std::span<const double> frequencies, double m) {
    const BathView view{m, frequencies, true};
    return build_coupling_matrix(tp, std::span<const BathView>(&view, 1));
}

CouplingMatrix build_coupling_matrix(const TestParticleSpec& tp, std::span<const BathView> baths) {
    tp.validate();
    CouplingMatrix a;
    a.test_mass = tp.mass;
    a.test_omega = tp.omega;
    for (const auto& b : baths) {
        if (!(b.mass > 0.0)) throw ConfigError("bath mass must be > 0");
        for (double w : b.frequencies) {
            const double k = b.mass * w * w;
            a.frequencies.push_back(w);
            a.masses.push_back(b.mass);
            a.inv_mass.push_back(1.0 / b.mass);
            a.stiffness.push_back(k);
            a.coupling.push_back(b.coupled ? k : 0.0);
        }
    }
    return a;
}

}  // namespace thermo
