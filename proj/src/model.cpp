#include "thermo/model.hpp"

#include <cmath>
#include <string>

#include "thermo/error.hpp"

namespace thermo {

void TestParticleSpec::validate() const {
    if (!(mass > 0.0) || !std::isfinite(mass)) throw ConfigError("test particle mass must be > 0");
    if (!(omega >= 0.0) || !std::isfinite(omega)) throw ConfigError("test particle omega must be >= 0");
    if (!std::isfinite(q0) || !std::isfinite(p0)) throw ConfigError("test particle initial condition must be finite");
}

std::string_view to_string(DosFamily family) {
    switch (family) {
        case DosFamily::Uniform: return "uniform";
        case DosFamily::InverseSquare: return "inverse_square";
        case DosFamily::Square: return "square";
    }
    return "?";
}

DosFamily dos_family_from_string(std::string_view name) {
    if (name == "uniform") return DosFamily::Uniform;
    if (name == "inverse_square") return DosFamily::InverseSquare;
    if (name == "square") return DosFamily::Square;
    throw ConfigError("unknown density-of-states family '" + std::string(name) +
                      "' (expected uniform, inverse_square or square)");
}

void DensityOfStates::validate() const {
    if (!(omega_ir > 0.0) || !std::isfinite(omega_ir)) throw ConfigError("omega_ir must be > 0");
    if (!std::isfinite(omega_uv)) throw ConfigError("omega_uv must be finite");
    if (omega_ir > omega_uv) {
        throw ConfigError("omega_ir (" + std::to_string(omega_ir) + ") must not exceed omega_uv (" +
                          std::to_string(omega_uv) + ")");
    }
}

// Unnormalized weights: 1, w^-2, w^2. Closed-form CDFs below.
double DensityOfStates::pdf(double w) const {
    if (w < omega_ir || w > omega_uv) return 0.0;
    const double a = omega_ir, b = omega_uv;
    switch (family) {
        case DosFamily::Uniform: return 1.0 / (b - a);
        case DosFamily::InverseSquare: return 1.0 / (w * w) / (1.0 / a - 1.0 / b);
        case DosFamily::Square: return 3.0 * w * w / (b * b * b - a * a * a);
    }
    return 0.0;
}

double DensityOfStates::cdf(double w) const {
    if (w <= omega_ir) return 0.0;
    if (w >= omega_uv) return 1.0;
    const double a = omega_ir, b = omega_uv;
    switch (family) {
        case DosFamily::Uniform: return (w - a) / (b - a);
        case DosFamily::InverseSquare: return (1.0 / a - 1.0 / w) / (1.0 / a - 1.0 / b);
        case DosFamily::Square: return (w * w * w - a * a * a) / (b * b * b - a * a * a);
    }
    return 0.0;
}

double DensityOfStates::quantile(double u) const {
    const double a = omega_ir, b = omega_uv;
    if (a == b) return a;
    double w = a;
    switch (family) {
        case DosFamily::Uniform: w = a + u * (b - a); break;
        case DosFamily::InverseSquare: w = 1.0 / (1.0 / a - u * (1.0 / a - 1.0 / b)); break;
        case DosFamily::Square: w = std::cbrt(a * a * a + u * (b * b * b - a * a * a)); break;
    }
    // Rounding can push the endpoint just outside the support.
    return std::fmin(std::fmax(w, a), b);
}

double DensityOfStates::mean() const {
    const double a = omega_ir, b = omega_uv;
    if (a == b) return a;
    switch (family) {
        case DosFamily::Uniform: return 0.5 * (a + b);
        case DosFamily::InverseSquare: return std::log(b / a) / (1.0 / a - 1.0 / b);
        case DosFamily::Square: return 0.75 * (b * b * b * b - a * a * a * a) / (b * b * b - a * a * a);
    }
    return a;
}

double DensityOfStates::mean_square() const {
    const double a = omega_ir, b = omega_uv;
    if (a == b) return a * a;
    switch (family) {
        case DosFamily::Uniform: return (b * b * b - a * a * a) / (3.0 * (b - a));
        case DosFamily::InverseSquare: return (b - a) / (1.0 / a - 1.0 / b);
        case DosFamily::Square: return 0.6 * (std::pow(b, 5) - std::pow(a, 5)) / (b * b * b - a * a * a);
    }
    return a * a;
}

void BathSpec::validate() const {
    if (n_oscillators < 1) throw ConfigError("bath n_oscillators must be >= 1");
    if (!(mass > 0.0) || !std::isfinite(mass)) throw ConfigError("bath mass must be > 0");
    if (!(temperature > 0.0) || !std::isfinite(temperature)) throw ConfigError("bath temperature must be > 0");
    dos.validate();
}

std::vector<double> BathRealization::phase_space_energies(double mass) const {
    std::vector<double> out(size());
    for (std::size_t n = 0; n < size(); ++n) out[n] = oscillator_energy(positions[n], momenta[n], mass, frequencies[n]);
    return out;
}

std::vector<double> SystemState::to_vector() const {
    std::vector<double> v(dimension());
    v[0] = test_q;
    v[1] = test_p;
    for (std::size_t n = 0; n < n_bath(); ++n) {
        v[2 + 2 * n] = bath_q[n];
        v[3 + 2 * n] = bath_p[n];
    }
    return v;
}

SystemState SystemState::from_vector(std::span<const double> v, double time) {
    if (v.size() < 2 || v.size() % 2 != 0) throw DimensionError("state vector length must be even and >= 2");
    SystemState s;
    s.time = time;
    s.test_q = v[0];
    s.test_p = v[1];
    const std::size_t n = (v.size() - 2) / 2;
    s.bath_q.resize(n);
    s.bath_p.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        s.bath_q[i] = v[2 + 2 * i];
        s.bath_p[i] = v[3 + 2 * i];
    }
    return s;
}

std::string_view to_string(EnergyMeasure measure) {
    return measure == EnergyMeasure::Bare ? "bare" : "renormalized";
}

EnergyMeasure energy_measure_from_string(std::string_view name) {
    if (name == "bare") return EnergyMeasure::Bare;
    if (name == "renormalized") return EnergyMeasure::Renormalized;
    throw ConfigError("unknown energy measure '" + std::string(name) + "' (expected bare or renormalized)");
}

double test_particle_energy(const SystemState& state, const TestParticleSpec& tp) {
    return oscillator_energy(state.test_q, state.test_p, tp.mass, tp.omega);
}

SystemState initial_state(const TestParticleSpec& tp, std::span<const BathRealization> baths) {
    SystemState s;
    s.test_q = tp.q0;
    s.test_p = tp.p0;
    for (const auto& b : baths) {
        s.bath_q.insert(s.bath_q.end(), b.positions.begin(), b.positions.end());
        s.bath_p.insert(s.bath_p.end(), b.momenta.begin(), b.momenta.end());
    }
    return s;
}

double total_energy(const SystemState& state, const TestParticleSpec& tp, std::span<const BathView> baths) {
    std::size_t expected = 0;
    for (const auto& b : baths) expected += b.frequencies.size();
    if (expected != state.bath_q.size() || state.bath_p.size() != state.bath_q.size()) {
        throw DimensionError("state carries " + std::to_string(state.bath_q.size()) +
                             " bath oscillators but the bath specs describe " + std::to_string(expected));
    }
    const double Q = state.test_q;
    double h = test_particle_energy(state, tp);
    std::size_t offset = 0;
    for (const auto& b : baths) {
        const double alpha = b.coupled ? 1.0 : 0.0;
        for (std::size_t n = 0; n < b.frequencies.size(); ++n) {
            const double q = state.bath_q[offset + n];
            const double p = state.bath_p[offset + n];
            const double w = b.frequencies[n];
            const double x = q - alpha * Q;
            h += 0.5 * p * p / b.mass + 0.5 * b.mass * w * w * x * x;
        }
        offset += b.frequencies.size();
    }
    return h;
}

}  // namespace thermo
