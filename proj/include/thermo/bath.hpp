#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "thermo/model.hpp"
#include "thermo/rng.hpp"

namespace thermo {

/// N i.i.d. inverse-CDF draws from the bath's density of states.
std::vector<double> sample_frequencies(const BathSpec& spec, RngStream& rng);

/// N i.i.d. Boltzmann (exponential, mean T) oscillator energies.
std::vector<double> sample_energies(const BathSpec& spec, RngStream& rng);

/// Places each oscillator at angle phi on its energy ellipse:
/// q = sqrt(2E/(m w^2)) cos phi, p = sqrt(2 m E) sin phi.
BathRealization make_realization(double mass, std::vector<double> frequencies, std::vector<double> energies,
                                 std::span<const double> phases, std::uint64_t seed = 0);

/// Full realization from the frequency, energy and phase substreams of
/// (seed, bath_index). Identical inputs give bitwise-identical output.
BathRealization realize_bath(const BathSpec& spec, std::uint64_t seed, std::uint64_t bath_index = 0);

struct PhaseSums {
    double sum_q = 0.0;
    double sum_p = 0.0;
};

/// Sum of initial positions and momenta; near-cancellation diagnostic.
PhaseSums symmetrize_check(const BathRealization& realization);

}  // namespace thermo
