#pragma once

// Spectral power amplification (SPA) of the periodically driven chain: the
// power of the expected output at the forcing frequency 1/2m relative to the
// power the depth-switching input carries at that frequency.

#include <complex>
#include <cstdint>

#include "srmc/chain.hpp"

namespace srmc {

struct SpaResult {
    double eta = 0.0;                        ///< amplification coefficient
    std::complex<double> output_component;   ///< E_pi xi_m(1)
    double input_power = 0.0;                ///< |c_m(1)|^2
};

/// |c_m(1)|^2 = (V - v)^2 / (4 m^2) * csc^2(pi / 2m).
double input_signal_power(const ChainParams& params);

/// (1/2m) sum_k (pi+(k) - pi-(k)) exp(2 pi i a k / 2m), by direct summation.
/// Harmonic index a is taken modulo 2m.
std::complex<double> output_component(const StationaryDistribution& dist,
                                      std::int64_t harmonic);

/// E_pi xi_m(1) summed over the closed-form stationary distribution.
/// Throws DegenerateChain when no unique stationary law exists.
std::complex<double> expected_output_component(const ChainParams& params,
                                               NoiseLevel noise);

/// E_pi xi_m(1) = (2/m) (phi - psi) w / ((1 - w)(1 - (1 - phi - psi) w)),
/// w = exp(i pi / m). Zero when phi = psi.
std::complex<double> expected_output_component_closed_form(
    const ChainParams& params, NoiseLevel noise);

/// Closed-form SPA in the noise variable x; defined on all of [0, 1] and
/// exactly 0 at x = 0.
SpaResult spa_closed_form(const ChainParams& params, NoiseLevel noise);

/// Shorthand for spa_closed_form(params, noise).eta.
double spa(const ChainParams& params, NoiseLevel noise);

/// SPA from its definition, |E_pi xi_m(1)|^2 / |c_m(1)|^2, with the expected
/// component summed over the stationary distribution.
SpaResult spa_from_distribution(const ChainParams& params, NoiseLevel noise);

}  // namespace srmc
