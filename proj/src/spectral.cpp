#include "srmc/spectral.hpp"

#include <cmath>
#include <numbers>

namespace srmc {

namespace {

double half_angle_sin2(std::int64_t m) {
    const double s = std::sin(std::numbers::pi / (2.0 * static_cast<double>(m)));
    return s * s;
}

}  // namespace

double input_signal_power(const ChainParams& params) {
    const auto m = static_cast<double>(params.half_period());
    const double gap = params.depth_gap();
    return gap * gap / (4.0 * m * m * half_angle_sin2(params.half_period()));
}

std::complex<double> output_component(const StationaryDistribution& dist,
                                      std::int64_t harmonic) {
    const auto n = static_cast<std::int64_t>(dist.size());
    const std::int64_t a = ((harmonic % n) + n) % n;
    std::complex<double> sum{0.0, 0.0};
    for (std::int64_t k = 0; k < n; ++k) {
        // Reduce a*k mod n first so the phase stays exact for large m.
        const double angle = 2.0 * std::numbers::pi *
                             static_cast<double>((a * k) % n) /
                             static_cast<double>(n);
        const auto& e = dist[static_cast<std::size_t>(k)];
        sum += (e.plus - e.minus) * std::polar(1.0, angle);
    }
    return sum / static_cast<double>(n);
}

std::complex<double> expected_output_component(const ChainParams& params,
                                               NoiseLevel noise) {
    return output_component(stationary_distribution(params, noise), 1);
}

std::complex<double> expected_output_component_closed_form(
    const ChainParams& params, NoiseLevel noise) {
    const RateParams r = rates(params, noise);
    const double diff = r.deep_escape - r.shallow_escape;
    if (diff == 0.0) return {0.0, 0.0};
    const auto m = static_cast<double>(params.half_period());
    const std::complex<double> w = std::polar(1.0, std::numbers::pi / m);
    const double base = 1.0 - r.deep_escape - r.shallow_escape;
    return (2.0 / m) * diff * w / ((1.0 - w) * (1.0 - base * w));
}

SpaResult spa_closed_form(const ChainParams& params, NoiseLevel noise) {
    SpaResult out;
    out.input_power = input_signal_power(params);
    if (noise.x() == 0.0) {
        return out;
    }
    const RateParams r = rates(params, noise);
    const double phi = r.deep_escape;
    const double psi = r.shallow_escape;
    out.output_component = expected_output_component_closed_form(params, noise);
    if (phi == psi) return out;

    const double gap = params.depth_gap();
    const double sum = phi + psi;
    const double denom =
        sum * sum + 4.0 * (1.0 - sum) * half_angle_sin2(params.half_period());
    out.eta = 4.0 / (gap * gap) * (phi - psi) * (phi - psi) / denom;
    return out;
}

double spa(const ChainParams& params, NoiseLevel noise) {
    return spa_closed_form(params, noise).eta;
}

SpaResult spa_from_distribution(const ChainParams& params, NoiseLevel noise) {
    SpaResult out;
    out.input_power = input_signal_power(params);
    out.output_component = expected_output_component(params, noise);
    out.eta = std::norm(out.output_component) / out.input_power;
    return out;
}

}  // namespace srmc
