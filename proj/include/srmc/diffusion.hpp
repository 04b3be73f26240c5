#pragma once

// Overdamped diffusion in a double-well potential whose deep well switches
// sides every half period, integrated with Euler-Maruyama.

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "srmc/errors.hpp"
#include "srmc/rng.hpp"

namespace srmc {

/// U(x) = (V/2)(x^4 - 2x^2) for x <= 0 and (v/2)(x^4 - 2x^2) for x > 0:
/// minima at -1 (depth V/2) and +1 (depth v/2), saddle U(0) = 0, C^1 at 0.
/// The switching potential is U(x) on [k, k + 1/2) and U(-x) on
/// [k + 1/2, k + 1) in rescaled time.
class SwitchingPotential {
public:
    /// Throws InvalidParameter unless 0 < v < V < inf.
    SwitchingPotential(double shallow_depth, double deep_depth);

    double shallow_depth() const noexcept { return shallow_; }
    double deep_depth() const noexcept { return deep_; }

    double static_value(double x) const noexcept;
    double static_gradient(double x) const noexcept;

    /// t is rescaled time (period 1).
    double value(double x, double t) const noexcept;
    double gradient(double x, double t) const noexcept;

private:
    double shallow_;
    double deep_;
};

/// True on the first half [k, k + 1/2) of each rescaled period.
bool in_first_half(double t) noexcept;

/// Location of the deep well: -1 on [k, k + 1/2), +1 on [k + 1/2, k + 1).
double phase_reference(double t) noexcept;

enum class Reference { SignOfStart, Phase };

struct DeviationExperiment {
    double lambda = 1.5;  ///< exponential scale, T = exp(lambda / eps)
    double eps = 0.45;
    double dt = 1e-3;
    double delta = 0.5;   ///< tube radius
    double x0 = -1.0;
    std::uint64_t seed = 0;
    Reference reference = Reference::Phase;
    /// Overrides T; required when eps = 0, where exp(lambda / eps) diverges.
    std::optional<double> horizon;

    double period() const;
    /// Throws InvalidParameter on bad values, a missing horizon at eps = 0,
    /// dt >= min(1, T)/100, or more than 5e7 steps.
    void validate() const;
};

/// Samples X(n dt) for n = 0 .. ceil(T / dt).
struct SdePath {
    double dt = 0.0;
    double period = 0.0;
    std::vector<double> x;
};

/// Euler-Maruyama for dX = drift(X, t) dt + sqrt(eps) dW over `steps` steps.
/// visit(n, x) sees every state including the start (n = 0) and returns false
/// to stop early.
template <typename Drift, typename Visit>
void euler_maruyama(Drift&& drift, double x0, double eps, double dt,
                    std::int64_t steps, RandomStream& rng, Visit&& visit) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double noise_scale = std::sqrt(eps * dt);
    double x = x0;
    if (!visit(std::int64_t{0}, x)) return;
    for (std::int64_t n = 0; n < steps; ++n) {
        const double t = static_cast<double>(n) * dt;
        x += drift(x, t) * dt;
        if (noise_scale > 0.0) x += noise_scale * gauss(rng);
        if (!visit(n + 1, x)) return;
    }
}

/// Integrates dX = -dU/dx(X, t/T) dt + sqrt(eps) dW on [0, T]. Deterministic
/// given the seed. Throws IntegratorBlowUp when |X| exceeds 10.
SdePath simulate_sde(const SwitchingPotential& potential,
                     const DeviationExperiment& experiment);

/// Fraction of rescaled time in [0, 1] spent outside the delta-tube around
/// the reference (sign of X0, or the deep-well location), dt-weighted.
double deviation_measure(const SdePath& path, const DeviationExperiment& experiment);

struct ExitTimeEstimate {
    double mean = 0.0;                 ///< over completed paths
    std::optional<double> std_error;   ///< absent with fewer than 2 completions
    std::int64_t completed = 0;
    std::int64_t timeouts = 0;         ///< paths that hit the step cap, excluded
    double eps_log_mean() const;       ///< eps * ln(mean), given the eps used
    double eps = 0.0;
};

/// Mean first-passage time from the shallow minimum x = +1 to the saddle
/// x = 0 in the frozen potential U(x). Path i uses stream i of `seed`.
ExitTimeEstimate mean_exit_time(const SwitchingPotential& potential, double eps,
                                double dt, std::uint64_t seed, std::int64_t n_paths,
                                std::int64_t max_steps = 100'000'000);

}  // namespace srmc
