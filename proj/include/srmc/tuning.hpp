#pragma once

// Shape of the SPA curve eta_m(x) on [0, 1]: monotone (U0), a single interior
// maximum (U1), or a single interior maximum preceding an interior zero (U2),
// together with resonance location and the large-m tuning rules.

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "srmc/chain.hpp"

namespace srmc {

enum class Region { U0, U1, U2 };

std::string_view to_string(Region region) noexcept;

struct RegionClass {
    Region tag = Region::U0;
    std::optional<double> boundary_value;  ///< p_-(q) when it is real
};

/// p_-(q) together with the discriminant it was computed from.
struct BoundaryValue {
    std::optional<double> value;
    double discriminant = 0.0;
};

/// csc^2(pi / 2m), >= 1.
double csc2_factor(std::int64_t m);

/// Lower boundary p_-(q; beta, m) of the U1 region in the (p, q) square.
///
/// Root of  a p^2 - b p + beta (2 - q) q = 0  with
///   a = 1 - a_m q (1 - beta),  b = 2 - 3 (1 - beta) q + a_m (1 - beta) q^2,
/// the locus where d eta / dx vanishes at x = 1. Evaluated as
/// 2c / (b + sqrt(disc)) so it stays finite when a = 0. Absent when the
/// discriminant is negative.
BoundaryValue region_boundary(double q, double beta, std::int64_t m);

/// Region of (p, q) from the closed-form boundary. p >= q > 0 is U2
/// (p = q has its zero at x = 1); q = 0 is U0 because eta is then strictly
/// increasing. Falls back to classify_numeric when p_-(q) is not real.
RegionClass classify(const ChainParams& params);

struct Bracket {
    double lo = 0.0;
    double hi = 0.0;
    double mid() const noexcept { return 0.5 * (lo + hi); }
};

struct NumericClassification {
    RegionClass region;
    std::vector<double> maxima;   ///< interior local maxima of eta
    std::vector<double> minima;   ///< interior local minima of eta
    std::vector<Bracket> zeros;   ///< zeros of eta on (0, 1], width < 1e-12
};

/// Region found by sampling instead of the boundary formula. Samples the
/// derivative sign on a uniform grid of `grid_size` points plus a geometric
/// grid reaching down to x = 1e-12, refines each sign change by bisection to
/// relative width 1e-9 and counts it only if it persists. Throws
/// AmbiguousClassification if the extrema pattern fits none of U0/U1/U2.
NumericClassification classify_numeric(const ChainParams& params,
                                       int grid_size = 2000);

/// Analytic d eta / dx for x in (0, 1].
double spa_derivative(const ChainParams& params, NoiseLevel noise);

struct Resonance {
    double x_hat = 0.0;
    double eta_max = 0.0;
    double eps_hat() const { return eps_from_x(x_hat); }
};

/// Interior maximum of eta, located by scanning the derivative sign and
/// bisecting to |interval| < 1e-12. Absent in U0; throws BracketFailure when
/// the scan finds no + to - change.
std::optional<Resonance> find_resonance(const ChainParams& params,
                                        int scan_points = 4096);

/// Zero of eta on (0, 1]: (q/p)^(1/(V-v)) for p > q > 0, 1 for p = q.
std::optional<double> find_zero(const ChainParams& params);

/// Large-m resonance prediction
/// x_m = (pi^2 / (2 m^2 p q) * v / (V - v))^(1 / (V + v)).
/// Throws ZeroPrefactor when p q = 0.
double asymptotic_resonance(const ChainParams& params);

/// Half period that makes `eps` resonant:
/// pi / sqrt(2 p q) * sqrt(v / (V - v)) * exp((V + v) / (2 eps)).
/// Real-valued; callers round.
double optimal_half_period(double eps, double deep_prefactor,
                           double shallow_prefactor, double shallow_depth,
                           double deep_depth);

/// 4 / (V - v)^2, the large-m limit of the resonant amplification.
double max_amplification(double shallow_depth, double deep_depth);

struct TuningReport {
    RegionClass region;
    std::optional<double> x_hat;
    std::optional<double> eps_hat;
    std::optional<double> eta_max;
    std::optional<double> x_star;
    std::optional<double> x_asymptotic;  ///< absent when p q = 0
    std::optional<double> m_of_eps;      ///< optimal half period at eps_hat
    double eta_limit = 0.0;
};

TuningReport tune(const ChainParams& params);

}  // namespace srmc
