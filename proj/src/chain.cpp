#include "srmc/chain.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

namespace srmc {

namespace {

bool in_unit_interval(double v) { return v >= 0.0 && v <= 1.0; }

void require_mixing(const RateParams& r) {
    const double s = r.deep_escape + r.shallow_escape;
    if (s == 0.0) {
        throw DegenerateChain(
            "phi + psi = 0: chain never moves, stationary law not unique");
    }
    if (s >= 2.0) {
        throw DegenerateChain(
            "phi = psi = 1: chain flips deterministically, stationary law not "
            "unique");
    }
}

// Solves A z = rhs with partial pivoting. Returns false if A is singular.
bool solve_2x2(std::array<std::array<double, 3>, 2> rows,
               std::array<double, 2>& z) {
    if (std::abs(rows[1][0]) > std::abs(rows[0][0])) std::swap(rows[0], rows[1]);
    if (rows[0][0] == 0.0) return false;
    const double f = rows[1][0] / rows[0][0];
    for (int j = 0; j < 3; ++j) rows[1][j] -= f * rows[0][j];
    if (rows[1][1] == 0.0) return false;
    z[1] = rows[1][2] / rows[1][1];
    z[0] = (rows[0][2] - rows[0][1] * z[1]) / rows[0][0];
    return true;
}

StatePair apply_transposed(const Mat2& P, const StatePair& pi) {
    return {P.m00 * pi.minus + P.m10 * pi.plus,
            P.m01 * pi.minus + P.m11 * pi.plus};
}

StatePair normalized(StatePair pi) {
    const double total = pi.minus + pi.plus;
    return {pi.minus / total, pi.plus / total};
}

}  // namespace

ChainParams::ChainParams(double deep_prefactor, double shallow_prefactor,
                         double shallow_depth, double deep_depth,
                         std::int64_t half_period)
    : deep_prefactor_(deep_prefactor),
      shallow_prefactor_(shallow_prefactor),
      shallow_depth_(shallow_depth),
      deep_depth_(deep_depth),
      half_period_(half_period) {
    if (!in_unit_interval(deep_prefactor) || !in_unit_interval(shallow_prefactor)) {
        throw InvalidParameter("prefactors p and q must lie in [0, 1]");
    }
    if (deep_prefactor + shallow_prefactor <= 0.0) {
        throw InvalidParameter("p + q must be positive (p = q = 0 has no dynamics)");
    }
    if (!(shallow_depth > 0.0) || !(deep_depth > shallow_depth) ||
        !std::isfinite(deep_depth)) {
        throw InvalidParameter("well depths must satisfy 0 < v < V < inf");
    }
    if (half_period < 1) {
        throw InvalidParameter("half period m must be at least 1");
    }
}

ChainParams ChainParams::with_half_period(std::int64_t m) const {
    return {deep_prefactor_, shallow_prefactor_, shallow_depth_, deep_depth_, m};
}

ChainParams ChainParams::with_prefactors(double deep_prefactor,
                                         double shallow_prefactor) const {
    return {deep_prefactor, shallow_prefactor, shallow_depth_, deep_depth_,
            half_period_};
}

NoiseLevel NoiseLevel::from_x(double x) {
    if (!in_unit_interval(x)) {
        throw InvalidParameter("noise variable x must lie in [0, 1]");
    }
    return NoiseLevel(x);
}

NoiseLevel NoiseLevel::from_eps(double eps) { return NoiseLevel(x_from_eps(eps)); }

double NoiseLevel::eps() const noexcept { return eps_from_x(x_); }

double eps_from_x(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return std::numeric_limits<double>::infinity();
    return -1.0 / std::log(x);
}

double x_from_eps(double eps) {
    if (std::isnan(eps) || eps < 0.0) {
        throw InvalidParameter("noise level eps must be non-negative");
    }
    if (eps == 0.0) return 0.0;
    if (std::isinf(eps)) return 1.0;
    return std::exp(-1.0 / eps);
}

StationaryDistribution::StationaryDistribution(std::vector<StatePair> entries)
    : entries_(std::move(entries)) {
    if (entries_.empty() || entries_.size() % 2 != 0) {
        throw InvalidParameter("stationary distribution needs 2m > 0 entries");
    }
    for (std::size_t l = 0; l < entries_.size(); ++l) {
        const auto& e = entries_[l];
        if (!(std::abs(e.minus + e.plus - 1.0) <= 1e-9)) {
            std::ostringstream os;
            os << "entry " << l << " does not sum to one";
            throw InvalidParameter(os.str());
        }
    }
}

double int_power(double base, std::uint64_t n) noexcept {
    double result = 1.0;
    while (n > 0) {
        if (n & 1U) result *= base;
        base *= base;
        n >>= 1U;
    }
    return result;
}

RateParams rates(const ChainParams& params, NoiseLevel noise) {
    const double x = noise.x();
    return {params.deep_prefactor() * std::pow(x, params.deep_depth()),
            params.shallow_prefactor() * std::pow(x, params.shallow_depth())};
}

TransitionPair transition_matrices(const RateParams& r) {
    const double phi = r.deep_escape;
    const double psi = r.shallow_escape;
    return {{1.0 - phi, phi, psi, 1.0 - psi}, {1.0 - psi, psi, phi, 1.0 - phi}};
}

Mat2 matrix_power_2x2(const Mat2& M, std::int64_t n) {
    if (n < 1) throw InvalidParameter("matrix power exponent must be >= 1");
    if (std::abs(M.m00 + M.m01 - 1.0) > 1e-12 ||
        std::abs(M.m10 + M.m11 - 1.0) > 1e-12) {
        throw InvalidParameter("matrix_power_2x2 expects a row-stochastic matrix");
    }
    // With a row-stochastic M, 1 - M00 = M01 and 1 - M11 = M10.
    const double leave_minus = M.m01;
    const double leave_plus = M.m10;
    const double denom = leave_minus + leave_plus;
    if (denom == 0.0) {
        throw IdentityMatrix("closed-form power undefined for the identity");
    }
    const double rn = int_power(1.0 - denom, static_cast<std::uint64_t>(n));
    return {(leave_plus + rn * leave_minus) / denom,
            (leave_minus - rn * leave_minus) / denom,
            (leave_plus - rn * leave_plus) / denom,
            (leave_minus + rn * leave_plus) / denom};
}

Mat2 monodromy(const ChainParams& params, NoiseLevel noise) {
    const RateParams r = rates(params, noise);
    const double phi = r.deep_escape;
    const double psi = r.shallow_escape;
    const double s = phi + psi;
    if (s == 0.0) return Mat2::identity();

    const double rm = int_power(1.0 - s, static_cast<std::uint64_t>(params.half_period()));
    const double r2m = rm * rm;
    const double mid = rm * (phi - psi);
    return {(phi - mid + r2m * phi) / s, (phi - mid - r2m * psi) / s,
            (psi + mid - r2m * phi) / s, (psi + mid + r2m * psi) / s};
}

StationaryDistribution stationary_distribution(const ChainParams& params,
                                               NoiseLevel noise) {
    const RateParams r = rates(params, noise);
    require_mixing(r);
    const double phi = r.deep_escape;
    const double psi = r.shallow_escape;
    const double s = phi + psi;
    const double base = 1.0 - s;
    const auto m = static_cast<std::uint64_t>(params.half_period());
    const double amplitude = (phi - psi) / s / (1.0 + int_power(base, m));

    std::vector<StatePair> entries(2 * m);
    for (std::uint64_t l = 0; l < m; ++l) {
        const double transient = amplitude * int_power(base, l);
        const StatePair first{psi / s + transient, phi / s - transient};
        entries[l] = first;
        entries[l + m] = {first.plus, first.minus};
    }
    return StationaryDistribution(std::move(entries));
}

StationaryDistribution stationary_oracle(const ChainParams& params,
                                         NoiseLevel noise) {
    const RateParams r = rates(params, noise);
    require_mixing(r);
    const TransitionPair P = transition_matrices(r);
    const Mat2 first_t = P.first_half.transposed();
    const Mat2 second_t = P.second_half.transposed();
    const std::int64_t m = params.half_period();

    Mat2 transfer = Mat2::identity();
    for (std::int64_t k = 0; k < m; ++k) transfer = first_t * transfer;
    for (std::int64_t k = 0; k < m; ++k) transfer = second_t * transfer;

    // (transfer - E) pi = 0, first row kept, second row replaced by the
    // normalization pi- + pi+ = 1.
    std::array<double, 2> fixed{};
    if (!solve_2x2({{{transfer.m00 - 1.0, transfer.m01, 0.0}, {1.0, 1.0, 1.0}}},
                   fixed)) {
        throw DegenerateChain("monodromy fixed-point system is singular");
    }

    std::vector<StatePair> entries(static_cast<std::size_t>(2 * m));
    StatePair pi = normalized({fixed[0], fixed[1]});
    for (std::int64_t l = 0; l < 2 * m; ++l) {
        entries[static_cast<std::size_t>(l)] = pi;
        pi = normalized(apply_transposed(l < m ? P.first_half : P.second_half, pi));
    }
    return StationaryDistribution(std::move(entries));
}

}  // namespace srmc
