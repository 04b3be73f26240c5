#pragma once

// Two-state Markov chain with transition probabilities that switch between
// two matrices every half period. State order everywhere is (-1, +1), i.e.
// index 0 is the state -1 and index 1 is the state +1.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "srmc/errors.hpp"

namespace srmc {

/// Parameters of the chain family.
///
/// The state -1 sits in the deep well (depth double `deep_depth`) during the
/// first half period; its one-step escape probability is
/// `deep_prefactor * x^deep_depth`. The +1 state escapes with
/// `shallow_prefactor * x^shallow_depth`. In the second half period the
/// roles swap.
class ChainParams {
public:
    /// Throws InvalidParameter unless 0 <= p, q <= 1, p + q > 0,
    /// 0 < v < V < inf and m >= 1.
    ChainParams(double deep_prefactor, double shallow_prefactor,
                double shallow_depth, double deep_depth,
                std::int64_t half_period);

    double deep_prefactor() const noexcept { return deep_prefactor_; }
    double shallow_prefactor() const noexcept { return shallow_prefactor_; }
    double shallow_depth() const noexcept { return shallow_depth_; }
    double deep_depth() const noexcept { return deep_depth_; }
    std::int64_t half_period() const noexcept { return half_period_; }
    std::int64_t period() const noexcept { return 2 * half_period_; }

    /// Depth ratio v / V, in (0, 1).
    double depth_ratio() const noexcept { return shallow_depth_ / deep_depth_; }
    double depth_gap() const noexcept { return deep_depth_ - shallow_depth_; }

    ChainParams with_half_period(std::int64_t m) const;
    ChainParams with_prefactors(double deep_prefactor,
                                double shallow_prefactor) const;

private:
    double deep_prefactor_;
    double shallow_prefactor_;
    double shallow_depth_;
    double deep_depth_;
    std::int64_t half_period_;
};

/// Noise level stored as x = exp(-1/eps) in [0, 1].
class NoiseLevel {
public:
    /// Throws InvalidParameter unless 0 <= x <= 1.
    static NoiseLevel from_x(double x);
    /// eps = 0 maps to x = 0, eps = +inf to x = 1. Throws for eps < 0 or NaN.
    static NoiseLevel from_eps(double eps);

    double x() const noexcept { return x_; }
    /// -1 / ln x; returns +inf at x = 1 and 0 at x = 0.
    double eps() const noexcept;

private:
    explicit NoiseLevel(double x) : x_(x) {}
    double x_;
};

double eps_from_x(double x);
double x_from_eps(double eps);

/// One-step escape probabilities of the first half period.
struct RateParams {
    double deep_escape;     ///< p x^V, leaves the deep state
    double shallow_escape;  ///< q x^v, leaves the shallow state
};

/// Row-major 2x2 matrix.
struct Mat2 {
    double m00 = 0.0, m01 = 0.0, m10 = 0.0, m11 = 0.0;

    static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    constexpr Mat2 transposed() const { return {m00, m10, m01, m11}; }
    friend constexpr Mat2 operator*(const Mat2& a, const Mat2& b) {
        return {a.m00 * b.m00 + a.m01 * b.m10, a.m00 * b.m01 + a.m01 * b.m11,
                a.m10 * b.m00 + a.m11 * b.m10, a.m10 * b.m01 + a.m11 * b.m11};
    }
    friend constexpr bool operator==(const Mat2&, const Mat2&) = default;
};

struct TransitionPair {
    Mat2 first_half;   ///< in force for phases 0 .. m-1
    Mat2 second_half;  ///< in force for phases m .. 2m-1
};

/// Probabilities of the two states at one phase of the period.
struct StatePair {
    double minus;  ///< P(X = -1)
    double plus;   ///< P(X = +1)
};

/// Per-phase state laws pi(l), l = 0 .. 2m-1, invariant under one period.
class StationaryDistribution {
public:
    /// Throws InvalidParameter if the size is odd or zero, or any pair does
    /// not sum to one within 1e-9.
    explicit StationaryDistribution(std::vector<StatePair> entries);

    std::size_t size() const noexcept { return entries_.size(); }
    std::int64_t half_period() const noexcept {
        return static_cast<std::int64_t>(entries_.size() / 2);
    }
    const StatePair& operator[](std::size_t l) const { return entries_[l]; }
    std::span<const StatePair> entries() const noexcept { return entries_; }

private:
    std::vector<StatePair> entries_;
};

/// base^n by repeated squaring; keeps the sign of a negative base exact.
double int_power(double base, std::uint64_t n) noexcept;

RateParams rates(const ChainParams& params, NoiseLevel noise);

TransitionPair transition_matrices(const RateParams& r);

/// Closed-form n-th power of a row-stochastic 2x2 matrix, n >= 1.
/// Throws IdentityMatrix when M is the identity (the formula divides by
/// 2 - M00 - M11); callers use the identity directly in that case.
Mat2 matrix_power_2x2(const Mat2& M, std::int64_t n);

/// Full-period transfer matrix (P2*)^m (P1*)^m acting on column vectors of
/// state probabilities, via its three-term closed form.
Mat2 monodromy(const ChainParams& params, NoiseLevel noise);

/// Closed-form stationary distribution. Throws DegenerateChain when
/// phi + psi is 0 or 2.
StationaryDistribution stationary_distribution(const ChainParams& params,
                                               NoiseLevel noise);

/// Independent route: monodromy by repeated multiplication, fixed point by
/// Gaussian elimination, forward propagation step by step.
StationaryDistribution stationary_oracle(const ChainParams& params,
                                         NoiseLevel noise);

}  // namespace srmc
