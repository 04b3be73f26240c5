#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "srmc/chain.hpp"
#include "verification_grid.hpp"

namespace {

using namespace srmc;

const ChainParams kHand(1.0, 1.0, 1.0, 2.0, 1);  // p = q = 1, v = 1, V = 2, m = 1

void expect_mat_near(const Mat2& a, const Mat2& b, double tol) {
    EXPECT_NEAR(a.m00, b.m00, tol);
    EXPECT_NEAR(a.m01, b.m01, tol);
    EXPECT_NEAR(a.m10, b.m10, tol);
    EXPECT_NEAR(a.m11, b.m11, tol);
}

Mat2 iterate(const Mat2& M, std::int64_t n) {
    Mat2 out = Mat2::identity();
    for (std::int64_t i = 0; i < n; ++i) out = out * M;
    return out;
}

TEST(ChainParams, ValidatesRanges) {
    EXPECT_THROW(ChainParams(-0.1, 0.5, 1, 2, 1), InvalidParameter);
    EXPECT_THROW(ChainParams(0.5, 1.1, 1, 2, 1), InvalidParameter);
    EXPECT_THROW(ChainParams(0.0, 0.0, 1, 2, 1), InvalidParameter);
    EXPECT_THROW(ChainParams(0.5, 0.5, 2, 2, 1), InvalidParameter);
    EXPECT_THROW(ChainParams(0.5, 0.5, 0, 2, 1), InvalidParameter);
    EXPECT_THROW(ChainParams(0.5, 0.5, 1, INFINITY, 1), InvalidParameter);
    EXPECT_THROW(ChainParams(0.5, 0.5, 1, 2, 0), InvalidParameter);
    EXPECT_THROW(ChainParams(NAN, 0.5, 1, 2, 1), InvalidParameter);
    const ChainParams ok(0.5, 0.25, 1, 4, 3);
    EXPECT_DOUBLE_EQ(ok.depth_ratio(), 0.25);
    EXPECT_EQ(ok.period(), 6);
}

TEST(NoiseLevel, RoundTripAndEndpoints) {
    EXPECT_EQ(NoiseLevel::from_eps(0.0).x(), 0.0);
    EXPECT_EQ(NoiseLevel::from_eps(INFINITY).x(), 1.0);
    EXPECT_EQ(NoiseLevel::from_x(0.0).eps(), 0.0);
    EXPECT_TRUE(std::isinf(NoiseLevel::from_x(1.0).eps()));
    for (double x : {1e-300, 1e-6, 0.01, 0.3, 0.5, 0.7, 0.99, 1.0 - 1e-9}) {
        // Relative error scales with |ln x|, the condition number of exp.
        const double cond = std::max(1.0, std::abs(std::log(x)));
        EXPECT_NEAR(x_from_eps(eps_from_x(x)), x,
                    4 * std::numeric_limits<double>::epsilon() * cond * x)
            << x;
    }
    for (double eps : {0.05, 0.4, 1.0, 7.0, 1e3}) {
        EXPECT_NEAR(eps_from_x(x_from_eps(eps)), eps, 1e-13 * eps) << eps;
    }
    EXPECT_THROW(NoiseLevel::from_x(-0.1), InvalidParameter);
    EXPECT_THROW(NoiseLevel::from_x(1.1), InvalidParameter);
    EXPECT_THROW(NoiseLevel::from_eps(-1.0), InvalidParameter);
    EXPECT_THROW(NoiseLevel::from_eps(NAN), InvalidParameter);
}

TEST(Rates, Examples) {
    const RateParams r = rates(kHand, NoiseLevel::from_x(0.5));
    EXPECT_DOUBLE_EQ(r.deep_escape, 0.25);
    EXPECT_DOUBLE_EQ(r.shallow_escape, 0.5);

    const RateParams zero = rates(ChainParams(0.3, 0.7, 1, 3, 4), NoiseLevel::from_x(0.0));
    EXPECT_EQ(zero.deep_escape, 0.0);
    EXPECT_EQ(zero.shallow_escape, 0.0);

    const RateParams eq = rates(ChainParams(0.8, 0.2, 1, 3, 4), NoiseLevel::from_x(0.5));
    EXPECT_DOUBLE_EQ(eq.deep_escape, 0.1);
    EXPECT_DOUBLE_EQ(eq.shallow_escape, 0.1);
}

TEST(Rates, BoundedAndMonotoneInX) {
    const ChainParams c(0.6, 0.9, 0.7, 2.5, 3);
    double prev_phi = 0.0;
    double prev_psi = 0.0;
    for (int i = 0; i <= 100; ++i) {
        const RateParams r = rates(c, NoiseLevel::from_x(i / 100.0));
        EXPECT_GE(r.deep_escape, prev_phi);
        EXPECT_GE(r.shallow_escape, prev_psi);
        EXPECT_LE(r.deep_escape, 0.6);
        EXPECT_LE(r.shallow_escape, 0.9);
        prev_phi = r.deep_escape;
        prev_psi = r.shallow_escape;
    }
}

TEST(TransitionMatrices, Examples) {
    const TransitionPair id = transition_matrices({0.0, 0.0});
    EXPECT_EQ(id.first_half, Mat2::identity());
    EXPECT_EQ(id.second_half, Mat2::identity());

    const TransitionPair t = transition_matrices({0.25, 0.5});
    EXPECT_EQ(t.first_half, (Mat2{0.75, 0.25, 0.5, 0.5}));
    EXPECT_EQ(t.second_half, (Mat2{0.5, 0.5, 0.25, 0.75}));

    const TransitionPair flip = transition_matrices({1.0, 1.0});
    EXPECT_EQ(flip.first_half, (Mat2{0.0, 1.0, 1.0, 0.0}));
}

TEST(TransitionMatrices, RowStochasticAndSwapped) {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const RateParams r{u(gen), u(gen)};
        const TransitionPair t = transition_matrices(r);
        for (const Mat2& M : {t.first_half, t.second_half}) {
            EXPECT_NEAR(M.m00 + M.m01, 1.0, 1e-15);
            EXPECT_NEAR(M.m10 + M.m11, 1.0, 1e-15);
            for (double e : {M.m00, M.m01, M.m10, M.m11}) {
                EXPECT_GE(e, 0.0);
                EXPECT_LE(e, 1.0);
            }
        }
        EXPECT_EQ(t.second_half, transition_matrices({r.shallow_escape, r.deep_escape}).first_half);
    }
}

TEST(MatrixPower, Examples) {
    EXPECT_THROW(matrix_power_2x2(Mat2::identity(), 5), IdentityMatrix);
    const Mat2 M{0.75, 0.25, 0.5, 0.5};
    expect_mat_near(matrix_power_2x2(M, 2), {0.6875, 0.3125, 0.625, 0.375}, 1e-15);
    expect_mat_near(matrix_power_2x2(M, 1), M, 1e-15);
    EXPECT_THROW(matrix_power_2x2(M, 0), InvalidParameter);
    EXPECT_THROW(matrix_power_2x2(Mat2{0.5, 0.6, 0.5, 0.5}, 2), InvalidParameter);
}

TEST(MatrixPower, MatchesIteratedMultiplication) {
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<std::int64_t> n_dist(1, 64);
    for (int i = 0; i < 200; ++i) {
        const double a = u(gen);
        const double b = u(gen);
        const Mat2 M{1.0 - a, a, b, 1.0 - b};
        const std::int64_t n = n_dist(gen);
        expect_mat_near(matrix_power_2x2(M, n), iterate(M, n), 1e-12);
    }
}

TEST(Monodromy, Examples) {
    expect_mat_near(monodromy(kHand, NoiseLevel::from_x(0.5)),
                    {0.4375, 0.375, 0.5625, 0.625}, 1e-15);
    EXPECT_EQ(monodromy(ChainParams(0.4, 0.6, 1, 2, 7), NoiseLevel::from_x(0.0)),
              Mat2::identity());
}

TEST(Monodromy, MatchesPowerProduct) {
    for (const auto& [params, noise] : verification::verification_grid()) {
        const TransitionPair t = transition_matrices(rates(params, noise));
        const std::int64_t m = params.half_period();
        const Mat2 expected = iterate(t.second_half.transposed(), m) *
                              iterate(t.first_half.transposed(), m);
        expect_mat_near(monodromy(params, noise), expected, 1e-12);
    }
}

TEST(Stationary, HandInstance) {
    const NoiseLevel x = NoiseLevel::from_x(0.5);
    for (const auto& pi : {stationary_distribution(kHand, x), stationary_oracle(kHand, x)}) {
        ASSERT_EQ(pi.size(), 2u);
        EXPECT_NEAR(pi[0].minus, 0.4, 1e-15);
        EXPECT_NEAR(pi[0].plus, 0.6, 1e-15);
        EXPECT_NEAR(pi[1].minus, 0.6, 1e-15);
        EXPECT_NEAR(pi[1].plus, 0.4, 1e-15);
    }
}

TEST(Stationary, EqualRatesGiveUniform) {
    for (std::int64_t m : {1, 4, 9}) {
        const ChainParams c(0.8, 0.2, 1, 3, m);
        const NoiseLevel x = NoiseLevel::from_x(0.5);
        for (const auto& pi : {stationary_distribution(c, x), stationary_oracle(c, x)}) {
            for (const auto& e : pi.entries()) {
                EXPECT_NEAR(e.minus, 0.5, 1e-15);
                EXPECT_NEAR(e.plus, 0.5, 1e-15);
            }
        }
    }
}

TEST(Stationary, DegenerateChains) {
    EXPECT_THROW(stationary_distribution(ChainParams(0.5, 0.5, 1, 2, 3), NoiseLevel::from_x(0.0)),
                 DegenerateChain);
    EXPECT_THROW(stationary_distribution(ChainParams(1.0, 1.0, 1, 2, 3), NoiseLevel::from_x(1.0)),
                 DegenerateChain);
    EXPECT_THROW(stationary_oracle(ChainParams(0.5, 0.5, 1, 2, 3), NoiseLevel::from_x(0.0)),
                 DegenerateChain);
}

TEST(Stationary, GridInvariantsAndOracleAgreement) {
    const auto grid = verification::verification_grid();
    ASSERT_GE(grid.size(), 500u);
    for (const auto& [params, noise] : grid) {
        const StationaryDistribution pi = stationary_distribution(params, noise);
        const StationaryDistribution oracle = stationary_oracle(params, noise);
        const auto m = static_cast<std::size_t>(params.half_period());
        ASSERT_EQ(pi.size(), 2 * m);
        const TransitionPair t = transition_matrices(rates(params, noise));
        for (std::size_t l = 0; l < 2 * m; ++l) {
            ASSERT_NEAR(pi[l].minus, oracle[l].minus, 1e-10);
            ASSERT_NEAR(pi[l].plus, oracle[l].plus, 1e-10);
            ASSERT_NEAR(pi[l].minus + pi[l].plus, 1.0, 1e-12);
            if (l < m) {
                ASSERT_NEAR(pi[l + m].minus, pi[l].plus, 1e-12);
                ASSERT_NEAR(pi[l + m].plus, pi[l].minus, 1e-12);
            }
            // One step forward: row vector times the matrix in force at l.
            const Mat2& P = l < m ? t.first_half : t.second_half;
            const std::size_t next = (l + 1) % (2 * m);
            ASSERT_NEAR(pi[l].minus * P.m00 + pi[l].plus * P.m10, pi[next].minus, 1e-10);
            ASSERT_NEAR(pi[l].minus * P.m01 + pi[l].plus * P.m11, pi[next].plus, 1e-10);
        }
    }
}

TEST(Stationary, FullPeriodPropagationReturnsStart) {
    const ChainParams c(0.3, 0.9, 0.4, 1.0, 17);
    const NoiseLevel x = NoiseLevel::from_x(0.7);
    const StationaryDistribution pi = stationary_distribution(c, x);
    const TransitionPair t = transition_matrices(rates(c, x));
    double minus = pi[0].minus;
    double plus = pi[0].plus;
    for (std::int64_t k = 0; k < c.period(); ++k) {
        const Mat2& P = k < c.half_period() ? t.first_half : t.second_half;
        const double nm = minus * P.m00 + plus * P.m10;
        const double np = minus * P.m01 + plus * P.m11;
        minus = nm;
        plus = np;
    }
    EXPECT_NEAR(minus, pi[0].minus, 1e-10);
    EXPECT_NEAR(plus, pi[0].plus, 1e-10);
}

TEST(Stationary, GoldenOracleValues) {
    std::ifstream in(std::string(SRMC_TEST_DATA_DIR) + "/stationary_golden.csv");
    ASSERT_TRUE(in) << "missing golden file";
    std::string line;
    std::getline(in, line);
    ASSERT_EQ(line, "l,pi_minus,pi_plus");
    const ChainParams c(0.5, 0.5, 2.0, 4.0, 3);
    const NoiseLevel x = NoiseLevel::from_x(0.7);
    const StationaryDistribution pi = stationary_distribution(c, x);
    const StationaryDistribution oracle = stationary_oracle(c, x);
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string cell;
        std::getline(ss, cell, ',');
        const auto l = static_cast<std::size_t>(std::stoul(cell));
        std::getline(ss, cell, ',');
        const double minus = std::stod(cell);
        std::getline(ss, cell, ',');
        const double plus = std::stod(cell);
        EXPECT_NEAR(oracle[l].minus, minus, 1e-14);
        EXPECT_NEAR(oracle[l].plus, plus, 1e-14);
        EXPECT_NEAR(pi[l].minus, minus, 1e-12);
        EXPECT_NEAR(pi[l].plus, plus, 1e-12);
        ++rows;
    }
    EXPECT_EQ(rows, 6u);
}

TEST(StationaryDistribution, ValidatesEntries) {
    EXPECT_THROW(StationaryDistribution({}), InvalidParameter);
    EXPECT_THROW(StationaryDistribution({{0.5, 0.5}}), InvalidParameter);
    EXPECT_THROW(StationaryDistribution({{0.5, 0.6}, {0.5, 0.5}}), InvalidParameter);
    EXPECT_NO_THROW(StationaryDistribution({{0.5, 0.5}, {0.25, 0.75}}));
}

}  // namespace
