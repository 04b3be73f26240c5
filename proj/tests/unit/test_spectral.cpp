#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "srmc/spectral.hpp"
#include "verification_grid.hpp"

namespace {

using namespace srmc;

const ChainParams kHand(1.0, 1.0, 1.0, 2.0, 1);

// Power of the depth-switching input at the forcing frequency, by direct DFT
// of the square wave taking value v on the first half period and V on the
// second.
double input_power_by_dft(double v, double V, std::int64_t m) {
    std::complex<double> sum{0.0, 0.0};
    const auto n = static_cast<double>(2 * m);
    for (std::int64_t k = 0; k < 2 * m; ++k) {
        const double level = k < m ? v : V;
        sum += level * std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(k) / n);
    }
    return std::norm(sum / n);
}

TEST(InputPower, Examples) {
    EXPECT_NEAR(input_signal_power(ChainParams(0.5, 0.5, 2, 4, 1)), 1.0, 1e-15);
    EXPECT_NEAR(input_signal_power(ChainParams(0.5, 0.5, 1, 3, 2)), 0.5, 1e-15);
    const double limit = 4.0 / (std::numbers::pi * std::numbers::pi);
    EXPECT_NEAR(input_signal_power(ChainParams(0.5, 0.5, 1, 3, 1'000'000)), limit, 1e-6 * limit);
}

TEST(InputPower, MatchesDirectDft) {
    for (std::int64_t m : {1, 2, 3, 7, 50, 333}) {
        for (auto [v, V] : {std::pair{1.0, 2.0}, {0.3, 4.5}, {2.0, 4.0}}) {
            const double expected = input_power_by_dft(v, V, m);
            EXPECT_NEAR(input_signal_power(ChainParams(0.5, 0.5, v, V, m)), expected,
                        1e-12 * expected);
        }
    }
}

TEST(OutputComponent, Examples) {
    const NoiseLevel x = NoiseLevel::from_x(0.5);
    const auto direct = expected_output_component(kHand, x);
    EXPECT_NEAR(direct.real(), 0.2, 1e-15);
    EXPECT_NEAR(direct.imag(), 0.0, 1e-15);
    const auto closed = expected_output_component_closed_form(kHand, x);
    EXPECT_NEAR(closed.real(), 0.2, 1e-15);
    EXPECT_NEAR(closed.imag(), 0.0, 1e-15);

    const ChainParams equal(0.8, 0.2, 1, 3, 6);
    EXPECT_LT(std::abs(expected_output_component(equal, x)), 1e-16);
    EXPECT_EQ(expected_output_component_closed_form(equal, x), std::complex<double>(0.0, 0.0));
}

TEST(OutputComponent, AtUnitNoise) {
    const NoiseLevel one = NoiseLevel::from_x(1.0);
    for (auto [p, q] : {std::pair{0.9, 0.3}, {0.2, 0.7}}) {
        for (std::int64_t m : {1, 2, 5, 40}) {
            const ChainParams c(p, q, 1, 2, m);
            const auto closed = expected_output_component_closed_form(c, one);
            const auto direct = expected_output_component(c, one);
            EXPECT_NEAR(closed.real(), direct.real(), 1e-14);
            EXPECT_NEAR(closed.imag(), direct.imag(), 1e-14);
        }
        // With m = 1 the component is real; its sign follows psi - phi, the
        // same orientation that gives +0.2 on the hand instance.
        const auto single = expected_output_component(ChainParams(p, q, 1, 2, 1), one);
        EXPECT_NEAR(single.imag(), 0.0, 1e-15);
        EXPECT_NEAR(single.real(), -(p - q) / (2.0 - p - q), 1e-15);
    }
}

TEST(OutputComponent, ConjugateSymmetry) {
    for (const auto& [params, noise] : verification::verification_grid()) {
        const StationaryDistribution pi = stationary_distribution(params, noise);
        const auto first = output_component(pi, 1);
        const auto last = output_component(pi, params.period() - 1);
        ASSERT_NEAR(first.real(), last.real(), 1e-14);
        ASSERT_NEAR(first.imag(), -last.imag(), 1e-14);
    }
}

TEST(OutputComponent, HarmonicZeroIsMeanDifference) {
    const StationaryDistribution pi({{0.25, 0.75}, {0.5, 0.5}, {0.75, 0.25}, {0.5, 0.5}});
    EXPECT_NEAR(output_component(pi, 0).real(), 0.0, 1e-15);
    const auto c1 = output_component(pi, 1);
    EXPECT_NEAR(c1.real(), 0.25, 1e-15);
    EXPECT_NEAR(c1.imag(), 0.0, 1e-15);
    EXPECT_EQ(output_component(pi, 5), c1);
}

TEST(Spa, Examples) {
    EXPECT_NEAR(spa(kHand, NoiseLevel::from_x(0.5)), 0.16, 1e-15);
    EXPECT_NEAR(spa_from_distribution(kHand, NoiseLevel::from_x(0.5)).eta, 0.16, 1e-15);
    EXPECT_EQ(spa(ChainParams(0.8, 0.2, 1, 3, 4), NoiseLevel::from_x(0.5)), 0.0);
    for (std::int64_t m : {1, 3, 500}) {
        EXPECT_EQ(spa(ChainParams(0.3, 0.6, 1, 2.5, m), NoiseLevel::from_x(0.0)), 0.0);
    }
    const SpaResult r = spa_closed_form(kHand, NoiseLevel::from_x(0.5));
    EXPECT_NEAR(r.input_power, 0.25, 1e-15);
    EXPECT_NEAR(std::abs(r.output_component), 0.2, 1e-15);
}

TEST(Spa, DefinitionMatchesClosedFormOnGrid) {
    for (const auto& [params, noise] : verification::verification_grid()) {
        const double closed = spa_closed_form(params, noise).eta;
        const double defined = spa_from_distribution(params, noise).eta;
        ASSERT_GE(closed, 0.0);
        ASSERT_TRUE(verification::close_relative(closed, defined, 1e-10, 1e-20))
            << "p=" << params.deep_prefactor() << " q=" << params.shallow_prefactor()
            << " beta=" << params.depth_ratio() << " m=" << params.half_period()
            << " x=" << noise.x() << ": " << closed << " vs " << defined;
    }
}

TEST(Spa, ZeroLocus) {
    for (auto [p, q, v, V] : {std::tuple{0.8, 0.2, 1.0, 3.0}, {0.9, 0.1, 0.5, 1.0},
                              {0.6, 0.5, 2.0, 4.0}}) {
        const ChainParams c(p, q, v, V, 7);
        const double x_star = std::pow(q / p, 1.0 / (V - v));
        EXPECT_LT(spa(c, NoiseLevel::from_x(x_star)), 1e-14);
        EXPECT_GT(spa(c, NoiseLevel::from_x(x_star * 0.9)), 0.0);
        EXPECT_GT(spa(c, NoiseLevel::from_x(std::min(1.0, x_star * 1.1))), 0.0);
    }
    // p <= q: no zero strictly inside (0, 1).
    for (auto [p, q] : {std::pair{0.2, 0.8}, {0.5, 0.5}, {0.0, 0.4}}) {
        const ChainParams c(p, q, 1, 2, 5);
        for (int i = 1; i < 1000; ++i) {
            ASSERT_GT(spa(c, NoiseLevel::from_x(i / 1000.0)), 0.0);
        }
    }
}

}  // namespace
