#pragma once

// Seeded simulation of the periodically driven chain and statistical
// estimates of its stationary law and SPA coefficient.

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "srmc/chain.hpp"

namespace srmc {

struct SimConfig {
    std::uint64_t seed = 0;
    std::int64_t periods = 1000;   ///< retained full periods 2m per replica
    std::int64_t burn_in = 10;     ///< discarded periods before statistics
    std::int64_t replicas = 1;     ///< independent streams, id = replica index

    /// Throws InvalidParameter unless periods >= 1, burn_in >= 0, replicas >= 1.
    void validate() const;
};

/// States X(k) in {-1, +1} for k = 0 .. (burn_in + periods) * 2m - 1.
struct Trajectory {
    std::vector<std::int8_t> states;
    std::int64_t burn_in_steps = 0;

    std::span<const std::int8_t> retained() const {
        return std::span<const std::int8_t>(states).subspan(
            static_cast<std::size_t>(burn_in_steps));
    }
};

/// Simulates one replica. X(0) is drawn from the exact pi(0); step k uses the
/// first-half matrix when k mod 2m < m. Uses the same stream as replica
/// `replica` of estimate_spa, so a trace matches the estimate's path.
/// Throws DegenerateChain when the stationary law is not unique.
Trajectory simulate_chain(const ChainParams& params, NoiseLevel noise,
                          const SimConfig& config, std::int64_t replica = 0);

struct EmpiricalDistribution {
    StationaryDistribution estimate;
    std::vector<double> std_error;  ///< per phase, for P(X = -1); NaN if 1 period
    std::int64_t periods = 0;
};

/// Per-phase occupation frequencies. Standard errors come from batch means
/// over up to 50 contiguous blocks of periods. Throws LengthMismatch unless
/// the length is a positive multiple of 2m.
EmpiricalDistribution empirical_distribution(std::span<const std::int8_t> states,
                                             std::int64_t half_period);

struct SpaEstimate {
    double eta_hat = 0.0;               ///< |mean xi|^2 / |c|^2
    std::optional<double> std_error;    ///< jackknife over replicas; absent for 1
    std::int64_t n_windows = 0;         ///< periods used, all replicas
    std::complex<double> mean_component;
    double mean_window_power = 0.0;     ///< mean |xi|^2 / |c|^2 over windows
    std::vector<std::complex<double>> replica_components;
};

/// Streams every replica, averages the per-period xi_m(1) before taking the
/// modulus, and divides by the input power. Bit-identical for identical
/// inputs regardless of thread count.
SpaEstimate estimate_spa(const ChainParams& params, NoiseLevel noise,
                         const SimConfig& config);

}  // namespace srmc
