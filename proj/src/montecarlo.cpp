#include "srmc/montecarlo.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "srmc/parallel.hpp"
#include "srmc/rng.hpp"
#include "srmc/spectral.hpp"

namespace srmc {

namespace {

class ChainWalker {
public:
    ChainWalker(const ChainParams& params, NoiseLevel noise, std::uint64_t seed,
                std::int64_t replica)
        : half_(params.half_period()),
          period_(params.period()),
          rng_(seed, static_cast<std::uint64_t>(replica)) {
        const RateParams r = rates(params, noise);
        deep_ = r.deep_escape;
        shallow_ = r.shallow_escape;
        const StationaryDistribution pi = stationary_distribution(params, noise);
        state_ = rng_.uniform() < pi[0].minus ? -1 : 1;
    }

    std::int8_t state() const noexcept { return state_; }

    void advance() noexcept {
        const bool first_half = phase_ < half_;
        const double flip = (first_half == (state_ < 0)) ? deep_ : shallow_;
        if (rng_.uniform() < flip) state_ = static_cast<std::int8_t>(-state_);
        if (++phase_ == period_) phase_ = 0;
    }

private:
    std::int64_t half_;
    std::int64_t period_;
    std::int64_t phase_ = 0;
    double deep_ = 0.0;
    double shallow_ = 0.0;
    RandomStream rng_;
    std::int8_t state_ = -1;
};

struct ReplicaSums {
    std::complex<double> component_sum;
    double power_sum = 0.0;
};

}  // namespace

void SimConfig::validate() const {
    if (periods < 1) throw InvalidParameter("periods must be >= 1");
    if (burn_in < 0) throw InvalidParameter("burn_in must be >= 0");
    if (replicas < 1) throw InvalidParameter("replicas must be >= 1");
}

Trajectory simulate_chain(const ChainParams& params, NoiseLevel noise,
                          const SimConfig& config, std::int64_t replica) {
    config.validate();
    ChainWalker walker(params, noise, config.seed, replica);
    const std::int64_t total = (config.burn_in + config.periods) * params.period();
    Trajectory out;
    out.burn_in_steps = config.burn_in * params.period();
    out.states.resize(static_cast<std::size_t>(total));
    for (std::int64_t k = 0; k < total; ++k) {
        out.states[static_cast<std::size_t>(k)] = walker.state();
        walker.advance();
    }
    return out;
}

EmpiricalDistribution empirical_distribution(std::span<const std::int8_t> states,
                                             std::int64_t half_period) {
    if (half_period < 1) throw InvalidParameter("half period must be >= 1");
    const auto period = static_cast<std::size_t>(2 * half_period);
    if (states.empty() || states.size() % period != 0) {
        throw LengthMismatch("trajectory length must be a positive multiple of 2m");
    }
    const std::size_t periods = states.size() / period;
    const std::size_t batches = std::min<std::size_t>(50, periods);

    std::vector<double> total(period, 0.0);
    std::vector<double> batch_sum(period, 0.0);
    std::vector<double> batch_sq(period, 0.0);
    std::vector<double> current(period, 0.0);
    std::size_t batch = 0;
    std::size_t batch_end = periods / batches;
    std::size_t batch_start = 0;
    for (std::size_t w = 0; w < periods; ++w) {
        for (std::size_t l = 0; l < period; ++l) {
            const double minus = states[w * period + l] < 0 ? 1.0 : 0.0;
            total[l] += minus;
            current[l] += minus;
        }
        if (w + 1 == batch_end) {
            const auto len = static_cast<double>(batch_end - batch_start);
            for (std::size_t l = 0; l < period; ++l) {
                const double f = current[l] / len;
                batch_sum[l] += f;
                batch_sq[l] += f * f;
                current[l] = 0.0;
            }
            ++batch;
            batch_start = batch_end;
            batch_end = (batch + 1) * periods / batches;
        }
    }

    std::vector<StatePair> entries(period);
    std::vector<double> se(period, std::numeric_limits<double>::quiet_NaN());
    const auto n_batches = static_cast<double>(batches);
    for (std::size_t l = 0; l < period; ++l) {
        const double f = total[l] / static_cast<double>(periods);
        entries[l] = {f, 1.0 - f};
        if (batches > 1) {
            const double mean = batch_sum[l] / n_batches;
            const double var =
                std::max(0.0, (batch_sq[l] - n_batches * mean * mean) / (n_batches - 1.0));
            se[l] = std::sqrt(var / n_batches);
        }
    }
    return {StationaryDistribution(std::move(entries)), std::move(se),
            static_cast<std::int64_t>(periods)};
}

SpaEstimate estimate_spa(const ChainParams& params, NoiseLevel noise,
                         const SimConfig& config) {
    config.validate();
    // Fail before spawning work if the chain has no unique stationary law.
    (void)stationary_distribution(params, noise);

    const std::int64_t period = params.period();
    std::vector<std::complex<double>> phase(static_cast<std::size_t>(period));
    for (std::int64_t l = 0; l < period; ++l) {
        phase[static_cast<std::size_t>(l)] = std::polar(
            1.0, 2.0 * std::numbers::pi * static_cast<double>(l) / static_cast<double>(period));
    }

    std::vector<ReplicaSums> sums(static_cast<std::size_t>(config.replicas));
    detail::parallel_for(config.replicas, [&](std::int64_t r) {
        ChainWalker walker(params, noise, config.seed, r);
        for (std::int64_t k = 0; k < config.burn_in * period; ++k) walker.advance();
        ReplicaSums acc;
        for (std::int64_t w = 0; w < config.periods; ++w) {
            double re = 0.0;
            double im = 0.0;
            for (std::int64_t l = 0; l < period; ++l) {
                const double s = walker.state();
                re += s * phase[static_cast<std::size_t>(l)].real();
                im += s * phase[static_cast<std::size_t>(l)].imag();
                walker.advance();
            }
            const std::complex<double> xi{re / static_cast<double>(period),
                                          im / static_cast<double>(period)};
            acc.component_sum += xi;
            acc.power_sum += std::norm(xi);
        }
        sums[static_cast<std::size_t>(r)] = acc;
    });

    const double input_power = input_signal_power(params);
    const auto R = static_cast<double>(config.replicas);
    const auto W = static_cast<double>(config.periods);

    SpaEstimate out;
    out.n_windows = config.periods * config.replicas;
    std::complex<double> grand{0.0, 0.0};
    double power = 0.0;
    for (const auto& s : sums) {
        out.replica_components.push_back(s.component_sum / W);
        grand += s.component_sum / W;
        power += s.power_sum;
    }
    grand /= R;
    out.mean_component = grand;
    out.eta_hat = std::norm(grand) / input_power;
    out.mean_window_power = power / (R * W) / input_power;

    if (config.replicas > 1) {
        std::vector<double> leave_one_out;
        leave_one_out.reserve(sums.size());
        double mean_loo = 0.0;
        for (const auto& z : out.replica_components) {
            const std::complex<double> without = (R * grand - z) / (R - 1.0);
            leave_one_out.push_back(std::norm(without) / input_power);
            mean_loo += leave_one_out.back();
        }
        mean_loo /= R;
        double ss = 0.0;
        for (double t : leave_one_out) ss += (t - mean_loo) * (t - mean_loo);
        out.std_error = std::sqrt((R - 1.0) / R * ss);
    }
    return out;
}

}  // namespace srmc
