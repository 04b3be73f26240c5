#include "srmc/diffusion.hpp"

#include <algorithm>
#include <limits>

#include "srmc/parallel.hpp"

namespace srmc {

namespace {

constexpr double kBlowUpBound = 10.0;
constexpr double kMaxSteps = 5e7;

}  // namespace

SwitchingPotential::SwitchingPotential(double shallow_depth, double deep_depth)
    : shallow_(shallow_depth), deep_(deep_depth) {
    if (!(shallow_depth > 0.0) || !(deep_depth > shallow_depth) ||
        !std::isfinite(deep_depth)) {
        throw InvalidParameter("well depths must satisfy 0 < v < V < inf");
    }
}

double SwitchingPotential::static_value(double x) const noexcept {
    const double scale = x <= 0.0 ? deep_ : shallow_;
    const double x2 = x * x;
    return 0.5 * scale * (x2 * x2 - 2.0 * x2);
}

double SwitchingPotential::static_gradient(double x) const noexcept {
    const double scale = x <= 0.0 ? deep_ : shallow_;
    return 2.0 * scale * (x * x * x - x);
}

double SwitchingPotential::value(double x, double t) const noexcept {
    return in_first_half(t) ? static_value(x) : static_value(-x);
}

double SwitchingPotential::gradient(double x, double t) const noexcept {
    return in_first_half(t) ? static_gradient(x) : -static_gradient(-x);
}

bool in_first_half(double t) noexcept { return t - std::floor(t) < 0.5; }

double phase_reference(double t) noexcept { return in_first_half(t) ? -1.0 : 1.0; }

double DeviationExperiment::period() const {
    if (horizon) return *horizon;
    if (!(eps > 0.0)) {
        throw InvalidParameter("eps = 0 needs an explicit horizon (exp(lambda/eps) diverges)");
    }
    return std::exp(lambda / eps);
}

void DeviationExperiment::validate() const {
    if (!(lambda > 0.0)) throw InvalidParameter("lambda must be positive");
    if (!(eps >= 0.0) || !std::isfinite(eps)) throw InvalidParameter("eps must be finite and >= 0");
    if (!(delta > 0.0)) throw InvalidParameter("delta must be positive");
    if (!std::isfinite(x0)) throw InvalidParameter("x0 must be finite");
    if (horizon && !(*horizon > 0.0 && std::isfinite(*horizon))) {
        throw InvalidParameter("horizon must be positive and finite");
    }
    const double T = period();
    if (!std::isfinite(T)) throw InvalidParameter("period exp(lambda/eps) overflows");
    if (!(dt > 0.0) || !(dt < std::min(1.0, T) / 100.0)) {
        throw InvalidParameter("dt must satisfy 0 < dt < min(1, T)/100");
    }
    if (T / dt > kMaxSteps) {
        throw InvalidParameter("T/dt exceeds 5e7 steps; raise eps or dt");
    }
}

SdePath simulate_sde(const SwitchingPotential& potential,
                     const DeviationExperiment& experiment) {
    experiment.validate();
    const double T = experiment.period();
    const auto steps = static_cast<std::int64_t>(std::ceil(T / experiment.dt));

    SdePath path;
    path.dt = experiment.dt;
    path.period = T;
    path.x.reserve(static_cast<std::size_t>(steps) + 1);

    RandomStream rng(experiment.seed, 0);
    euler_maruyama(
        [&](double x, double t) { return -potential.gradient(x, t / T); },
        experiment.x0, experiment.eps, experiment.dt, steps, rng,
        [&](std::int64_t n, double x) {
            if (!(std::abs(x) <= kBlowUpBound)) throw IntegratorBlowUp(n, x);
            path.x.push_back(x);
            return true;
        });
    return path;
}

double deviation_measure(const SdePath& path, const DeviationExperiment& experiment) {
    const double T = path.period;
    const double start_sign =
        experiment.x0 > 0.0 ? 1.0 : (experiment.x0 < 0.0 ? -1.0 : 0.0);
    double outside = 0.0;
    for (std::size_t n = 0; n + 1 < path.x.size(); ++n) {
        const double t = static_cast<double>(n) * path.dt;
        if (t >= T) break;
        const double reference = experiment.reference == Reference::Phase
                                     ? phase_reference(t / T)
                                     : start_sign;
        if (std::abs(path.x[n] - reference) > experiment.delta) {
            outside += std::min(path.dt, T - t);
        }
    }
    return std::clamp(outside / T, 0.0, 1.0);
}

double ExitTimeEstimate::eps_log_mean() const { return eps * std::log(mean); }

ExitTimeEstimate mean_exit_time(const SwitchingPotential& potential, double eps,
                                double dt, std::uint64_t seed, std::int64_t n_paths,
                                std::int64_t max_steps) {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw InvalidParameter("eps must be positive");
    if (!(dt > 0.0 && dt < 0.01)) throw InvalidParameter("dt must lie in (0, 0.01)");
    if (n_paths < 1) throw InvalidParameter("n_paths must be >= 1");
    if (max_steps < 1) throw InvalidParameter("max_steps must be >= 1");

    // NaN marks a path that hit the step cap.
    std::vector<double> times(static_cast<std::size_t>(n_paths),
                              std::numeric_limits<double>::quiet_NaN());
    detail::parallel_for(n_paths, [&](std::int64_t i) {
        RandomStream rng(seed, static_cast<std::uint64_t>(i));
        euler_maruyama(
            [&](double x, double) { return -potential.static_gradient(x); }, 1.0, eps,
            dt, max_steps, rng, [&](std::int64_t n, double x) {
                if (x <= 0.0) {
                    times[static_cast<std::size_t>(i)] = static_cast<double>(n) * dt;
                    return false;
                }
                if (!(std::abs(x) <= kBlowUpBound)) throw IntegratorBlowUp(n, x);
                return true;
            });
    });

    ExitTimeEstimate out;
    out.eps = eps;
    double sum = 0.0;
    for (double t : times) {
        if (std::isnan(t)) {
            ++out.timeouts;
        } else {
            ++out.completed;
            sum += t;
        }
    }
    if (out.completed == 0) {
        out.mean = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    out.mean = sum / static_cast<double>(out.completed);
    if (out.completed > 1) {
        double ss = 0.0;
        for (double t : times) {
            if (!std::isnan(t)) ss += (t - out.mean) * (t - out.mean);
        }
        const auto n = static_cast<double>(out.completed);
        out.std_error = std::sqrt(ss / (n - 1.0) / n);
    }
    return out;
}

}  // namespace srmc
