#include "srmc/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "srmc/spectral.hpp"

namespace srmc {

namespace {

constexpr double kGeometricFloor = 1e-12;

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

double derivative_at(const ChainParams& params, double x) {
    return spa_derivative(params, NoiseLevel::from_x(x));
}

double signed_amplitude(const ChainParams& params, double x) {
    return params.deep_prefactor() * std::pow(x, params.deep_depth()) -
           params.shallow_prefactor() * std::pow(x, params.shallow_depth());
}

// Uniform grid i/n, i = 1..n, merged with a geometric grid from
// kGeometricFloor up to 1/n.
std::vector<double> scan_grid(int n) {
    std::vector<double> grid;
    grid.reserve(2 * static_cast<std::size_t>(n));
    const double top = 1.0 / n;
    const double ratio = std::log(top / kGeometricFloor) / n;
    for (int j = 0; j < n; ++j) grid.push_back(kGeometricFloor * std::exp(ratio * j));
    for (int i = 1; i <= n; ++i) grid.push_back(static_cast<double>(i) / n);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

// Bisection on f keeping sign(f(lo)) = lo_sign; stops when the bracket is
// narrower than rel_width * hi + abs_width or stops shrinking.
template <typename F>
Bracket bisect(F&& f, double lo, double hi, int lo_sign, double rel_width,
               double abs_width) {
    while (hi - lo > rel_width * hi + abs_width) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const int s = sign_of(f(mid));
        if (s == 0) return {mid, mid};
        if (s == lo_sign) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return {lo, hi};
}

}  // namespace

std::string_view to_string(Region region) noexcept {
    switch (region) {
        case Region::U0: return "U0";
        case Region::U1: return "U1";
        case Region::U2: return "U2";
    }
    return "?";
}

double csc2_factor(std::int64_t m) {
    if (m < 1) throw InvalidParameter("half period m must be at least 1");
    const double s = std::sin(std::numbers::pi / (2.0 * static_cast<double>(m)));
    return 1.0 / (s * s);
}

BoundaryValue region_boundary(double q, double beta, std::int64_t m) {
    if (!(q >= 0.0 && q <= 1.0)) throw InvalidParameter("q must lie in [0, 1]");
    if (!(beta > 0.0 && beta < 1.0)) throw InvalidParameter("beta must lie in (0, 1)");
    const double am = csc2_factor(m);
    const double a = 1.0 - am * q * (1.0 - beta);
    const double b = 2.0 - 3.0 * (1.0 - beta) * q + am * (1.0 - beta) * q * q;
    const double c = beta * (2.0 - q) * q;

    BoundaryValue out;
    out.discriminant = b * b - 4.0 * a * c;
    if (q == 0.0) {
        out.value = 0.0;
        return out;
    }
    double disc = out.discriminant;
    // Exact double roots (q = 1, m = 1) come out a few ulps negative.
    if (disc < 0.0 && disc >= -1e-14 * b * b) disc = 0.0;
    if (disc < 0.0) return out;
    const double denom = b + std::sqrt(disc);
    if (denom <= 0.0) return out;
    out.value = 2.0 * c / denom;
    return out;
}

RegionClass classify(const ChainParams& params) {
    const double p = params.deep_prefactor();
    const double q = params.shallow_prefactor();
    if (q == 0.0) return {Region::U0, 0.0};

    const BoundaryValue boundary =
        region_boundary(q, params.depth_ratio(), params.half_period());
    if (p >= q) return {Region::U2, boundary.value};
    if (!boundary.value) {
        return {classify_numeric(params, 4000).region.tag, std::nullopt};
    }
    return {p > *boundary.value ? Region::U1 : Region::U0, boundary.value};
}

NumericClassification classify_numeric(const ChainParams& params, int grid_size) {
    if (grid_size < 1000) throw InvalidParameter("grid_size must be >= 1000");
    const std::vector<double> grid = scan_grid(grid_size);
    auto deriv = [&](double x) { return derivative_at(params, x); };
    auto amp = [&](double x) { return signed_amplitude(params, x); };

    NumericClassification out;

    // Extrema from persistent sign changes of d eta / dx.
    double prev_x = 0.0;
    int prev_sign = 0;
    for (double x : grid) {
        const int s = sign_of(deriv(x));
        if (s == 0) continue;
        if (prev_sign != 0 && s != prev_sign) {
            const Bracket b = bisect(deriv, prev_x, x, prev_sign, 1e-9, 0.0);
            const int lo_s = sign_of(deriv(b.lo));
            const int hi_s = sign_of(deriv(b.hi));
            if (b.lo == b.hi || (lo_s != 0 && hi_s != 0 && lo_s != hi_s)) {
                (prev_sign > 0 ? out.maxima : out.minima).push_back(b.mid());
            }
        }
        prev_x = x;
        prev_sign = s;
    }

    // Zeros from sign changes of phi - psi; eta = 0 exactly where it vanishes.
    prev_sign = 0;
    prev_x = 0.0;
    for (double x : grid) {
        const double g = amp(x);
        const int s = sign_of(g);
        if (s == 0) {
            // Exact hit on a grid point; the crossing is consumed here.
            out.zeros.push_back({x, x});
            prev_sign = 0;
            continue;
        }
        if (prev_sign != 0 && s != prev_sign) {
            out.zeros.push_back(bisect(amp, prev_x, x, prev_sign, 1e-13, 0.0));
        }
        prev_sign = s;
        prev_x = x;
    }

    const auto ambiguous = [&](const char* why) {
        std::ostringstream os;
        os << "numeric classification ambiguous (" << why << "): "
           << out.maxima.size() << " maxima, " << out.minima.size()
           << " minima, " << out.zeros.size() << " zeros";
        return AmbiguousClassification(os.str());
    };

    for (double x_min : out.minima) {
        const bool at_zero = std::any_of(
            out.zeros.begin(), out.zeros.end(), [&](const Bracket& z) {
                return std::abs(z.mid() - x_min) <= 1e-6 * std::max(x_min, 1e-9);
            });
        if (!at_zero) throw ambiguous("local minimum away from a zero");
    }
    if (out.zeros.size() > 1) throw ambiguous("more than one zero");

    if (out.maxima.empty()) {
        if (!out.zeros.empty()) throw ambiguous("zero without a maximum");
        out.region.tag = Region::U0;
    } else if (out.maxima.size() == 1) {
        out.region.tag = out.zeros.empty() ? Region::U1 : Region::U2;
    } else {
        throw ambiguous("more than one interior maximum");
    }
    return out;
}

double spa_derivative(const ChainParams& params, NoiseLevel noise) {
    const double x = noise.x();
    if (!(x > 0.0)) throw InvalidParameter("spa_derivative needs x in (0, 1]");
    const RateParams r = rates(params, noise);
    const double phi = r.deep_escape;
    const double psi = r.shallow_escape;
    const double dphi = params.deep_depth() * phi / x;
    const double dpsi = params.shallow_depth() * psi / x;

    const double s = std::sin(std::numbers::pi /
                              (2.0 * static_cast<double>(params.half_period())));
    const double s2 = s * s;
    const double diff = phi - psi;
    const double sum = phi + psi;
    const double denom = sum * sum + 4.0 * (1.0 - sum) * s2;
    const double d_diff = dphi - dpsi;
    const double d_sum = dphi + dpsi;
    const double d_denom = 2.0 * d_sum * (sum - 2.0 * s2);
    const double gap = params.depth_gap();
    return 4.0 / (gap * gap) * diff * (2.0 * d_diff * denom - diff * d_denom) /
           (denom * denom);
}

std::optional<Resonance> find_resonance(const ChainParams& params, int scan_points) {
    if (scan_points < 16) throw InvalidParameter("scan_points must be >= 16");
    if (classify(params).tag == Region::U0) return std::nullopt;

    auto deriv = [&](double x) { return derivative_at(params, x); };
    const std::vector<double> grid = scan_grid(scan_points);
    double prev_x = 0.0;
    int prev_sign = 0;
    for (double x : grid) {
        const int s = sign_of(deriv(x));
        if (s == 0) continue;
        if (prev_sign > 0 && s < 0) {
            const Bracket b = bisect(deriv, prev_x, x, prev_sign, 0.0, 1e-12);
            const double x_hat = b.mid();
            return Resonance{x_hat, spa(params, NoiseLevel::from_x(x_hat))};
        }
        prev_x = x;
        prev_sign = s;
    }
    std::ostringstream os;
    os << "no sign change of d eta/dx found with " << scan_points
       << " scan points";
    throw BracketFailure(os.str());
}

std::optional<double> find_zero(const ChainParams& params) {
    const double p = params.deep_prefactor();
    const double q = params.shallow_prefactor();
    if (q == 0.0 || p < q) return std::nullopt;
    if (p == q) return 1.0;
    const double x = std::pow(q / p, 1.0 / params.depth_gap());
    return std::clamp(x, std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0));
}

double asymptotic_resonance(const ChainParams& params) {
    const double pq = params.deep_prefactor() * params.shallow_prefactor();
    if (pq == 0.0) throw ZeroPrefactor("asymptotic resonance needs p q > 0");
    const auto m = static_cast<double>(params.half_period());
    const double v = params.shallow_depth();
    const double V = params.deep_depth();
    const double base =
        std::numbers::pi * std::numbers::pi / (2.0 * m * m * pq) * v / (V - v);
    return std::pow(base, 1.0 / (V + v));
}

double optimal_half_period(double eps, double deep_prefactor,
                           double shallow_prefactor, double shallow_depth,
                           double deep_depth) {
    if (!(eps > 0.0)) throw InvalidParameter("eps must be positive");
    if (!(shallow_depth > 0.0 && deep_depth > shallow_depth)) {
        throw InvalidParameter("well depths must satisfy 0 < v < V");
    }
    const double pq = deep_prefactor * shallow_prefactor;
    if (!(pq > 0.0)) throw ZeroPrefactor("optimal half period needs p q > 0");
    return std::numbers::pi / std::sqrt(2.0 * pq) *
           std::sqrt(shallow_depth / (deep_depth - shallow_depth)) *
           std::exp((deep_depth + shallow_depth) / (2.0 * eps));
}

double max_amplification(double shallow_depth, double deep_depth) {
    if (!(shallow_depth > 0.0 && deep_depth > shallow_depth)) {
        throw InvalidParameter("well depths must satisfy 0 < v < V");
    }
    const double gap = deep_depth - shallow_depth;
    return 4.0 / (gap * gap);
}

TuningReport tune(const ChainParams& params) {
    TuningReport report;
    report.region = classify(params);
    report.eta_limit = max_amplification(params.shallow_depth(), params.deep_depth());
    report.x_star = find_zero(params);

    const bool has_asymptotics =
        params.deep_prefactor() * params.shallow_prefactor() > 0.0;
    if (has_asymptotics) report.x_asymptotic = asymptotic_resonance(params);

    if (auto res = find_resonance(params)) {
        report.x_hat = res->x_hat;
        report.eps_hat = res->eps_hat();
        report.eta_max = res->eta_max;
        if (has_asymptotics) {
            report.m_of_eps = optimal_half_period(
                *report.eps_hat, params.deep_prefactor(), params.shallow_prefactor(),
                params.shallow_depth(), params.deep_depth());
        }
    }
    return report;
}

}  // namespace srmc
