#include "cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "srmc/chain.hpp"
#include "srmc/diffusion.hpp"
#include "srmc/montecarlo.hpp"
#include "srmc/spectral.hpp"
#include "srmc/tuning.hpp"

namespace srmc::cli {

namespace {

using json = nlohmann::ordered_json;

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ChainFlags {
    double p = 0.5;
    double q = 0.5;
    double v = 2.0;
    double V = 4.0;
    std::int64_t m = 500;
};

void add_chain_flags(CLI::App* cmd, ChainFlags& f) {
    cmd->add_option("--p", f.p, "deep-well escape prefactor in [0, 1]")->capture_default_str();
    cmd->add_option("--q", f.q, "shallow-well escape prefactor in [0, 1]")->capture_default_str();
    cmd->add_option("--v", f.v, "shallow well depth double, 0 < v < V")->capture_default_str();
    cmd->add_option("--V", f.V, "deep well depth double")->capture_default_str();
    cmd->add_option("--m", f.m, "half period in steps, >= 1")->capture_default_str();
}

ChainParams make_params(const ChainFlags& f) {
    if (f.p == 0.0 && f.q == 0.0) {
        throw DegenerateChain("p = q = 0: chain has no dynamics");
    }
    return {f.p, f.q, f.v, f.V, f.m};
}

json chain_json(const ChainFlags& f) {
    return {{"p", f.p}, {"q", f.q}, {"v", f.v}, {"V", f.V}, {"m", f.m}};
}

double parse_eps(const std::string& text) {
    if (text == "inf" || text == "Inf" || text == "infinity") {
        return std::numeric_limits<double>::infinity();
    }
    char* end = nullptr;
    const double value = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0' || std::isnan(value)) {
        throw InvalidParameter("cannot parse eps '" + text + "'");
    }
    if (value < 0.0) throw InvalidParameter("eps must be >= 0");
    return value;
}

json number(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return nullptr;
    return v;
}

json number(const std::optional<double>& v) { return v ? number(*v) : json(nullptr); }

std::string envelope(const std::string& command, json parameters, json results) {
    json doc;
    doc["schema_version"] = "1";
    doc["command"] = command;
    doc["parameters"] = std::move(parameters);
    doc["results"] = std::move(results);
    return doc.dump(2) + "\n";
}

class CsvTable {
public:
    explicit CsvTable(std::initializer_list<std::string_view> header) {
        bool first = true;
        for (auto h : header) {
            if (!first) text_ += ',';
            text_ += h;
            first = false;
        }
        text_ += '\n';
    }

    // Cells are pre-rendered strings; empty string means a missing value.
    void row(std::initializer_list<std::string> cells) {
        bool first = true;
        for (const auto& c : cells) {
            if (!first) text_ += ',';
            text_ += c;
            first = false;
        }
        text_ += '\n';
    }

    const std::string& str() const { return text_; }

private:
    std::string text_;
};

std::string cell(double v) { return format_double(v); }
std::string cell(std::int64_t v) { return std::to_string(v); }
std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

void write_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp-" + std::to_string(std::hash<std::string>{}(content) & 0xffffff);
    {
        std::ofstream file(tmp, std::ios::binary | std::ios::trunc);
        if (!file) throw IoError("cannot open '" + tmp.string() + "' for writing");
        file << content;
        file.close();
        if (!file) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw IoError("write to '" + tmp.string() + "' failed");
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot move output into place at '" + path + "'");
    }
}

void emit(const std::string& content, const std::string& out_path, std::ostream& out) {
    if (out_path.empty()) {
        out << content;
    } else {
        write_atomic(out_path, content);
    }
}

// --- commands ---------------------------------------------------------------

struct SpaCurveFlags {
    ChainFlags chain;
    double eps_min = 0.3;
    double eps_max = 1.2;
    std::int64_t points = 200;
    std::string format = "csv";
    std::string out;
};

void run_spa_curve(const SpaCurveFlags& f, std::ostream& out) {
    const ChainParams params = make_params(f.chain);
    if (!(f.eps_min >= 0.0) || !(f.eps_max > f.eps_min) || !std::isfinite(f.eps_max)) {
        throw InvalidParameter("need 0 <= eps-min < eps-max < inf");
    }
    if (f.points < 2) throw InvalidParameter("points must be >= 2");

    CsvTable table({"eps", "x", "eta"});
    json rows = json::array();
    for (std::int64_t i = 0; i < f.points; ++i) {
        const double eps = i + 1 == f.points
                               ? f.eps_max
                               : f.eps_min + (f.eps_max - f.eps_min) * static_cast<double>(i) /
                                                 static_cast<double>(f.points - 1);
        const NoiseLevel noise = NoiseLevel::from_eps(eps);
        const double eta = spa(params, noise);
        table.row({cell(eps), cell(noise.x()), cell(eta)});
        rows.push_back({{"eps", eps}, {"x", noise.x()}, {"eta", eta}});
    }
    if (f.format == "csv") {
        emit(table.str(), f.out, out);
    } else {
        json params_json = chain_json(f.chain);
        params_json["eps_min"] = f.eps_min;
        params_json["eps_max"] = f.eps_max;
        params_json["points"] = f.points;
        emit(envelope("spa-curve", params_json, {{"rows", rows}}), f.out, out);
    }
}

struct TuneFlags {
    ChainFlags chain;
    std::string format = "json";
    std::string out;
};

void run_tune(const TuneFlags& f, std::ostream& out) {
    const ChainParams params = make_params(f.chain);
    const TuningReport r = tune(params);
    json results;
    results["region"] = std::string(to_string(r.region.tag));
    results["boundary_value"] = number(r.region.boundary_value);
    results["x_hat"] = number(r.x_hat);
    results["eps_hat"] = number(r.eps_hat);
    results["eta_max"] = number(r.eta_max);
    results["x_star"] = number(r.x_star);
    results["x_asymptotic"] = number(r.x_asymptotic);
    results["eps_asymptotic"] =
        r.x_asymptotic && *r.x_asymptotic < 1.0 ? number(eps_from_x(*r.x_asymptotic))
                                                : json(nullptr);
    results["m_of_eps"] = number(r.m_of_eps);
    results["eta_limit"] = number(r.eta_limit);
    emit(envelope("tune", chain_json(f.chain), results), f.out, out);
}

struct RegionsFlags {
    double beta = 0.5;
    std::int64_t m = 2;
    std::int64_t grid = 21;
    std::string format = "csv";
    std::string out;
};

void run_regions(const RegionsFlags& f, std::ostream& out) {
    if (!(f.beta > 0.0 && f.beta < 1.0)) throw InvalidParameter("beta must lie in (0, 1)");
    if (f.m < 1) throw InvalidParameter("m must be >= 1");
    if (f.grid < 2) throw InvalidParameter("grid must be >= 2");

    const auto at = [&](std::int64_t i) {
        return i + 1 == f.grid ? 1.0 : static_cast<double>(i) / static_cast<double>(f.grid - 1);
    };
    CsvTable table({"kind", "q", "p", "p_minus", "discriminant", "region"});
    json boundary = json::array();
    json grid = json::array();
    for (std::int64_t i = 0; i < f.grid; ++i) {
        const double q = at(i);
        const BoundaryValue b = region_boundary(q, f.beta, f.m);
        table.row({"boundary", cell(q), "", cell(b.value), cell(b.discriminant), ""});
        boundary.push_back(
            {{"q", q}, {"p_minus", number(b.value)}, {"discriminant", b.discriminant}});
    }
    for (std::int64_t i = 0; i < f.grid; ++i) {
        for (std::int64_t j = 0; j < f.grid; ++j) {
            const double p = at(i);
            const double q = at(j);
            std::string tag = "degenerate";
            if (p + q > 0.0) {
                tag = std::string(to_string(classify(ChainParams(p, q, f.beta, 1.0, f.m)).tag));
            }
            table.row({"grid", cell(q), cell(p), "", "", tag});
            grid.push_back({{"p", p}, {"q", q}, {"region", tag}});
        }
    }
    if (f.format == "csv") {
        emit(table.str(), f.out, out);
    } else {
        const json params{{"beta", f.beta}, {"m", f.m}, {"grid", f.grid}};
        emit(envelope("regions", params, {{"boundary", boundary}, {"grid", grid}}), f.out, out);
    }
}

struct StationaryFlags {
    ChainFlags chain;
    std::string eps = "0.65";
    std::string format = "csv";
    std::string out;
};

void run_stationary(const StationaryFlags& f, std::ostream& out) {
    const ChainParams params = make_params(f.chain);
    const double eps = parse_eps(f.eps);
    if (!(eps > 0.0)) throw InvalidParameter("eps must be > 0");
    const StationaryDistribution pi = stationary_distribution(params, NoiseLevel::from_eps(eps));

    if (f.format == "csv") {
        CsvTable table({"l", "pi_minus", "pi_plus"});
        for (std::size_t l = 0; l < pi.size(); ++l) {
            table.row({cell(static_cast<std::int64_t>(l)), cell(pi[l].minus), cell(pi[l].plus)});
        }
        emit(table.str(), f.out, out);
    } else {
        json rows = json::array();
        for (std::size_t l = 0; l < pi.size(); ++l) {
            rows.push_back({{"l", l}, {"pi_minus", pi[l].minus}, {"pi_plus", pi[l].plus}});
        }
        json params_json = chain_json(f.chain);
        params_json["eps"] = number(eps);
        emit(envelope("stationary", params_json, {{"rows", rows}}), f.out, out);
    }
}

struct SimulateFlags {
    ChainFlags chain;
    std::string eps = "0.65";
    std::int64_t periods = 1000;
    std::int64_t burn_in = 10;
    std::int64_t replicas = 16;
    std::uint64_t seed = 1;
    std::string trace;
    std::string format = "json";
    std::string out;
};

void run_simulate(const SimulateFlags& f, std::ostream& out) {
    const ChainParams params = make_params(f.chain);
    const double eps = parse_eps(f.eps);
    if (!(eps > 0.0)) throw InvalidParameter("eps must be > 0");
    const NoiseLevel noise = NoiseLevel::from_eps(eps);
    const SimConfig config{f.seed, f.periods, f.burn_in, f.replicas};
    config.validate();

    const SpaEstimate est = estimate_spa(params, noise, config);
    if (!f.trace.empty()) {
        const Trajectory path = simulate_chain(params, noise, config, 0);
        std::string text = "k,state\n";
        for (std::size_t k = 0; k < path.states.size(); ++k) {
            text += std::to_string(k);
            text += ',';
            text += std::to_string(static_cast<int>(path.states[k]));
            text += '\n';
        }
        write_atomic(f.trace, text);
    }

    json params_json = chain_json(f.chain);
    params_json["eps"] = number(eps);
    params_json["periods"] = f.periods;
    params_json["burn_in"] = f.burn_in;
    params_json["replicas"] = f.replicas;
    params_json["seed"] = f.seed;
    params_json["trace"] = f.trace.empty() ? json(nullptr) : json(f.trace);
    json results;
    results["eta_hat"] = est.eta_hat;
    results["std_error"] = number(est.std_error);
    results["n_windows"] = est.n_windows;
    results["eta_closed_form"] = spa(params, noise);
    results["mean_window_power"] = est.mean_window_power;
    emit(envelope("simulate", params_json, results), f.out, out);
}

struct DiffusionFlags {
    double v = 1.0;
    double V = 2.0;
    double lambda = 1.5;
    double eps = 0.45;
    double dt = 1e-3;
    double delta = 0.5;
    double x0 = -1.0;
    std::optional<double> period;
    std::string reference = "phase";
    std::uint64_t seed = 1;
    std::string format = "json";
    std::string out;
};

void run_diffusion(const DiffusionFlags& f, std::ostream& out) {
    const SwitchingPotential potential(f.v, f.V);
    DeviationExperiment ex;
    ex.lambda = f.lambda;
    ex.eps = f.eps;
    ex.dt = f.dt;
    ex.delta = f.delta;
    ex.x0 = f.x0;
    ex.seed = f.seed;
    ex.reference = f.reference == "sign" ? Reference::SignOfStart : Reference::Phase;
    ex.horizon = f.period;
    if (f.eps == 0.0 && !ex.horizon) ex.horizon = 100.0;
    ex.validate();

    const SdePath path = simulate_sde(potential, ex);
    double lo = path.x.front();
    double hi = path.x.front();
    std::int64_t sign_changes = 0;
    for (std::size_t n = 1; n < path.x.size(); ++n) {
        lo = std::min(lo, path.x[n]);
        hi = std::max(hi, path.x[n]);
        if ((path.x[n] > 0.0) != (path.x[n - 1] > 0.0)) ++sign_changes;
    }

    const json params{{"v", f.v},         {"V", f.V},
                      {"lambda", f.lambda}, {"eps", f.eps},
                      {"dt", f.dt},       {"delta", f.delta},
                      {"x0", f.x0},       {"reference", f.reference},
                      {"period", ex.period()}, {"seed", f.seed}};
    json results;
    results["deviation_measure"] = deviation_measure(path, ex);
    results["period"] = path.period;
    results["steps"] = static_cast<std::int64_t>(path.x.size()) - 1;
    results["final_x"] = path.x.back();
    results["min_x"] = lo;
    results["max_x"] = hi;
    results["sign_changes"] = sign_changes;
    emit(envelope("diffusion", params, results), f.out, out);
}

struct ExitTimeFlags {
    double v = 1.0;
    double V = 2.0;
    double eps = 0.5;
    double dt = 1e-3;
    std::int64_t paths = 200;
    std::int64_t max_steps = 100'000'000;
    std::uint64_t seed = 1;
    std::string format = "json";
    std::string out;
};

void run_exit_time(const ExitTimeFlags& f, std::ostream& out) {
    const SwitchingPotential potential(f.v, f.V);
    const ExitTimeEstimate est =
        mean_exit_time(potential, f.eps, f.dt, f.seed, f.paths, f.max_steps);
    const json params{{"v", f.v},     {"V", f.V},         {"eps", f.eps},
                      {"dt", f.dt},   {"paths", f.paths}, {"max_steps", f.max_steps},
                      {"seed", f.seed}};
    json results;
    results["mean_exit_time"] = number(est.mean);
    results["std_error"] = number(est.std_error);
    results["completed"] = est.completed;
    results["timeouts"] = est.timeouts;
    results["eps_ln_mean"] = est.completed > 0 ? number(est.eps_log_mean()) : json(nullptr);
    emit(envelope("exit-time", params, results), f.out, out);
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Stochastic resonance in periodically driven two-state Markov chains", "srmc"};
    app.require_subcommand(1);

    SpaCurveFlags spa_f;
    auto* spa_cmd = app.add_subcommand("spa-curve", "SPA coefficient eta over a uniform eps grid");
    add_chain_flags(spa_cmd, spa_f.chain);
    spa_cmd->add_option("--eps-min", spa_f.eps_min)->capture_default_str();
    spa_cmd->add_option("--eps-max", spa_f.eps_max)->capture_default_str();
    spa_cmd->add_option("--points", spa_f.points)->capture_default_str();
    spa_cmd->add_option("--format", spa_f.format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    spa_cmd->add_option("--out", spa_f.out, "output file (atomic write)");

    TuneFlags tune_f;
    auto* tune_cmd = app.add_subcommand("tune", "region, resonance point, zero and asymptotic tuning");
    add_chain_flags(tune_cmd, tune_f.chain);
    tune_cmd->add_option("--format", tune_f.format)->check(CLI::IsMember({"json"}))->capture_default_str();
    tune_cmd->add_option("--out", tune_f.out, "output file (atomic write)");

    RegionsFlags reg_f;
    auto* reg_cmd = app.add_subcommand("regions", "p_-(q) boundary and U0/U1/U2 grid");
    reg_cmd->add_option("--beta", reg_f.beta, "depth ratio v/V in (0, 1)")->capture_default_str();
    reg_cmd->add_option("--m", reg_f.m)->capture_default_str();
    reg_cmd->add_option("--grid", reg_f.grid, "grid points per axis")->capture_default_str();
    reg_cmd->add_option("--format", reg_f.format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    reg_cmd->add_option("--out", reg_f.out, "output file (atomic write)");

    StationaryFlags st_f;
    auto* st_cmd = app.add_subcommand("stationary", "closed-form stationary distribution");
    add_chain_flags(st_cmd, st_f.chain);
    st_cmd->add_option("--eps", st_f.eps, "noise level (> 0, or inf)")->capture_default_str();
    st_cmd->add_option("--format", st_f.format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    st_cmd->add_option("--out", st_f.out, "output file (atomic write)");

    SimulateFlags sim_f;
    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo SPA estimate");
    add_chain_flags(sim_cmd, sim_f.chain);
    sim_cmd->add_option("--eps", sim_f.eps, "noise level (> 0, or inf)")->capture_default_str();
    sim_cmd->add_option("--periods", sim_f.periods)->capture_default_str();
    sim_cmd->add_option("--burn-in", sim_f.burn_in)->capture_default_str();
    sim_cmd->add_option("--replicas", sim_f.replicas)->capture_default_str();
    sim_cmd->add_option("--seed", sim_f.seed)->capture_default_str();
    sim_cmd->add_option("--trace", sim_f.trace, "CSV of replica 0's states");
    sim_cmd->add_option("--format", sim_f.format)->check(CLI::IsMember({"json"}))->capture_default_str();
    sim_cmd->add_option("--out", sim_f.out, "output file (atomic write)");

    DiffusionFlags dif_f;
    auto* dif_cmd = app.add_subcommand("diffusion", "deviation measure of the switching-potential SDE");
    dif_cmd->add_option("--v", dif_f.v)->capture_default_str();
    dif_cmd->add_option("--V", dif_f.V)->capture_default_str();
    dif_cmd->add_option("--lambda", dif_f.lambda, "T = exp(lambda/eps)")->capture_default_str();
    dif_cmd->add_option("--eps", dif_f.eps)->capture_default_str();
    dif_cmd->add_option("--dt", dif_f.dt)->capture_default_str();
    dif_cmd->add_option("--delta", dif_f.delta, "tube radius")->capture_default_str();
    dif_cmd->add_option("--x0", dif_f.x0)->capture_default_str();
    dif_cmd->add_option("--period", dif_f.period, "override T (default 100 when eps = 0)");
    dif_cmd->add_option("--reference", dif_f.reference)->check(CLI::IsMember({"sign", "phase"}))->capture_default_str();
    dif_cmd->add_option("--seed", dif_f.seed)->capture_default_str();
    dif_cmd->add_option("--format", dif_f.format)->check(CLI::IsMember({"json"}))->capture_default_str();
    dif_cmd->add_option("--out", dif_f.out, "output file (atomic write)");

    ExitTimeFlags ex_f;
    auto* ex_cmd = app.add_subcommand("exit-time", "mean exit time from the shallow well");
    ex_cmd->add_option("--v", ex_f.v)->capture_default_str();
    ex_cmd->add_option("--V", ex_f.V)->capture_default_str();
    ex_cmd->add_option("--eps", ex_f.eps)->capture_default_str();
    ex_cmd->add_option("--dt", ex_f.dt)->capture_default_str();
    ex_cmd->add_option("--paths", ex_f.paths)->capture_default_str();
    ex_cmd->add_option("--max-steps", ex_f.max_steps)->capture_default_str();
    ex_cmd->add_option("--seed", ex_f.seed)->capture_default_str();
    ex_cmd->add_option("--format", ex_f.format)->check(CLI::IsMember({"json"}))->capture_default_str();
    ex_cmd->add_option("--out", ex_f.out, "output file (atomic write)");

    std::vector<std::string> argv_store{"srmc"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_store) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return kSuccess;
        }
        err << "srmc: " << first_line(e.what()) << '\n';
        return kInvalidParameters;
    }

    try {
        if (spa_cmd->parsed()) run_spa_curve(spa_f, out);
        else if (tune_cmd->parsed()) run_tune(tune_f, out);
        else if (reg_cmd->parsed()) run_regions(reg_f, out);
        else if (st_cmd->parsed()) run_stationary(st_f, out);
        else if (sim_cmd->parsed()) run_simulate(sim_f, out);
        else if (dif_cmd->parsed()) run_diffusion(dif_f, out);
        else if (ex_cmd->parsed()) run_exit_time(ex_f, out);
    } catch (const InvalidParameter& e) {
        err << "srmc: invalid parameters: " << first_line(e.what()) << '\n';
        return kInvalidParameters;
    } catch (const IoError& e) {
        err << "srmc: I/O failure: " << first_line(e.what()) << '\n';
        return kIoFailure;
    } catch (const DegenerateChain& e) {
        err << "srmc: degenerate chain: " << first_line(e.what()) << '\n';
        return kDegenerateChain;
    } catch (const IntegratorBlowUp& e) {
        err << "srmc: " << first_line(e.what()) << '\n';
        return kIntegratorBlowUp;
    } catch (const Error& e) {
        err << "srmc: " << first_line(e.what()) << '\n';
        return kFailure;
    }
    return kSuccess;
}

}  // namespace srmc::cli
