// retrialq command line: stability analysis, simulation and oracles for
// constant-retrial-rate GI/G/c/K queues. See README for the config schema.

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "retrialq/analytic.hpp"
#include "retrialq/errors.hpp"
#include "retrialq/json_io.hpp"
#include "retrialq/oracle.hpp"
#include "retrialq/regen.hpp"
#include "retrialq/simulation.hpp"
#include "retrialq/stability.hpp"
#include "retrialq/version.hpp"

namespace fs = std::filesystem;
using retrialq::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitInsufficient = 4;
constexpr int kExitNoConvergence = 5;

struct CommonFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<double> tol;
    std::optional<long long> cycles;
    std::optional<double> horizon;
};

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw retrialq::ConfigError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw retrialq::ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return j;
}

retrialq::SystemConfig system_from(const json& cfg) {
    if (!cfg.contains("system"))
        throw retrialq::ConfigError("config: missing \"system\" block");
    return retrialq::system_config_from_json(cfg.at("system"));
}

std::uint64_t effective_seed(const json& cfg, const CommonFlags& flags) {
    if (flags.seed) return *flags.seed; // flags win
    if (cfg.contains("seed")) {
        if (!cfg.at("seed").is_number_integer())
            throw retrialq::ConfigError("config: \"seed\" must be an integer");
        return cfg.at("seed").get<std::uint64_t>();
    }
    return 1;
}

fs::path effective_out(const json& cfg, const CommonFlags& flags) {
    std::string dir = ".";
    if (cfg.contains("out")) dir = cfg.at("out").get<std::string>();
    if (flags.out) dir = *flags.out;
    fs::path p(dir);
    fs::create_directories(p);
    return p;
}

retrialq::StopRule effective_stop(const json& cfg, const CommonFlags& flags, bool required) {
    retrialq::StopRule stop;
    if (cfg.contains("stop")) stop = retrialq::stop_rule_from_json(cfg.at("stop"));
    if (flags.cycles) stop.cycles = *flags.cycles;
    if (flags.horizon) stop.horizon = *flags.horizon;
    if (!stop.cycles && !stop.horizon) {
        if (required)
            throw retrialq::ConfigError("config: needs a \"stop\" block (cycles and/or horizon)");
        stop.cycles = 10000; // estimation default
    }
    stop.validate();
    return stop;
}

unsigned worker_count(std::size_t jobs) {
    unsigned n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    if (const char* env = std::getenv("RETRIALQ_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) n = static_cast<unsigned>(v);
    }
    return static_cast<unsigned>(std::min<std::size_t>(n, jobs));
}

// Runs fn(i) for i in [0, jobs) across workers; slot-indexed outputs keep
// the result order independent of scheduling.
template <typename Fn>
void parallel_for(std::size_t jobs, Fn&& fn) {
    const unsigned workers = worker_count(jobs);
    if (workers <= 1) {
        for (std::size_t i = 0; i < jobs; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < jobs; i = next.fetch_add(1)) fn(i);
        });
    for (auto& t : pool) t.join();
}

retrialq::RatioEstimate simulate_ploss(const retrialq::SystemConfig& system,
                                       const retrialq::StopRule& stop, std::uint64_t seed,
                                       double level) {
    retrialq::SystemConfig aux = system;
    aux.mode = retrialq::Mode::Auxiliary;
    const auto out = retrialq::simulate(aux, stop, seed);
    return retrialq::ratio_estimate(retrialq::stationary_cycles(out),
                                    retrialq::CycleField::Rejections,
                                    retrialq::CycleField::Arrivals, level);
}

double config_level(const json& cfg) {
    if (!cfg.contains("level")) return 0.95;
    if (!cfg.at("level").is_number())
        throw retrialq::ConfigError("config: \"level\" must be a number");
    return cfg.at("level").get<double>();
}

int cmd_ploss(const json& cfg, const CommonFlags& flags) {
    retrialq::require_keys(cfg, {"system", "stop", "seed", "level", "out"}, "ploss config");
    const auto system = system_from(cfg);
    json result;
    result["inputs"] = retrialq::system_config_to_json(system);
    if (const auto closed = retrialq::ploss_dispatch(system)) {
        result["value"] = closed->value;
        result["formula"] = closed->formula;
    } else {
        const auto stop = effective_stop(cfg, flags, false);
        const auto est = simulate_ploss(system, stop, effective_seed(cfg, flags),
                                        config_level(cfg));
        result["estimate"] = est.point;
        result["ci"] = {est.ci_lo, est.ci_hi};
        result["level"] = est.level;
        result["n_cycles"] = est.n_cycles;
        result["formula"] = "simulation";
    }
    std::cout << result.dump(2) << "\n";
    return kExitOk;
}

int cmd_simulate(const json& cfg, const CommonFlags& flags) {
    retrialq::require_keys(cfg, {"system", "stop", "seed", "out", "initial"}, "simulate config");
    const auto system = system_from(cfg);
    auto stop = effective_stop(cfg, flags, true);
    const auto seed = effective_seed(cfg, flags);
    retrialq::SimOptions options;
    if (cfg.contains("initial")) {
        retrialq::require_keys(cfg.at("initial"), {"orbit", "busy_full"}, "initial");
        const auto& init = cfg.at("initial");
        if (init.contains("orbit")) options.initial.orbit = init.at("orbit").get<long long>();
        if (init.contains("busy_full"))
            options.initial.busy_full = init.at("busy_full").get<bool>();
    }

    const auto out = retrialq::simulate(system, stop, seed, options);
    if (stop.cycles && out.completed_cycles.empty())
        throw retrialq::InsufficientData("no regeneration cycle completed within the horizon");

    const fs::path dir = effective_out(cfg, flags);
    {
        std::ofstream csv(dir / "cycles.csv", std::ios::binary);
        retrialq::write_cycles_csv(csv, out.completed_cycles, seed);
    }
    json summary = retrialq::path_stats_to_json(out);
    summary["first_cycle_delayed"] = out.first_cycle_delayed;
    if (stop.cycles && static_cast<long long>(out.completed_cycles.size()) < *stop.cycles)
        summary["note"] = "horizon reached before the requested cycle count";
    {
        std::ofstream js(dir / "summary.json", std::ios::binary);
        js << summary.dump(2) << "\n";
    }
    std::cout << summary.dump(2) << "\n";
    std::cerr << "simulate: " << out.event_count << " events in " << out.wall_time_sec
              << " s\n";
    return kExitOk;
}

int cmd_stability(const json& cfg, const CommonFlags& flags) {
    retrialq::require_keys(cfg, {"system", "ploss", "stop", "seed", "level", "out"},
                           "stability config");
    const auto system = system_from(cfg);
    std::string source = "auto";
    if (cfg.contains("ploss")) {
        retrialq::require_keys(cfg.at("ploss"), {"source"}, "ploss");
        source = cfg.at("ploss").at("source").get<std::string>();
        if (source != "auto" && source != "formula" && source != "simulation")
            throw retrialq::ConfigError("ploss.source must be auto, formula or simulation");
    }

    retrialq::PlossInput input;
    const auto closed = retrialq::ploss_dispatch(system);
    if (closed && source != "simulation") {
        input.point = closed->value;
        input.source = closed->formula;
    } else {
        if (source == "formula")
            throw retrialq::UnsupportedFamily("no closed-form loss formula for this system");
        const auto stop = effective_stop(cfg, flags, false);
        const auto est = simulate_ploss(system, stop, effective_seed(cfg, flags),
                                        config_level(cfg));
        input.point = est.point;
        input.ci_lo = est.ci_lo;
        input.ci_hi = est.ci_hi;
        input.source = "simulation";
    }
    const auto report = retrialq::evaluate(system, input);
    json j = retrialq::stability_report_to_json(report);
    j["ploss"] = input.point;
    std::cout << j.dump(2) << "\n";
    return kExitOk;
}

int cmd_boundary(const json& cfg, const CommonFlags& flags) {
    retrialq::require_keys(cfg, {"system", "range", "grid_points", "tol", "out", "seed"},
                           "boundary config");
    const auto system = system_from(cfg);
    if (!cfg.contains("range") || !cfg.at("range").is_array() || cfg.at("range").size() != 2)
        throw retrialq::ConfigError("boundary config: \"range\" must be [lo, hi]");
    const double lo = cfg.at("range").at(0).get<double>();
    const double hi = cfg.at("range").at(1).get<double>();
    int grid_points = 256;
    if (cfg.contains("grid_points")) grid_points = cfg.at("grid_points").get<int>();
    double tol = 1e-8;
    if (cfg.contains("tol")) tol = cfg.at("tol").get<double>();
    if (flags.tol) tol = *flags.tol;

    const auto scan = retrialq::stability_intervals_mu0(system, lo, hi, grid_points, tol);

    const fs::path dir = effective_out(cfg, flags);
    {
        std::ofstream csv(dir / "boundary.csv", std::ios::binary);
        csv << "# retrialq " << RETRIALQ_VERSION << " seed=" << effective_seed(cfg, flags)
            << "\n";
        csv << "mu0,g\n";
        for (const auto& [x, g] : scan.curve)
            csv << retrialq::format_double(x) << ',' << retrialq::format_double(g) << '\n';
    }

    json j;
    j["intervals"] = json::array();
    for (const auto& iv : scan.intervals)
        j["intervals"].push_back({{"lo", iv.lo.mu0},
                                  {"hi", iv.hi.mu0},
                                  {"lo_refined", iv.lo.refined},
                                  {"hi_refined", iv.hi.refined}});
    j["warnings"] = scan.warnings;
    std::cout << j.dump(2) << "\n";
    return scan.warnings.empty() ? kExitOk : kExitNoConvergence;
}

int cmd_oracle(const json& cfg, const CommonFlags& flags) {
    retrialq::require_keys(cfg, {"system", "nmax", "tol", "max_iter", "adaptive", "out", "seed"},
                           "oracle config");
    const auto system = system_from(cfg);
    if (!system.markovian())
        throw retrialq::ConfigError(
            "oracle: needs a Markovian system (exponential interarrival and service)");
    const double lambda = system.arrival_rate();
    const double mu = system.service_rate();
    int nmax = 200;
    if (cfg.contains("nmax")) nmax = cfg.at("nmax").get<int>();
    double tol = 1e-10;
    if (cfg.contains("tol")) tol = cfg.at("tol").get<double>();
    if (flags.tol) tol = *flags.tol;
    long long max_iter = 200000;
    if (cfg.contains("max_iter")) max_iter = cfg.at("max_iter").get<long long>();
    bool adaptive = false;
    if (cfg.contains("adaptive")) adaptive = cfg.at("adaptive").get<bool>();

    retrialq::CtmcModel model;
    retrialq::StationaryResult result;
    retrialq::OrbitDiagnostics diag;
    json j;
    if (adaptive) {
        auto solved = retrialq::solve_retrial_adaptive(lambda, mu, system.retrial_rate,
                                                       system.servers, system.capacity, tol,
                                                       1e-8, nmax);
        model = std::move(solved.model);
        result = std::move(solved.result);
        diag = solved.diagnostics;
        j["nmax_used"] = solved.nmax_used;
        j["truncation_ok"] = solved.truncation_ok;
    } else {
        model = retrialq::build_retrial_ctmc(lambda, mu, system.retrial_rate, system.servers,
                                             system.capacity, nmax);
        result = retrialq::stationary(model, tol, max_iter);
        diag = retrialq::orbit_diagnostics(result, model);
        j["nmax_used"] = nmax;
    }
    j["expected_orbit"] = diag.expected_orbit;
    j["p_orbit_empty"] = diag.p_orbit_empty;
    j["p_system_empty"] = diag.p_system_empty;
    j["truncation_mass"] = diag.truncation_mass;
    j["residual"] = result.residual;
    j["iterations"] = result.iterations;
    j["converged"] = result.converged;

    if (cfg.contains("out") || flags.out) {
        constexpr int kDumpStateLimit = 200000;
        if (model.num_states() <= kDumpStateLimit) {
            const fs::path dir = effective_out(cfg, flags);
            std::ofstream csv(dir / "pi.csv", std::ios::binary);
            csv << "# retrialq " << RETRIALQ_VERSION << " seed=" << effective_seed(cfg, flags)
                << "\n";
            csv << "orbit,occupancy,pi\n";
            for (int s = 0; s < model.num_states(); ++s)
                csv << model.orbit_of(s) << ',' << model.occupancy_of(s) << ','
                    << retrialq::format_double(result.pi[s]) << '\n';
        }
    }
    std::cout << j.dump(2) << "\n";
    return result.converged ? kExitOk : kExitNoConvergence;
}

struct SweepPoint {
    double arrival_rate;
    double service_rate;
    double mu0;
};

int cmd_sweep(const json& cfg, const CommonFlags& flags) {
    retrialq::require_keys(cfg, {"system", "grid", "stop", "seed", "level", "out"},
                           "sweep config");
    const auto base = system_from(cfg);
    if (!cfg.contains("grid"))
        throw retrialq::ConfigError("sweep config: missing \"grid\" block");
    retrialq::require_keys(cfg.at("grid"), {"arrival_rate", "service_rate", "mu0"}, "grid");

    auto axis = [&](const char* key, double fallback) {
        std::vector<double> vals{fallback};
        if (cfg.at("grid").contains(key)) {
            vals.clear();
            for (const auto& v : cfg.at("grid").at(key)) vals.push_back(v.get<double>());
            if (vals.empty())
                throw retrialq::ConfigError(std::string("grid: empty axis \"") + key + "\"");
        }
        return vals;
    };
    const auto lambdas = axis("arrival_rate", base.arrival_rate());
    const auto mus = axis("service_rate", base.service_rate());
    const auto mu0s = axis("mu0", base.retrial_rate);
    if (cfg.at("grid").contains("arrival_rate") &&
        base.interarrival.kind() != retrialq::DistKind::Exponential)
        throw retrialq::ConfigError("grid: arrival_rate sweep needs exponential interarrival");
    if (cfg.at("grid").contains("service_rate") &&
        base.service.kind() != retrialq::DistKind::Exponential)
        throw retrialq::ConfigError("grid: service_rate sweep needs exponential service");

    std::vector<SweepPoint> points;
    for (double l : lambdas)
        for (double m : mus)
            for (double r : mu0s) points.push_back({l, m, r});

    const auto stop = effective_stop(cfg, flags, false);
    const auto base_seed = effective_seed(cfg, flags);
    const double level = config_level(cfg);

    struct Row {
        SweepPoint p;
        double ploss = 0.0, lhs = 0.0, rhs = 0.0, delta0 = 0.0;
        std::optional<std::pair<double, double>> ci;
        long long n_cycles = 0;
        std::string source, verdict;
    };
    std::vector<Row> rows(points.size());
    std::vector<std::exception_ptr> errors(points.size());

    parallel_for(points.size(), [&](std::size_t i) {
        try {
            retrialq::SystemConfig sys = base;
            if (cfg.at("grid").contains("arrival_rate"))
                sys.interarrival = retrialq::DistributionSpec::exponential(points[i].arrival_rate);
            if (cfg.at("grid").contains("service_rate"))
                sys.service = retrialq::DistributionSpec::exponential(points[i].service_rate);
            sys.retrial_rate = points[i].mu0;

            retrialq::PlossInput input;
            long long n_cycles = 0;
            if (const auto closed = retrialq::ploss_dispatch(sys)) {
                input.point = closed->value;
                input.source = closed->formula;
            } else {
                const auto est = simulate_ploss(sys, stop, base_seed + i, level);
                input.point = est.point;
                input.ci_lo = est.ci_lo;
                input.ci_hi = est.ci_hi;
                input.source = "simulation";
                n_cycles = est.n_cycles;
            }
            const auto rep = retrialq::evaluate(sys, input);
            Row row;
            row.p = points[i];
            row.ploss = input.point;
            if (input.ci_lo) row.ci = {{*input.ci_lo, *input.ci_hi}};
            row.lhs = rep.lhs;
            row.rhs = rep.rhs;
            row.delta0 = rep.delta0;
            row.source = input.source;
            row.verdict = retrialq::verdict_name(rep.verdict);
            row.n_cycles = n_cycles;
            rows[i] = std::move(row);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    });
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    const fs::path dir = effective_out(cfg, flags);
    const fs::path csv_path = dir / "sweep.csv";
    {
        std::ofstream csv(csv_path, std::ios::binary);
        csv << "# retrialq " << RETRIALQ_VERSION << " seed=" << base_seed << "\n";
        csv << "index,arrival_rate,service_rate,mu0,ploss,ploss_lo,ploss_hi,lhs,rhs,delta0,"
               "verdict,source,n_cycles\n";
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto& r = rows[i];
            csv << i << ',' << retrialq::format_double(r.p.arrival_rate) << ','
                << retrialq::format_double(r.p.service_rate) << ','
                << retrialq::format_double(r.p.mu0) << ',' << retrialq::format_double(r.ploss)
                << ',';
            if (r.ci)
                csv << retrialq::format_double(r.ci->first) << ','
                    << retrialq::format_double(r.ci->second);
            else
                csv << ',';
            csv << ',' << retrialq::format_double(r.lhs) << ','
                << retrialq::format_double(r.rhs) << ',' << retrialq::format_double(r.delta0)
                << ',' << r.verdict << ',' << r.source << ',' << r.n_cycles << '\n';
        }
    }
    json j{{"points", rows.size()}, {"csv", csv_path.string()}};
    std::cout << j.dump(2) << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"stability toolkit for constant-retrial-rate GI/G/c/K queues"};
    app.set_version_flag("--version", RETRIALQ_VERSION);
    app.require_subcommand(1);

    CommonFlags flags;
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"ploss", "loss probability of the auxiliary system (formula or simulation)"},
        {"simulate", "run the event simulator, write per-cycle CSV and a summary"},
        {"stability", "evaluate the stability conditions for one system"},
        {"boundary", "scan the stability region in the retrial rate"},
        {"oracle", "truncated-CTMC diagnostics for a Markovian system"},
        {"sweep", "parameter grid sweep with per-point verdicts"},
    };
    for (const auto& [name, desc] : commands) {
        auto* sub = app.add_subcommand(name, desc);
        sub->add_option("--config", flags.config_path, "JSON experiment config")->required();
        sub->add_option("--seed", flags.seed, "override the config seed");
        sub->add_option("--out", flags.out, "override the output directory");
        sub->add_option("--tol", flags.tol, "override the tolerance");
        sub->add_option("--cycles", flags.cycles, "override the stop rule cycle count");
        sub->add_option("--horizon", flags.horizon, "override the stop rule horizon");
    }

    CLI11_PARSE(app, argc, argv);

    try {
        const json cfg = load_config(flags.config_path);
        const std::string cmd = app.get_subcommands().front()->get_name();
        if (cmd == "ploss") return cmd_ploss(cfg, flags);
        if (cmd == "simulate") return cmd_simulate(cfg, flags);
        if (cmd == "stability") return cmd_stability(cfg, flags);
        if (cmd == "boundary") return cmd_boundary(cfg, flags);
        if (cmd == "oracle") return cmd_oracle(cfg, flags);
        if (cmd == "sweep") return cmd_sweep(cfg, flags);
        return kExitConfig;
    } catch (const retrialq::NumericalError& e) {
        std::cerr << "numerical refusal: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const retrialq::InsufficientData& e) {
        std::cerr << "insufficient data: " << e.what() << "\n";
        return kExitInsufficient;
    } catch (const retrialq::ConvergenceError& e) {
        std::cerr << "no convergence: " << e.what() << "\n";
        return kExitNoConvergence;
    } catch (const retrialq::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
