#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "retrialq/analytic.hpp"
#include "retrialq/config.hpp"
#include "retrialq/distribution.hpp"
#include "retrialq/oracle.hpp"
#include "retrialq/regen.hpp"
#include "retrialq/simulation.hpp"
#include "retrialq/stability.hpp"
#include "retrialq/version.hpp"

namespace py = pybind11;
using namespace retrialq;

namespace {

Mode mode_from_string(const std::string& mode) {
    if (mode == "original") return Mode::Original;
    if (mode == "auxiliary") return Mode::Auxiliary;
    throw ConfigError("mode must be \"original\" or \"auxiliary\"");
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Stability toolkit for constant-retrial-rate GI/G/c/K queues";
    m.attr("__version__") = RETRIALQ_VERSION;

    py::class_<RandomStream>(m, "RandomStream")
        .def(py::init<std::uint64_t>(), py::arg("seed"))
        .def("uniform", &RandomStream::uniform)
        .def("exponential", &RandomStream::exponential, py::arg("rate"));

    py::class_<SupportBounds>(m, "SupportBounds")
        .def_readonly("inf", &SupportBounds::inf)
        .def_readonly("sup", &SupportBounds::sup);

    py::class_<DistributionSpec>(m, "DistributionSpec")
        .def_static("exponential", &DistributionSpec::exponential, py::arg("rate"))
        .def_static("deterministic", &DistributionSpec::deterministic, py::arg("value"))
        .def_static("erlang", &DistributionSpec::erlang, py::arg("shape"), py::arg("rate"))
        .def_static("hyperexp", &DistributionSpec::hyperexp, py::arg("weights"), py::arg("rates"))
        .def_static("uniform", &DistributionSpec::uniform, py::arg("lo"), py::arg("hi"))
        .def("mean", &DistributionSpec::mean)
        .def("support_bounds", &DistributionSpec::support_bounds)
        .def("sample", &DistributionSpec::sample, py::arg("rng"));

    m.def("condition6_holds", &condition6_holds, py::arg("interarrival"), py::arg("service"));

    py::class_<SystemConfig>(m, "SystemConfig")
        .def(py::init([](const DistributionSpec& interarrival, const DistributionSpec& service,
                         int servers, int capacity, double retrial_rate, const std::string& mode) {
                 SystemConfig cfg{interarrival, service, servers, capacity, retrial_rate,
                                  mode_from_string(mode)};
                 cfg.validate();
                 return cfg;
             }),
             py::arg("interarrival"), py::arg("service"), py::arg("servers"),
             py::arg("capacity"), py::arg("retrial_rate"), py::arg("mode") = "original")
        .def_readonly("servers", &SystemConfig::servers)
        .def_readonly("capacity", &SystemConfig::capacity)
        .def_readonly("retrial_rate", &SystemConfig::retrial_rate)
        .def_property_readonly("mode",
                               [](const SystemConfig& c) {
                                   return c.mode == Mode::Original ? "original" : "auxiliary";
                               })
        .def_property_readonly("arrival_rate", &SystemConfig::arrival_rate)
        .def_property_readonly("service_rate", &SystemConfig::service_rate);

    py::class_<CycleRecord>(m, "CycleRecord")
        .def_readonly("duration", &CycleRecord::duration)
        .def_readonly("interarrivals", &CycleRecord::interarrivals)
        .def_readonly("arrivals", &CycleRecord::arrivals)
        .def_readonly("rejections", &CycleRecord::rejections)
        .def_readonly("orbit_empty_time", &CycleRecord::orbit_empty_time)
        .def_readonly("max_orbit", &CycleRecord::max_orbit);

    py::class_<PathStats>(m, "PathStats")
        .def_readonly("time_avg_orbit", &PathStats::time_avg_orbit)
        .def_readonly("orbit_empty_fraction", &PathStats::orbit_empty_fraction)
        .def_readonly("loss_ratio", &PathStats::loss_ratio);

    py::class_<SimOutput>(m, "SimOutput")
        .def_readonly("completed_cycles", &SimOutput::completed_cycles)
        .def_readonly("first_cycle_delayed", &SimOutput::first_cycle_delayed)
        .def_readonly("path_stats", &SimOutput::path_stats)
        .def_readonly("seed", &SimOutput::seed)
        .def_readonly("event_count", &SimOutput::event_count)
        .def_readonly("regenerations", &SimOutput::regenerations)
        .def_readonly("horizon_used", &SimOutput::horizon_used)
        .def_readonly("wall_time_sec", &SimOutput::wall_time_sec);

    m.def(
        "simulate",
        [](const SystemConfig& config, py::object cycles, py::object horizon,
           std::uint64_t seed, bool audit, long long initial_orbit, bool initial_busy_full) {
            StopRule stop;
            if (!cycles.is_none()) stop.cycles = cycles.cast<long long>();
            if (!horizon.is_none()) stop.horizon = horizon.cast<double>();
            SimOptions options;
            options.audit = audit;
            options.initial.orbit = initial_orbit;
            options.initial.busy_full = initial_busy_full;
            return simulate(config, stop, seed, options);
        },
        py::arg("config"), py::arg("cycles") = py::none(), py::arg("horizon") = py::none(),
        py::arg("seed") = 1, py::arg("audit") = false, py::arg("initial_orbit") = 0,
        py::arg("initial_busy_full") = false);

    m.def("orbit_empty_fraction", &orbit_empty_fraction, py::arg("output"));

    py::class_<RatioEstimate>(m, "RatioEstimate")
        .def_readonly("point", &RatioEstimate::point)
        .def_readonly("ci_lo", &RatioEstimate::ci_lo)
        .def_readonly("ci_hi", &RatioEstimate::ci_hi)
        .def_readonly("level", &RatioEstimate::level)
        .def_readonly("n_cycles", &RatioEstimate::n_cycles)
        .def("covers", &RatioEstimate::covers, py::arg("x"));

    m.def(
        "ratio_estimate",
        [](const std::vector<CycleRecord>& cycles, const std::string& numerator,
           const std::string& denominator, double level) {
            return ratio_estimate(cycles, cycle_field_from_name(numerator),
                                  cycle_field_from_name(denominator), level);
        },
        py::arg("cycles"), py::arg("numerator"), py::arg("denominator"),
        py::arg("level") = 0.95);
    m.def(
        "mean_cycle",
        [](const std::vector<CycleRecord>& cycles, const std::string& field, double level) {
            return mean_cycle(cycles, cycle_field_from_name(field), level);
        },
        py::arg("cycles"), py::arg("field"), py::arg("level") = 0.95);
    m.def("normal_quantile", &normal_quantile, py::arg("p"));

    m.def("ploss_mmck", &ploss_mmck, py::arg("total_rate"), py::arg("service_rate"),
          py::arg("c"), py::arg("k"));
    m.def("ploss_mm1k", &ploss_mm1k, py::arg("total_rate"), py::arg("service_rate"),
          py::arg("k"));
    m.def("erlang_b", &erlang_b, py::arg("offered_load"), py::arg("c"));
    m.def("ploss_md1k", &ploss_md1k, py::arg("total_rate"), py::arg("service_time"),
          py::arg("k"));
    m.def(
        "ploss_dispatch",
        [](const SystemConfig& config) -> py::object {
            const auto v = ploss_dispatch(config);
            if (!v) return py::none();
            return py::make_tuple(v->value, v->formula);
        },
        py::arg("config"));

    m.def("bd_loss_solve", &bd_loss_solve, py::arg("offered_load"), py::arg("c"), py::arg("k"));
    m.def(
        "retrial_orbit_diagnostics",
        [](double lambda, double mu, double mu0, int c, int K, int nmax, double tol) {
            const auto model = build_retrial_ctmc(lambda, mu, mu0, c, K, nmax);
            const auto res = stationary(model, tol);
            const auto diag = orbit_diagnostics(res, model);
            py::dict d;
            d["expected_orbit"] = diag.expected_orbit;
            d["p_orbit_empty"] = diag.p_orbit_empty;
            d["p_system_empty"] = diag.p_system_empty;
            d["truncation_mass"] = diag.truncation_mass;
            d["residual"] = res.residual;
            d["iterations"] = res.iterations;
            d["converged"] = res.converged;
            return d;
        },
        py::arg("lambda_rate"), py::arg("mu"), py::arg("mu0"), py::arg("c"), py::arg("k"),
        py::arg("nmax") = 200, py::arg("tol") = 1e-10);

    py::class_<StabilityReport>(m, "StabilityReport")
        .def_readonly("condition6", &StabilityReport::condition6)
        .def_readonly("lhs", &StabilityReport::lhs)
        .def_readonly("rhs", &StabilityReport::rhs)
        .def_readonly("delta0", &StabilityReport::delta0)
        .def_property_readonly("verdict",
                               [](const StabilityReport& r) { return verdict_name(r.verdict); })
        .def_readonly("ploss_source", &StabilityReport::ploss_source)
        .def_readonly("exact_boundary", &StabilityReport::markovian_exact);

    m.def(
        "evaluate_stability",
        [](const SystemConfig& config, py::object ploss) {
            PlossInput input;
            if (ploss.is_none()) {
                const auto closed = ploss_dispatch(config);
                if (!closed)
                    throw UnsupportedFamily(
                        "no closed form for this system; pass an explicit P_loss");
                input.point = closed->value;
                input.source = closed->formula;
            } else {
                input.point = ploss.cast<double>();
                input.source = "user";
            }
            return evaluate(config, input);
        },
        py::arg("config"), py::arg("ploss") = py::none());

    m.def(
        "stability_intervals_mu0",
        [](const SystemConfig& config, double mu0_lo, double mu0_hi, int grid_points,
           double tol) {
            const auto scan = stability_intervals_mu0(config, mu0_lo, mu0_hi, grid_points, tol);
            py::list out;
            for (const auto& iv : scan.intervals)
                out.append(py::make_tuple(iv.lo.mu0, iv.hi.mu0));
            return out;
        },
        py::arg("config"), py::arg("mu0_lo"), py::arg("mu0_hi"), py::arg("grid_points") = 256,
        py::arg("tol") = 1e-8);
    m.def("stability_gap", &stability_gap, py::arg("config"), py::arg("mu0"));
}
