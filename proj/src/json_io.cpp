#include "retrialq/json_io.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "retrialq/errors.hpp"
#include "retrialq/version.hpp"

namespace retrialq {

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

void require_keys(const json& j, const std::vector<std::string>& allowed,
                  const std::string& context) {
    if (!j.is_object())
        throw ConfigError(context + ": expected a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ConfigError(context + ": unknown key \"" + key + "\"");
    }
}

namespace {

double get_number(const json& j, const std::string& key, const std::string& context) {
    if (!j.contains(key))
        throw ConfigError(context + ": missing key \"" + key + "\"");
    if (!j.at(key).is_number())
        throw ConfigError(context + ": \"" + key + "\" must be a number");
    return j.at(key).get<double>();
}

long long get_integer(const json& j, const std::string& key, const std::string& context) {
    if (!j.contains(key))
        throw ConfigError(context + ": missing key \"" + key + "\"");
    if (!j.at(key).is_number_integer())
        throw ConfigError(context + ": \"" + key + "\" must be an integer");
    return j.at(key).get<long long>();
}

std::vector<double> get_number_list(const json& j, const std::string& key,
                                    const std::string& context) {
    if (!j.contains(key) || !j.at(key).is_array())
        throw ConfigError(context + ": \"" + key + "\" must be an array of numbers");
    std::vector<double> out;
    for (const auto& v : j.at(key)) {
        if (!v.is_number())
            throw ConfigError(context + ": \"" + key + "\" must contain numbers only");
        out.push_back(v.get<double>());
    }
    return out;
}

} // namespace

DistributionSpec distribution_from_json(const json& j) {
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
        throw ConfigError("distribution: expected an object with a \"kind\" string");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "exponential") {
        require_keys(j, {"kind", "rate"}, "distribution(exponential)");
        return DistributionSpec::exponential(get_number(j, "rate", "exponential"));
    }
    if (kind == "deterministic") {
        require_keys(j, {"kind", "value"}, "distribution(deterministic)");
        return DistributionSpec::deterministic(get_number(j, "value", "deterministic"));
    }
    if (kind == "erlang") {
        require_keys(j, {"kind", "shape", "rate"}, "distribution(erlang)");
        return DistributionSpec::erlang(static_cast<int>(get_integer(j, "shape", "erlang")),
                                        get_number(j, "rate", "erlang"));
    }
    if (kind == "hyperexp") {
        require_keys(j, {"kind", "weights", "rates"}, "distribution(hyperexp)");
        return DistributionSpec::hyperexp(get_number_list(j, "weights", "hyperexp"),
                                          get_number_list(j, "rates", "hyperexp"));
    }
    if (kind == "uniform") {
        require_keys(j, {"kind", "lo", "hi"}, "distribution(uniform)");
        return DistributionSpec::uniform(get_number(j, "lo", "uniform"),
                                         get_number(j, "hi", "uniform"));
    }
    throw ConfigError("distribution: unknown kind \"" + kind + "\"");
}

json distribution_to_json(const DistributionSpec& spec) {
    switch (spec.kind()) {
    case DistKind::Exponential:
        return {{"kind", "exponential"}, {"rate", spec.rate()}};
    case DistKind::Deterministic:
        return {{"kind", "deterministic"}, {"value", spec.value()}};
    case DistKind::Erlang:
        return {{"kind", "erlang"}, {"shape", spec.shape()}, {"rate", spec.rate()}};
    case DistKind::HyperExponential:
        return {{"kind", "hyperexp"}, {"weights", spec.weights()}, {"rates", spec.rates()}};
    case DistKind::Uniform:
        return {{"kind", "uniform"}, {"lo", spec.lo()}, {"hi", spec.hi()}};
    }
    return {};
}

SystemConfig system_config_from_json(const json& j) {
    require_keys(j, {"interarrival", "service", "servers", "capacity", "retrial_rate", "mode"},
                 "system");
    for (const char* key : {"interarrival", "service", "servers", "capacity", "retrial_rate", "mode"})
        if (!j.contains(key))
            throw ConfigError(std::string("system: missing key \"") + key + "\"");

    SystemConfig cfg{distribution_from_json(j.at("interarrival")),
                     distribution_from_json(j.at("service"))};
    cfg.servers = static_cast<int>(get_integer(j, "servers", "system"));
    cfg.capacity = static_cast<int>(get_integer(j, "capacity", "system"));
    cfg.retrial_rate = get_number(j, "retrial_rate", "system");
    const std::string mode = j.at("mode").is_string() ? j.at("mode").get<std::string>() : "";
    if (mode == "original")
        cfg.mode = Mode::Original;
    else if (mode == "auxiliary")
        cfg.mode = Mode::Auxiliary;
    else
        throw ConfigError("system: mode must be \"original\" or \"auxiliary\"");
    cfg.validate();
    return cfg;
}

json system_config_to_json(const SystemConfig& config) {
    return {{"interarrival", distribution_to_json(config.interarrival)},
            {"service", distribution_to_json(config.service)},
            {"servers", config.servers},
            {"capacity", config.capacity},
            {"retrial_rate", config.retrial_rate},
            {"mode", config.mode == Mode::Original ? "original" : "auxiliary"}};
}

StopRule stop_rule_from_json(const json& j) {
    require_keys(j, {"cycles", "horizon"}, "stop");
    StopRule stop;
    if (j.contains("cycles")) stop.cycles = get_integer(j, "cycles", "stop");
    if (j.contains("horizon")) stop.horizon = get_number(j, "horizon", "stop");
    stop.validate();
    return stop;
}

json ratio_estimate_to_json(const RatioEstimate& est) {
    return {{"point", est.point},
            {"ci", {est.ci_lo, est.ci_hi}},
            {"level", est.level},
            {"n", est.n_cycles}};
}

json stability_report_to_json(const StabilityReport& rep) {
    json j{{"condition6", rep.condition6},
           {"lhs", rep.lhs},
           {"rhs", rep.rhs},
           {"delta0", rep.delta0},
           {"verdict", verdict_name(rep.verdict)},
           {"ploss_source", rep.ploss_source},
           {"exact_boundary", rep.markovian_exact}};
    if (rep.lhs_lo && rep.lhs_hi) j["lhs_ci"] = {*rep.lhs_lo, *rep.lhs_hi};
    return j;
}

json path_stats_to_json(const SimOutput& out) {
    return {{"time_avg_orbit", out.path_stats.time_avg_orbit},
            {"orbit_empty_fraction", out.path_stats.orbit_empty_fraction},
            {"loss_ratio", out.path_stats.loss_ratio},
            {"seed", out.seed},
            {"event_count", out.event_count},
            {"regenerations", out.regenerations},
            {"completed_cycles", out.completed_cycles.size()},
            {"horizon_used", out.horizon_used}};
}

void write_cycles_csv(std::ostream& os, const std::vector<CycleRecord>& cycles,
                      std::uint64_t seed) {
    os << "# retrialq " << RETRIALQ_VERSION << " seed=" << seed << "\n";
    os << "cycle_index,duration,interarrivals,arrivals,rejections,orbit_empty_time,max_orbit\n";
    for (std::size_t i = 0; i < cycles.size(); ++i) {
        const auto& c = cycles[i];
        os << i << ',' << format_double(c.duration) << ',' << c.interarrivals << ','
           << c.arrivals << ',' << c.rejections << ',' << format_double(c.orbit_empty_time)
           << ',' << c.max_orbit << '\n';
    }
}

std::vector<CycleRecord> read_cycles_csv(std::istream& is) {
    std::vector<CycleRecord> cycles;
    std::string line;
    bool header_seen = false;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) { // column header
            header_seen = true;
            continue;
        }
        std::istringstream row(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(row, field, ',')) fields.push_back(field);
        if (fields.size() != 7)
            throw ConfigError("cycles CSV: expected 7 columns, got " +
                              std::to_string(fields.size()));
        CycleRecord rec;
        rec.duration = std::stod(fields[1]);
        rec.interarrivals = std::stoll(fields[2]);
        rec.arrivals = std::stoll(fields[3]);
        rec.rejections = std::stoll(fields[4]);
        rec.orbit_empty_time = std::stod(fields[5]);
        rec.max_orbit = std::stoll(fields[6]);
        cycles.push_back(rec);
    }
    return cycles;
}

} // namespace retrialq
