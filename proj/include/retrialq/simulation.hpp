#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "retrialq/config.hpp"

namespace retrialq {

// Run until the simulated clock reaches `horizon`, until `cycles`
// regeneration cycles have completed, or whichever comes first when both
// are set. A cycle-stop run capped by the horizon reports the cycles it
// completed instead of failing.
struct StopRule {
    std::optional<double> horizon;
    std::optional<long long> cycles;

    void validate() const {
        if (!horizon && !cycles)
            throw ConfigError("stop rule needs a horizon or a cycle count");
        if (horizon && !(*horizon > 0.0))
            throw NonPositiveHorizon("horizon must be > 0");
        if (cycles && *cycles < 1)
            throw ConfigError("cycle count must be >= 1");
    }
};

// Non-empty starts exercise the arbitrary-initial-state behavior: the
// first recorded cycle is then a delayed one and is flagged so that
// stationary estimators can drop it.
struct InitialState {
    long long orbit = 0;
    bool busy_full = false;

    bool empty() const { return orbit == 0 && !busy_full; }
};

struct SimOptions {
    InitialState initial;
    bool audit = false; // re-validate state invariants after every event
};

// Per-regeneration-cycle tallies. `arrivals` counts every admission
// attempt at the primary queue: lambda-arrivals in both modes, plus
// Poisson arrivals in auxiliary mode and retrial attempts in original
// mode, so rejections <= arrivals is an exact integer identity.
struct CycleRecord {
    double duration = 0.0;
    long long interarrivals = 0;
    long long arrivals = 0;
    long long rejections = 0;
    double orbit_empty_time = 0.0;
    long long max_orbit = 0;
};

struct PathStats {
    double time_avg_orbit = 0.0;
    double orbit_empty_fraction = 0.0; // mu_o(t) / t
    double loss_ratio = 0.0;           // R(t) / A(t)
};

struct SimTotals {
    long long lambda_arrivals = 0;
    long long poisson_arrivals = 0;
    long long retrial_attempts = 0;
    long long attempts = 0;
    long long rejections = 0;
    long long admissions = 0;
    long long completions = 0;
    double orbit_time_integral = 0.0;
    double orbit_empty_time = 0.0;
};

struct SimOutput {
    std::vector<CycleRecord> completed_cycles;
    CycleRecord truncated_tail; // partial tallies of the unfinished cycle
    bool has_truncated_tail = false;
    bool first_cycle_delayed = false;
    PathStats path_stats; // over the full horizon, tail included
    SimTotals totals;
    std::uint64_t seed = 0;
    long long event_count = 0;
    long long regenerations = 0;
    double horizon_used = 0.0;
    double wall_time_sec = 0.0;
};

SimOutput simulate(const SystemConfig& config, const StopRule& stop,
                   std::uint64_t seed, const SimOptions& options = {});

// mu_o(t)/t over the full run
double orbit_empty_fraction(const SimOutput& output);

// Cycle records usable by stationary estimators: drops the flagged
// delayed first cycle when the run started from a non-empty state.
std::span<const CycleRecord> stationary_cycles(const SimOutput& output);

} // namespace retrialq
