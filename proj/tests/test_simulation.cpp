#include <doctest.h>

#include <cmath>
#include <vector>

#include "retrialq/analytic.hpp"
#include "retrialq/errors.hpp"
#include "retrialq/regen.hpp"
#include "retrialq/simulation.hpp"
#include "helpers.hpp"

using namespace retrialq;
using testutil::mmck_config;

namespace {

SimOptions audited() {
    SimOptions o;
    o.audit = true;
    return o;
}

SystemConfig deterministic_config() {
    return {DistributionSpec::deterministic(1.0), DistributionSpec::deterministic(0.5),
            1, 1, 1.0, Mode::Original};
}

} // namespace

TEST_CASE("deterministic light-traffic run: every job clears before the next arrival") {
    StopRule stop;
    stop.horizon = 10.0;
    const auto out = simulate(deterministic_config(), stop, 3, audited());
    CHECK(out.regenerations == 10); // arrivals at t = 0..9, each finds the system empty
    CHECK(out.totals.rejections == 0);
    CHECK(out.totals.lambda_arrivals == 10);
    CHECK(orbit_empty_fraction(out) == 1.0);
    CHECK(out.completed_cycles.size() == 9);
    for (const auto& c : out.completed_cycles) {
        CHECK(c.duration == doctest::Approx(1.0));
        CHECK(c.interarrivals == 1);
        CHECK(c.max_orbit == 0);
    }
    CHECK(out.has_truncated_tail);
    CHECK(out.truncated_tail.duration == doctest::Approx(1.0));
}

TEST_CASE("simultaneous completion and arrival: the completion wins") {
    // service exactly equal to the interarrival gap; without the
    // completion-first rule every second arrival would be rejected
    SystemConfig cfg{DistributionSpec::deterministic(1.0), DistributionSpec::deterministic(1.0),
                     1, 1, 1.0, Mode::Original};
    StopRule stop;
    stop.horizon = 10.0;
    const auto out = simulate(cfg, stop, 3, audited());
    CHECK(out.totals.rejections == 0);
    CHECK(out.regenerations == 10);
}

TEST_CASE("cycle-count stop yields exactly that many records, reproducibly") {
    auto cfg = mmck_config(1.0, 1.5, 0.7, 1, 2);
    StopRule stop;
    stop.cycles = 250;
    const auto a = simulate(cfg, stop, 99, audited());
    const auto b = simulate(cfg, stop, 99);
    CHECK(a.completed_cycles.size() == 250);
    CHECK(b.completed_cycles.size() == 250);
    CHECK(a.event_count == b.event_count);
    CHECK(a.horizon_used == b.horizon_used);
    CHECK(a.totals.rejections == b.totals.rejections);
    for (std::size_t i = 0; i < a.completed_cycles.size(); ++i) {
        CHECK(a.completed_cycles[i].duration == b.completed_cycles[i].duration);
        CHECK(a.completed_cycles[i].arrivals == b.completed_cycles[i].arrivals);
    }
    CHECK_FALSE(a.has_truncated_tail); // the run stops exactly on a regeneration
}

TEST_CASE("auxiliary M/M/1/1 loss ratio matches the two-state solve") {
    // lambda = mu0 = mu = 1: offered load 2, P_loss = 2/3
    auto cfg = mmck_config(1.0, 1.0, 1.0, 1, 1, Mode::Auxiliary);
    const auto est = testutil::aux_loss_estimate(cfg, 100000, 2024);
    CHECK(est.covers(2.0 / 3.0));
    CHECK(est.half_width() < 0.01);
}

TEST_CASE("audit mode passes across a battery of configurations") {
    std::vector<SystemConfig> configs = {
        mmck_config(1.0, 1.0, 1.0, 1, 1),
        mmck_config(2.0, 1.0, 0.5, 2, 4),
        mmck_config(0.3, 2.0, 1.0, 1, 3),
        {DistributionSpec::deterministic(1.0), DistributionSpec::deterministic(1.0), 1, 1, 2.0,
         Mode::Original},
        {DistributionSpec::uniform(0.0, 2.0), DistributionSpec::uniform(0.5, 1.5), 2, 3, 1.0,
         Mode::Original},
        {DistributionSpec::erlang(3, 3.0), DistributionSpec::hyperexp({0.4, 0.6}, {0.5, 3.0}),
         1, 2, 0.8, Mode::Original},
    };
    std::uint64_t seed = 50;
    for (auto cfg : configs) {
        for (auto mode : {Mode::Original, Mode::Auxiliary}) {
            cfg.mode = mode;
            StopRule stop;
            stop.horizon = 2000.0;
            const auto out = simulate(cfg, stop, seed++, audited());
            CHECK(out.totals.attempts == out.totals.rejections + out.totals.admissions);
            CHECK(out.totals.rejections <= out.totals.attempts);
            for (const auto& c : out.completed_cycles) {
                CHECK(c.duration > 0.0);
                CHECK(c.rejections <= c.arrivals);
                CHECK(c.orbit_empty_time <= c.duration * (1.0 + 1e-12));
                CHECK(c.interarrivals >= 1);
            }
        }
    }
}

TEST_CASE("removing orbit feedback does not lower the rejection ratio in distribution") {
    // same seeds, both modes; the comparison is between means, not paths
    auto cfg = mmck_config(1.0, 1.3, 0.8, 1, 2);
    StopRule stop;
    stop.horizon = 400.0;
    std::vector<double> orig_ratio, aux_ratio;
    for (std::uint64_t s = 0; s < 200; ++s) {
        auto orig = cfg;
        orig.mode = Mode::Original;
        orig_ratio.push_back(simulate(orig, stop, 31000 + s).path_stats.loss_ratio);
        auto aux = cfg;
        aux.mode = Mode::Auxiliary;
        aux_ratio.push_back(simulate(aux, stop, 31000 + s).path_stats.loss_ratio);
    }
    const double pooled_se = std::sqrt(std::pow(testutil::standard_error(orig_ratio), 2) +
                                       std::pow(testutil::standard_error(aux_ratio), 2));
    CHECK(testutil::mean(aux_ratio) >= testutil::mean(orig_ratio) - 3.0 * pooled_se);
}

TEST_CASE("one long run and many restarts give indistinguishable mean cycle lengths") {
    auto cfg = mmck_config(0.5, 2.0, 1.0, 1, 1); // stable with margin
    StopRule long_stop;
    long_stop.cycles = 4000;
    const auto long_run = simulate(cfg, long_stop, 9001);
    std::vector<double> long_durations;
    for (const auto& c : long_run.completed_cycles) long_durations.push_back(c.duration);

    std::vector<double> restart_durations;
    StopRule short_stop;
    short_stop.cycles = 100;
    for (std::uint64_t s = 0; s < 40; ++s) {
        const auto run = simulate(cfg, short_stop, 777000 + s);
        for (const auto& c : run.completed_cycles) restart_durations.push_back(c.duration);
    }

    const double z = (testutil::mean(long_durations) - testutil::mean(restart_durations)) /
                     std::sqrt(std::pow(testutil::standard_error(long_durations), 2) +
                               std::pow(testutil::standard_error(restart_durations), 2));
    CHECK(std::fabs(z) < 2.5758); // 1% two-sided
}

TEST_CASE("non-empty initial state: delayed first cycle is flagged and dropped") {
    auto cfg = mmck_config(0.5, 2.0, 1.0, 1, 2);
    StopRule stop;
    stop.cycles = 50;
    SimOptions options;
    options.initial.orbit = 5;
    options.initial.busy_full = true;
    options.audit = true;
    const auto out = simulate(cfg, stop, 17, options);
    CHECK(out.first_cycle_delayed);
    CHECK(out.completed_cycles.size() == 50);
    const auto usable = stationary_cycles(out);
    CHECK(usable.size() == 49);
    CHECK(usable.data() == out.completed_cycles.data() + 1);
    // the delayed stretch starts with a populated orbit
    CHECK(out.completed_cycles.front().max_orbit >= 5);

    const auto empty_start = simulate(cfg, stop, 17);
    CHECK_FALSE(empty_start.first_cycle_delayed);
    CHECK(stationary_cycles(empty_start).size() == 50);
}

TEST_CASE("orbit-empty fraction") {
    SUBCASE("orbit never occupied") {
        StopRule stop;
        stop.horizon = 25.0;
        const auto out = simulate(deterministic_config(), stop, 5);
        CHECK(orbit_empty_fraction(out) == 1.0);
    }
    SUBCASE("constructed path occupied half the horizon") {
        SimOutput out;
        out.horizon_used = 8.0;
        out.totals.orbit_empty_time = 4.0;
        CHECK(orbit_empty_fraction(out) == 0.5);
    }
    SUBCASE("stable run beats the delta0 bound") {
        // lambda=0.2, mu=2, mu0=1: P_loss=0.375, delta0 = 1 - 1.2*0.375 = 0.55
        auto cfg = mmck_config(0.2, 2.0, 1.0, 1, 1);
        StopRule stop;
        stop.horizon = 200000.0;
        const auto out = simulate(cfg, stop, 8);
        const auto frac = ratio_estimate(stationary_cycles(out), CycleField::OrbitEmptyTime,
                                         CycleField::Duration);
        const double se = frac.half_width() / 1.959963984540054;
        CHECK(orbit_empty_fraction(out) >= 0.55 - 3.0 * se);
    }
    SUBCASE("zero horizon is rejected") {
        SimOutput out;
        CHECK_THROWS_AS(orbit_empty_fraction(out), NonPositiveHorizon);
    }
}

TEST_CASE("horizon-capped cycle runs report what they completed") {
    auto cfg = mmck_config(1.0, 1.0, 1.0, 1, 1);
    StopRule stop;
    stop.cycles = 1000000;
    stop.horizon = 50.0;
    const auto out = simulate(cfg, stop, 12);
    CHECK(out.completed_cycles.size() < 1000000);
    CHECK(out.horizon_used == 50.0);
}

TEST_CASE("stop rules are validated") {
    auto cfg = mmck_config(1.0, 1.0, 1.0, 1, 1);
    StopRule bad;
    CHECK_THROWS_AS(simulate(cfg, bad, 1), ConfigError);
    bad.horizon = 0.0;
    CHECK_THROWS_AS(simulate(cfg, bad, 1), NonPositiveHorizon);
    bad.horizon = -3.0;
    CHECK_THROWS_AS(simulate(cfg, bad, 1), NonPositiveHorizon);
    StopRule bad_cycles;
    bad_cycles.cycles = 0;
    CHECK_THROWS_AS(simulate(cfg, bad_cycles, 1), ConfigError);
}

TEST_CASE("system configuration is validated") {
    auto cfg = mmck_config(1.0, 1.0, 1.0, 1, 1);
    cfg.servers = 0;
    CHECK_THROWS_AS(cfg.validate(), InvalidDimensions);
    cfg = mmck_config(1.0, 1.0, 1.0, 3, 2);
    CHECK_THROWS_AS(cfg.validate(), InvalidDimensions);
    cfg = mmck_config(1.0, 1.0, 1.0, 1, 1);
    cfg.retrial_rate = 0.0;
    CHECK_THROWS_AS(cfg.validate(), NonPositiveRate);
}

TEST_CASE("failed retrials are generated and counted") {
    // saturate the primary queue: long deterministic services, fast retrials
    SystemConfig cfg{DistributionSpec::deterministic(1.0), DistributionSpec::deterministic(50.0),
                     1, 1, 5.0, Mode::Original};
    StopRule stop;
    stop.horizon = 49.0; // one service period, primary stays busy
    const auto out = simulate(cfg, stop, 21, audited());
    CHECK(out.totals.retrial_attempts > 0);
    // every retrial in this window fails and counts as a rejection
    CHECK(out.totals.rejections ==
          out.totals.retrial_attempts + (out.totals.lambda_arrivals - 1));
    CHECK(out.totals.attempts == out.totals.lambda_arrivals + out.totals.retrial_attempts);
}
