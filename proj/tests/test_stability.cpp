#include <doctest.h>

#include <cmath>

#include "retrialq/errors.hpp"
#include "retrialq/stability.hpp"
#include "helpers.hpp"

using namespace retrialq;
using testutil::mmck_config;

namespace {

PlossInput formula_input(const SystemConfig& cfg) {
    const auto v = ploss_dispatch(cfg);
    REQUIRE(v.has_value());
    return {v->value, std::nullopt, std::nullopt, v->formula};
}

} // namespace

TEST_CASE("stable Markovian example") {
    const auto cfg = mmck_config(0.2, 2.0, 1.0, 1, 1);
    const auto rep = evaluate(cfg, formula_input(cfg));
    CHECK(rep.condition6);
    CHECK(rep.lhs == doctest::Approx(0.45).epsilon(1e-12)); // 1.2 * 0.375
    CHECK(rep.rhs == 1.0);
    CHECK(rep.delta0 == doctest::Approx(0.55).epsilon(1e-12));
    CHECK(rep.verdict == Verdict::StableSufficient);
    CHECK(rep.markovian_exact);
    CHECK(rep.ploss_source == "mmck");
}

TEST_CASE("overloaded Markovian example is not stabilizable at this mu0") {
    const auto cfg = mmck_config(1.0, 1.0, 1.0, 1, 1);
    const auto rep = evaluate(cfg, formula_input(cfg));
    CHECK(rep.lhs == doctest::Approx(4.0 / 3.0).epsilon(1e-12)); // 2 * 2/3
    CHECK(rep.verdict == Verdict::NotGuaranteed);
    CHECK(rep.delta0 < 0.0);
}

TEST_CASE("deterministic service longer than every interarrival fails condition (6)") {
    SystemConfig cfg{DistributionSpec::deterministic(1.0), DistributionSpec::deterministic(2.0),
                     1, 1, 5.0, Mode::Original};
    PlossInput input{0.5, std::nullopt, std::nullopt, "user"};
    const auto rep = evaluate(cfg, input);
    CHECK(rep.verdict == Verdict::Infeasible6);
    CHECK_FALSE(rep.condition6);
    CHECK_FALSE(rep.markovian_exact);
}

TEST_CASE("simulation-sourced verdicts propagate the confidence interval") {
    const auto cfg = mmck_config(0.2, 2.0, 1.0, 1, 1); // lhs = 0.45 at the point
    SUBCASE("interval clear of the boundary: stable") {
        PlossInput in{0.375, 0.36, 0.39, "simulation"};
        const auto rep = evaluate(cfg, in);
        CHECK(rep.verdict == Verdict::StableSufficient);
        CHECK(*rep.lhs_hi == doctest::Approx(1.2 * 0.39));
    }
    SUBCASE("interval straddles the boundary: undecided") {
        PlossInput in{0.8, 0.7, 0.9, "simulation"}; // lhs in [0.84, 1.08] vs rhs 1
        CHECK(evaluate(cfg, in).verdict == Verdict::Undecided);
    }
    SUBCASE("interval above the boundary: not guaranteed") {
        PlossInput in{0.9, 0.86, 0.94, "simulation"}; // lhs_lo = 1.032 > 1
        CHECK(evaluate(cfg, in).verdict == Verdict::NotGuaranteed);
    }
}

TEST_CASE("evaluate validates its inputs") {
    const auto cfg = mmck_config(1.0, 1.0, 1.0, 1, 1);
    CHECK_THROWS_AS(evaluate(cfg, PlossInput{0.0, std::nullopt, std::nullopt, ""}), ConfigError);
    CHECK_THROWS_AS(evaluate(cfg, PlossInput{1.0, std::nullopt, std::nullopt, ""}), ConfigError);
}

TEST_CASE("balanced M/M/1/1 has an empty stability set") {
    // g(mu0) = (1+mu0)^2/(2+mu0) - mu0 = 1/(2+mu0) > 0 for all mu0
    const auto cfg = mmck_config(1.0, 1.0, 1.0, 1, 1);
    const auto scan = stability_intervals_mu0(cfg, 0.01, 100.0, 256, 1e-8);
    CHECK(scan.intervals.empty());
    CHECK(scan.warnings.empty());
    for (const auto& [x, g] : scan.curve) {
        CHECK(g > 0.0);
        CHECK(g == doctest::Approx(1.0 / (2.0 + x)).epsilon(1e-10));
    }
}

TEST_CASE("lightly loaded M/M/1/1 has a nonempty region with a refined left root") {
    const auto cfg = mmck_config(0.2, 2.0, 1.0, 1, 1);
    const auto scan = stability_intervals_mu0(cfg, 0.001, 10.0, 256, 1e-8);
    REQUIRE(scan.intervals.size() == 1);
    const auto& iv = scan.intervals.front();
    CHECK(iv.lo.refined);
    CHECK(std::fabs(stability_gap(cfg, iv.lo.mu0)) <= 1e-8);
    // hand algebra: the root solves 0.4 = 1.8 (lambda + mu0)
    CHECK(iv.lo.mu0 == doctest::Approx(0.4 / 1.8 - 0.2).epsilon(1e-4));
    // g stays negative through the top of the range, so the right endpoint
    // is the range bound, not a root
    CHECK_FALSE(iv.hi.refined);
    CHECK(iv.hi.mu0 == 10.0);
    CHECK(stability_gap(cfg, 10.0) < 0.0);
    // the example configuration mu0 = 1 sits inside
    CHECK(iv.lo.mu0 < 1.0);

    // consistency with evaluate at interior points
    for (double mu0 : {0.05, 0.3, 1.0, 5.0}) {
        REQUIRE(mu0 > iv.lo.mu0);
        auto probe = cfg;
        probe.retrial_rate = mu0;
        CHECK(evaluate(probe, formula_input(probe)).verdict == Verdict::StableSufficient);
    }
}

TEST_CASE("every refined endpoint satisfies the gap tolerance") {
    const auto cfg = mmck_config(0.5, 2.0, 1.0, 1, 3);
    const auto scan = stability_intervals_mu0(cfg, 0.001, 50.0, 128, 1e-10);
    CHECK(scan.warnings.empty());
    for (const auto& iv : scan.intervals) {
        if (iv.lo.refined) CHECK(std::fabs(stability_gap(cfg, iv.lo.mu0)) <= 1e-10);
        if (iv.hi.refined) CHECK(std::fabs(stability_gap(cfg, iv.hi.mu0)) <= 1e-10);
    }
}

TEST_CASE("doubling the grid never loses an interval") {
    const auto cfg = mmck_config(0.2, 2.0, 1.0, 1, 1);
    const auto coarse = stability_intervals_mu0(cfg, 0.001, 10.0, 64, 1e-8);
    const auto fine = stability_intervals_mu0(cfg, 0.001, 10.0, 128, 1e-8);
    for (const auto& civ : coarse.intervals) {
        bool covered = false;
        for (const auto& fiv : fine.intervals)
            covered |= fiv.lo.mu0 <= civ.lo.mu0 + 1e-6 && fiv.hi.mu0 >= civ.hi.mu0 - 1e-6;
        CHECK(covered);
    }
}

TEST_CASE("the scanner needs a closed-form family") {
    SystemConfig gi{DistributionSpec::erlang(2, 2.0), DistributionSpec::exponential(1.0),
                    1, 2, 1.0, Mode::Original};
    CHECK_THROWS_AS(stability_intervals_mu0(gi, 0.01, 10.0), UnsupportedFamily);
    const auto cfg = mmck_config(1.0, 1.0, 1.0, 1, 1);
    CHECK_THROWS_AS(stability_intervals_mu0(cfg, 0.01, 10.0, 8), ConfigError);
    CHECK_THROWS_AS(stability_intervals_mu0(cfg, -1.0, 10.0), ConfigError);
    CHECK_THROWS_AS(stability_intervals_mu0(cfg, 1.0, 1.0), ConfigError);
}

TEST_CASE("M/D/1/K stability uses the total-rate load convention") {
    // deterministic service, c=1: dispatch goes through the M/D/1/K form
    SystemConfig cfg{DistributionSpec::exponential(0.3), DistributionSpec::deterministic(0.5),
                     1, 2, 1.0, Mode::Original};
    const auto v = ploss_dispatch(cfg);
    REQUIRE(v.has_value());
    CHECK(v->formula == "md1k");
    // rho fed to the formula is (lambda + mu0) * D = 1.3 * 0.5
    CHECK(v->value == doctest::Approx(ploss_md1k(1.3, 0.5, 2)).epsilon(1e-15));
    const auto rep = evaluate(cfg, formula_input(cfg));
    CHECK(rep.lhs == doctest::Approx(1.3 * v->value).epsilon(1e-12));
    CHECK_FALSE(rep.markovian_exact); // deterministic service: sufficient only
}
