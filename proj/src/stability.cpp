#include "retrialq/stability.hpp"

#include <cmath>

#include "retrialq/errors.hpp"

namespace retrialq {

std::string verdict_name(Verdict v) {
    switch (v) {
    case Verdict::StableSufficient: return "StableSufficient";
    case Verdict::NotGuaranteed: return "NotGuaranteed";
    case Verdict::Infeasible6: return "Infeasible6";
    case Verdict::Undecided: return "Undecided";
    }
    return "?";
}

StabilityReport evaluate(const SystemConfig& config, const PlossInput& ploss) {
    config.validate();
    if (!(ploss.point > 0.0 && ploss.point < 1.0))
        throw ConfigError("evaluate: P_loss must be in (0,1)");

    const double total = config.total_rate();
    StabilityReport rep;
    rep.condition6 = condition6_holds(config.interarrival, config.service);
    rep.lhs = total * ploss.point;
    rep.rhs = config.retrial_rate;
    rep.delta0 = 1.0 - rep.lhs / rep.rhs;
    rep.ploss_source = ploss.source;
    rep.markovian_exact = config.markovian();
    if (ploss.ci_lo && ploss.ci_hi) {
        rep.lhs_lo = total * *ploss.ci_lo;
        rep.lhs_hi = total * *ploss.ci_hi;
    }

    if (!rep.condition6) {
        rep.verdict = Verdict::Infeasible6;
    } else if (rep.lhs_lo && rep.lhs_hi) {
        if (*rep.lhs_hi < rep.rhs)
            rep.verdict = Verdict::StableSufficient;
        else if (*rep.lhs_lo > rep.rhs)
            rep.verdict = Verdict::NotGuaranteed;
        else
            rep.verdict = Verdict::Undecided;
    } else {
        rep.verdict = rep.lhs < rep.rhs ? Verdict::StableSufficient : Verdict::NotGuaranteed;
    }
    return rep;
}

double stability_gap(const SystemConfig& config, double mu0) {
    if (!(mu0 > 0.0)) throw NonPositiveRate("mu0 must be > 0");
    SystemConfig probe = config;
    probe.retrial_rate = mu0;
    const auto closed = ploss_dispatch(probe);
    if (!closed)
        throw UnsupportedFamily("stability_gap needs a closed-form loss family");
    return probe.total_rate() * closed->value - mu0;
}

namespace {

// Bisect a sign change of g inside [lo, hi] down to |g| <= tol.
// Returns nullopt if refinement stalls (reported upstream, not hidden).
std::optional<double> bisect_root(const SystemConfig& config, double lo, double g_lo,
                                  double hi, double tol) {
    double a = lo, b = hi;
    double ga = g_lo;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + b);
        const double gm = stability_gap(config, mid);
        if (std::fabs(gm) <= tol) return mid;
        if ((gm < 0.0) == (ga < 0.0)) {
            a = mid;
            ga = gm;
        } else {
            b = mid;
        }
    }
    return std::nullopt;
}

} // namespace

BoundaryScan stability_intervals_mu0(const SystemConfig& config, double mu0_lo,
                                     double mu0_hi, int grid_points, double tol) {
    if (!(mu0_lo > 0.0) || !(mu0_hi > mu0_lo))
        throw ConfigError("stability_intervals_mu0: need 0 < mu0_lo < mu0_hi");
    if (grid_points < 16) throw ConfigError("stability_intervals_mu0: need >= 16 grid points");
    if (!(tol > 0.0)) throw ConfigError("stability_intervals_mu0: tol must be > 0");

    BoundaryScan scan;
    scan.curve.reserve(grid_points);
    const double log_lo = std::log(mu0_lo), log_hi = std::log(mu0_hi);
    for (int i = 0; i < grid_points; ++i) {
        const double x =
            std::exp(log_lo + (log_hi - log_lo) * i / static_cast<double>(grid_points - 1));
        scan.curve.emplace_back(x, stability_gap(config, x));
    }

    std::optional<BoundaryEndpoint> open_lo;
    auto close_interval = [&](BoundaryEndpoint hi_ep) {
        scan.intervals.push_back({*open_lo, hi_ep});
        open_lo.reset();
    };

    if (scan.curve.front().second < 0.0)
        open_lo = BoundaryEndpoint{mu0_lo, false};
    for (int i = 1; i < grid_points; ++i) {
        const auto [x0, g0] = scan.curve[i - 1];
        const auto [x1, g1] = scan.curve[i];
        const bool was_neg = g0 < 0.0, is_neg = g1 < 0.0;
        if (was_neg == is_neg) continue;
        const auto root = bisect_root(config, x0, g0, x1, tol);
        if (!root) {
            scan.warnings.push_back("bracket [" + std::to_string(x0) + ", " +
                                    std::to_string(x1) + "] lost its sign change under refinement");
            // fall back to the inner grid point so the reported set stays conservative
            if (is_neg)
                open_lo = BoundaryEndpoint{x1, false};
            else if (open_lo)
                close_interval({x0, false});
            continue;
        }
        if (is_neg)
            open_lo = BoundaryEndpoint{*root, true};
        else if (open_lo)
            close_interval({*root, true});
    }
    if (open_lo) close_interval({mu0_hi, false});
    return scan;
}

} // namespace retrialq
