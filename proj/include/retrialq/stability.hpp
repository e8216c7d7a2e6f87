#pragma once

#include <optional>
#include <string>
#include <vector>

#include "retrialq/analytic.hpp"
#include "retrialq/config.hpp"

namespace retrialq {

// StableSufficient: both sufficient conditions hold. NotGuaranteed: the
// rate condition fails (which proves instability only in the Markovian
// case). Infeasible6: P(interarrival > service) = 0, the system cannot
// empty. Undecided: a simulation confidence interval straddles the
// boundary.
enum class Verdict { StableSufficient, NotGuaranteed, Infeasible6, Undecided };

std::string verdict_name(Verdict v);

// Loss probability fed into the condition, either an exact formula value
// or a simulation estimate with its confidence interval.
struct PlossInput {
    double point = 0.0;
    std::optional<double> ci_lo;
    std::optional<double> ci_hi;
    std::string source; // formula name, or "simulation"
};

struct StabilityReport {
    bool condition6 = false;
    double lhs = 0.0; // (lambda + mu0) * P_loss
    double rhs = 0.0; // mu0
    double delta0 = 0.0; // 1 - lhs/rhs, lower bound on orbit-empty fraction
    Verdict verdict = Verdict::NotGuaranteed;
    std::string ploss_source;
    bool markovian_exact = false; // Markovian case: the boundary is exact
    std::optional<double> lhs_lo, lhs_hi; // propagated CI when simulated
};

StabilityReport evaluate(const SystemConfig& config, const PlossInput& ploss);

// g(mu0) = (lambda + mu0) P_loss(lambda + mu0) - mu0; negative inside the
// stability region. Requires a dispatchable (closed-form) family.
double stability_gap(const SystemConfig& config, double mu0);

struct BoundaryEndpoint {
    double mu0 = 0.0;
    bool refined = false; // true: bisected root with |g| <= tol; false: range bound
};

struct StabilityInterval {
    BoundaryEndpoint lo, hi;
};

struct BoundaryScan {
    std::vector<StabilityInterval> intervals; // subset of the range where g < 0
    std::vector<std::pair<double, double>> curve; // (mu0, g) grid samples
    std::vector<std::string> warnings; // brackets that failed to refine
};

// Log-spaced grid scan over [mu0_lo, mu0_hi], sign changes bisected to
// |g| <= tol. The stability set is not assumed to be one interval.
BoundaryScan stability_intervals_mu0(const SystemConfig& config, double mu0_lo,
                                     double mu0_hi, int grid_points = 256,
                                     double tol = 1e-8);

} // namespace retrialq
