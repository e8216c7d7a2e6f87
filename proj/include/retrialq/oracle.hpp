#pragma once

#include <vector>

namespace retrialq {

// Exact M/M/c/K loss probability through log-space birth-death weights
// and compensated summation in extended precision. Deliberately a
// different algebraic route than analytic::ploss_mmck so the two can
// cross-validate each other.
double bd_loss_solve(double offered_load, int c, int K);

// Sparse CTMC over states (n, m): orbit level n in [0, nmax], primary
// occupancy m in [0, K]. Failed retrial attempts would be self-loops and
// are omitted (they do not change the law); arrivals at the truncation
// corner (n = nmax, m = K) are dropped and show up as truncation mass.
struct CtmcModel {
    struct Transition {
        int from;
        int to;
        double rate;
    };

    int nmax = 0;
    int K = 0;
    std::vector<Transition> transitions;

    int num_states() const { return (nmax + 1) * (K + 1); }
    int index(int n, int m) const { return n * (K + 1) + m; }
    int orbit_of(int state) const { return state / (K + 1); }
    int occupancy_of(int state) const { return state % (K + 1); }
};

CtmcModel build_retrial_ctmc(double lambda, double mu, double mu0, int c, int K, int nmax);

struct StationaryResult {
    std::vector<double> pi;
    double residual = 0.0; // max_j |(pi Q)_j| at exit
    long long iterations = 0;
    bool converged = false;
    double truncation_mass = 0.0; // P(n = nmax)
};

// Solves pi Q = 0, sum(pi) = 1 by Gauss-Seidel sweeps over the embedded
// jump chain, renormalizing each sweep. On non-convergence the best
// iterate is returned with converged = false.
StationaryResult stationary(const CtmcModel& model, double tol = 1e-10,
                            long long max_iter = 200000);

struct OrbitDiagnostics {
    double expected_orbit = 0.0;
    double p_orbit_empty = 0.0;  // P(N = 0), stationary analogue of mu_o(t)/t
    double p_system_empty = 0.0; // pi(0, 0)
    double truncation_mass = 0.0;
};

OrbitDiagnostics orbit_diagnostics(const StationaryResult& result, const CtmcModel& model);

// Doubles nmax until the truncation mass falls below `mass_tol` or the
// level cap is hit (then truncation_ok = false: the orbit looks unbounded).
struct AdaptiveSolve {
    CtmcModel model;
    StationaryResult result;
    OrbitDiagnostics diagnostics;
    int nmax_used = 0;
    bool truncation_ok = false;
};

AdaptiveSolve solve_retrial_adaptive(double lambda, double mu, double mu0, int c, int K,
                                     double tol = 1e-10, double mass_tol = 1e-8,
                                     int initial_nmax = 32, int max_nmax = 1 << 14);

} // namespace retrialq
