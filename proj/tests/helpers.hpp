#pragma once

// Test-only helpers: small statistics utilities and independent oracles.
// The oracles deliberately take different algebraic routes than the
// library code they validate.

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "retrialq/config.hpp"
#include "retrialq/regen.hpp"
#include "retrialq/simulation.hpp"

namespace testutil {

inline double mean(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double sample_sd(const std::vector<double>& v) {
    const double m = mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

inline double standard_error(const std::vector<double>& v) {
    return sample_sd(v) / std::sqrt(static_cast<double>(v.size()));
}

// Loss probability of the M/D/1/K queue by brute force on the chain
// embedded at departure epochs: no transform, no alternating series.
// q_n = jobs left behind by the n-th departure, q in [0, K-1].
// From q >= 1 a service starts at once and admits up to K-q of the
// Poisson(a) arrivals during it; from q = 0 an idle period ends with an
// arrival that enters service and up to K-1 more can be admitted.
inline double md1k_embedded_oracle(double arrival_rate, double service_time, int K) {
    const double a = arrival_rate * service_time;
    const int cutoff = static_cast<int>(a + 12.0 * std::sqrt(a + 1.0)) + K + 60;

    std::vector<double> pmf(cutoff + 1);
    pmf[0] = std::exp(-a);
    for (int j = 1; j <= cutoff; ++j) pmf[j] = pmf[j - 1] * a / j;

    auto tail_at_least = [&](int c) {
        double s = 0.0;
        for (int j = c; j <= cutoff; ++j) s += pmf[j];
        return s;
    };
    auto expected_excess = [&](int c) { // E[(A - c)^+]
        double s = 0.0;
        for (int j = c + 1; j <= cutoff; ++j) s += (j - c) * pmf[j];
        return s;
    };

    // row-stochastic transition matrix over q = 0..K-1
    const int n = K;
    std::vector<std::vector<double>> P(n, std::vector<double>(n, 0.0));
    for (int q = 0; q < n; ++q) {
        const int admit_cap = (q == 0) ? K - 1 : K - q;
        const int base = (q == 0) ? 0 : q - 1;
        for (int j = 0; j < admit_cap; ++j) P[q][base + j] += pmf[j];
        P[q][base + admit_cap] += tail_at_least(admit_cap);
    }

    std::vector<double> pi(n, 1.0 / n), next(n);
    for (int it = 0; it < 1000000; ++it) {
        std::fill(next.begin(), next.end(), 0.0);
        for (int q = 0; q < n; ++q)
            for (int j = 0; j < n; ++j) next[j] += pi[q] * P[q][j];
        double diff = 0.0;
        for (int j = 0; j < n; ++j) diff += std::fabs(next[j] - pi[j]);
        pi.swap(next);
        if (diff < 1e-15) break;
    }

    double lost = 0.0, arrived = 0.0;
    for (int q = 0; q < n; ++q) {
        const int admit_cap = (q == 0) ? K - 1 : K - q;
        const double extra = (q == 0) ? 1.0 : 0.0; // the arrival ending the idle period
        lost += pi[q] * expected_excess(admit_cap);
        arrived += pi[q] * (extra + a);
    }
    return lost / arrived;
}

// Loss estimate from an auxiliary-mode run (the estimator's natural use).
inline retrialq::RatioEstimate aux_loss_estimate(retrialq::SystemConfig config,
                                                 long long cycles, std::uint64_t seed,
                                                 double level = 0.95) {
    config.mode = retrialq::Mode::Auxiliary;
    retrialq::StopRule stop;
    stop.cycles = cycles;
    const auto out = retrialq::simulate(config, stop, seed);
    return retrialq::ratio_estimate(retrialq::stationary_cycles(out),
                                    retrialq::CycleField::Rejections,
                                    retrialq::CycleField::Arrivals, level);
}

inline retrialq::SystemConfig mmck_config(double lambda, double mu, double mu0, int c, int K,
                                          retrialq::Mode mode = retrialq::Mode::Original) {
    return {retrialq::DistributionSpec::exponential(lambda),
            retrialq::DistributionSpec::exponential(mu),
            c,
            K,
            mu0,
            mode};
}

} // namespace testutil
