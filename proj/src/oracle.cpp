#include "retrialq/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "retrialq/errors.hpp"

namespace retrialq {

double bd_loss_solve(double offered_load, int c, int K) {
    if (!(offered_load > 0.0) || !std::isfinite(offered_load))
        throw NonPositiveLoad("offered load must be > 0");
    if (c < 1 || K < c) throw InvalidDimensions("need 1 <= c <= K");

    // log w_n = n ln a - ln n!            for n <= c
    //         = log w_c + (n-c) ln(a/c)   for n >  c
    const long double ln_a = std::log(static_cast<long double>(offered_load));
    const long double ln_ac = ln_a - std::log(static_cast<long double>(c));
    std::vector<long double> logw(K + 1);
    for (int n = 0; n <= K; ++n) {
        if (n <= c)
            logw[n] = n * ln_a - std::lgamma(static_cast<long double>(n) + 1.0L);
        else
            logw[n] = logw[c] + (n - c) * ln_ac;
    }
    const long double logmax = *std::max_element(logw.begin(), logw.end());

    // Neumaier summation of the rescaled weights.
    long double sum = 0.0L, comp = 0.0L;
    for (int n = 0; n <= K; ++n) {
        const long double t = std::exp(logw[n] - logmax);
        const long double s = sum + t;
        if (std::fabs(sum) >= std::fabs(t))
            comp += (sum - s) + t;
        else
            comp += (t - s) + sum;
        sum = s;
    }
    const long double total = sum + comp;
    return static_cast<double>(std::exp(logw[K] - logmax) / total);
}

CtmcModel build_retrial_ctmc(double lambda, double mu, double mu0, int c, int K, int nmax) {
    if (!(lambda > 0.0) || !(mu > 0.0) || !(mu0 > 0.0))
        throw NonPositiveRate("all rates must be > 0");
    if (c < 1 || K < c) throw InvalidDimensions("need 1 <= c <= K");
    if (nmax < 1) throw InvalidDimensions("need nmax >= 1");

    CtmcModel model;
    model.nmax = nmax;
    model.K = K;
    model.transitions.reserve(static_cast<std::size_t>(4) * model.num_states());
    for (int n = 0; n <= nmax; ++n) {
        for (int m = 0; m <= K; ++m) {
            const int s = model.index(n, m);
            if (m < K)
                model.transitions.push_back({s, model.index(n, m + 1), lambda});
            else if (n < nmax)
                model.transitions.push_back({s, model.index(n + 1, m), lambda});
            // else: arrival at the truncation corner is dropped
            if (m > 0)
                model.transitions.push_back({s, model.index(n, m - 1), mu * std::min(m, c)});
            if (n > 0 && m < K)
                model.transitions.push_back({s, model.index(n - 1, m + 1), mu0});
        }
    }
    return model;
}

StationaryResult stationary(const CtmcModel& model, double tol, long long max_iter) {
    if (!(tol > 0.0)) throw ConfigError("stationary: tol must be > 0");
    const int n_states = model.num_states();

    std::vector<double> out_rate(n_states, 0.0);
    // incoming transitions per state, CSR-style
    std::vector<int> in_count(n_states, 0);
    for (const auto& t : model.transitions) {
        out_rate[t.from] += t.rate;
        ++in_count[t.to];
    }
    std::vector<int> in_start(n_states + 1, 0);
    for (int j = 0; j < n_states; ++j) in_start[j + 1] = in_start[j] + in_count[j];
    std::vector<int> in_from(model.transitions.size());
    std::vector<double> in_rate(model.transitions.size());
    {
        std::vector<int> fill(in_start.begin(), in_start.end() - 1);
        for (const auto& t : model.transitions) {
            in_from[fill[t.to]] = t.from;
            in_rate[fill[t.to]] = t.rate;
            ++fill[t.to];
        }
    }

    std::vector<double> pi(n_states, 1.0 / n_states);
    auto residual_inf = [&] {
        double r = 0.0;
        for (int j = 0; j < n_states; ++j) {
            double inflow = 0.0;
            for (int k = in_start[j]; k < in_start[j + 1]; ++k)
                inflow += pi[in_from[k]] * in_rate[k];
            r = std::max(r, std::fabs(inflow - pi[j] * out_rate[j]));
        }
        return r;
    };

    StationaryResult res;
    double residual = residual_inf();
    long long sweep = 0;
    while (residual > tol && sweep < max_iter) {
        // Gauss-Seidel on the balance equations pi_j = inflow_j / outflow_j
        for (int j = 0; j < n_states; ++j) {
            double inflow = 0.0;
            for (int k = in_start[j]; k < in_start[j + 1]; ++k)
                inflow += pi[in_from[k]] * in_rate[k];
            if (out_rate[j] > 0.0) pi[j] = inflow / out_rate[j];
        }
        const double total = std::accumulate(pi.begin(), pi.end(), 0.0);
        for (double& x : pi) x /= total;
        ++sweep;
        residual = residual_inf();
    }

    res.pi = std::move(pi);
    res.residual = residual;
    res.iterations = sweep;
    res.converged = residual <= tol;
    for (int m = 0; m <= model.K; ++m)
        res.truncation_mass += res.pi[model.index(model.nmax, m)];
    return res;
}

OrbitDiagnostics orbit_diagnostics(const StationaryResult& result, const CtmcModel& model) {
    OrbitDiagnostics d;
    for (int n = 0; n <= model.nmax; ++n)
        for (int m = 0; m <= model.K; ++m)
            d.expected_orbit += static_cast<double>(n) * result.pi[model.index(n, m)];
    for (int m = 0; m <= model.K; ++m)
        d.p_orbit_empty += result.pi[model.index(0, m)];
    d.p_system_empty = result.pi[model.index(0, 0)];
    d.truncation_mass = result.truncation_mass;
    return d;
}

AdaptiveSolve solve_retrial_adaptive(double lambda, double mu, double mu0, int c, int K,
                                     double tol, double mass_tol, int initial_nmax,
                                     int max_nmax) {
    AdaptiveSolve best;
    int nmax = initial_nmax;
    for (;;) {
        best.model = build_retrial_ctmc(lambda, mu, mu0, c, K, nmax);
        best.result = stationary(best.model, tol);
        best.diagnostics = orbit_diagnostics(best.result, best.model);
        best.nmax_used = nmax;
        best.truncation_ok = best.result.truncation_mass < mass_tol;
        if (best.truncation_ok || nmax >= max_nmax) return best;
        nmax = std::min(2 * nmax, max_nmax);
    }
}

} // namespace retrialq
