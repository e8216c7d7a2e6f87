#include "retrialq/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "retrialq/errors.hpp"

namespace retrialq {

namespace {

void check_rates(double total_rate, double service_rate) {
    if (!(total_rate > 0.0) || !std::isfinite(total_rate))
        throw NonPositiveRate("total arrival rate must be > 0");
    if (!(service_rate > 0.0) || !std::isfinite(service_rate))
        throw NonPositiveRate("service rate must be > 0");
}

} // namespace

double ploss_mmck(double total_rate, double service_rate, int c, int K) {
    check_rates(total_rate, service_rate);
    if (c < 1 || K < c) throw InvalidDimensions("need 1 <= c <= K");

    const double a = total_rate / service_rate;
    // Unnormalized weights w_n = a^n/n! (n<=c), extended geometrically
    // past c. Renormalize on the fly instead of using factorials so that
    // large c, K stay in range; only the ratio w_K / sum survives.
    double w = 1.0, sum = 1.0;
    for (int n = 1; n <= K; ++n) {
        w *= a / std::min(n, c);
        sum += w;
        if (sum > 1e280) {
            w *= 1e-280;
            sum *= 1e-280;
        }
    }
    return w / sum;
}

double ploss_mm1k(double total_rate, double service_rate, int K) {
    check_rates(total_rate, service_rate);
    if (K < 1) throw InvalidDimensions("need K >= 1");

    const double rho = total_rate / service_rate;
    double p = 1.0, sum = 1.0;
    for (int n = 1; n <= K; ++n) {
        p *= rho;
        sum += p;
        if (sum > 1e280) {
            p *= 1e-280;
            sum *= 1e-280;
        }
    }
    return p / sum;
}

double erlang_b(double offered_load, int c) {
    if (!(offered_load > 0.0) || !std::isfinite(offered_load))
        throw NonPositiveLoad("offered load must be > 0");
    if (c < 1) throw InvalidDimensions("need c >= 1");

    double b = 1.0;
    for (int j = 1; j <= c; ++j)
        b = offered_load * b / (j + offered_load * b);
    return b;
}

double ploss_md1k(double total_rate, double service_time, int K) {
    if (!(total_rate > 0.0) || !std::isfinite(total_rate))
        throw NonPositiveRate("total arrival rate must be > 0");
    if (!(service_time > 0.0) || !std::isfinite(service_time))
        throw NonPositiveRate("service time must be > 0");
    if (K < 1) throw InvalidK("need K >= 1");

    const long double rho = static_cast<long double>(total_rate) * service_time;

    // terms of the alternating sum; 0^0 = 1 covers n = K-1 and K = 1
    std::vector<long double> terms(K);
    long double rho_pow = 1.0L, fact = 1.0L;
    for (int n = 0; n <= K - 1; ++n) {
        if (n > 0) {
            rho_pow *= rho;
            fact *= n;
        }
        const int m = K - 1 - n;
        const long double base = (n == 0) ? 1.0L : std::pow(static_cast<long double>(m), n);
        const long double sign = (n % 2 == 0) ? 1.0L : -1.0L;
        terms[n] = sign * base * rho_pow * std::exp(m * rho) / fact;
    }

    // Per-term first-order rounding: pow contributes ~n ulps, the exp
    // argument m*rho contributes ~m*rho ulps of the result.
    constexpr long double eps = std::numeric_limits<long double>::epsilon();
    long double err_b = 0.0L;
    for (int n = 0; n <= K - 1; ++n)
        err_b += std::fabs(terms[n]) * (4.0L + n + (K - 1 - n) * rho) * eps;

    // Neumaier-compensated sum, largest magnitude first.
    std::sort(terms.begin(), terms.end(), [](long double x, long double y) {
        return std::fabs(x) > std::fabs(y);
    });
    long double sum = 0.0L, comp = 0.0L;
    for (long double t : terms) {
        const long double s = sum + t;
        if (std::fabs(sum) >= std::fabs(t))
            comp += (sum - s) + t;
        else
            comp += (t - s) + sum;
        sum = s;
    }
    const long double b = sum + comp;
    if (!(b > 0.0L) || !std::isfinite(static_cast<double>(b)))
        throw NumericalInstability(
            "ploss_md1k: alternating sum cancels beyond working precision");
    const long double denom = 1.0L + rho * b;
    const long double ploss = (1.0L + (rho - 1.0L) * b) / denom;
    const long double err_p = (err_b + eps * (1.0L + std::fabs(rho - 1.0L) * b)) / (denom * denom);
    if (!(ploss > 0.0L) || ploss >= 1.0L || err_p > 1e-8L * ploss)
        throw NumericalInstability(
            "ploss_md1k: cancellation leaves fewer than 8 trustworthy digits of P_loss");

    return static_cast<double>(ploss);
}

std::optional<PlossValue> ploss_dispatch(const SystemConfig& config) {
    config.validate();
    if (config.interarrival.kind() != DistKind::Exponential)
        return std::nullopt; // renewal (non-Poisson) input: no closed form

    const double total = config.total_rate();
    if (config.service.kind() == DistKind::Exponential)
        return PlossValue{ploss_mmck(total, config.service.rate(), config.servers,
                                     config.capacity),
                          "mmck"};
    if (config.capacity == config.servers) // pure loss system: insensitive
        return PlossValue{erlang_b(total * config.service.mean(), config.servers),
                          "erlang_b"};
    if (config.service.kind() == DistKind::Deterministic && config.servers == 1)
        return PlossValue{ploss_md1k(total, config.service.value(), config.capacity),
                          "md1k"};
    return std::nullopt;
}

} // namespace retrialq
