#include "retrialq/regen.hpp"

#include <cmath>
#include <vector>

#include "retrialq/errors.hpp"

namespace retrialq {

double cycle_field(const CycleRecord& rec, CycleField field) {
    switch (field) {
    case CycleField::Duration: return rec.duration;
    case CycleField::Interarrivals: return static_cast<double>(rec.interarrivals);
    case CycleField::Arrivals: return static_cast<double>(rec.arrivals);
    case CycleField::Rejections: return static_cast<double>(rec.rejections);
    case CycleField::OrbitEmptyTime: return rec.orbit_empty_time;
    case CycleField::MaxOrbit: return static_cast<double>(rec.max_orbit);
    }
    return 0.0; // unreachable
}

CycleField cycle_field_from_name(std::string_view name) {
    if (name == "duration") return CycleField::Duration;
    if (name == "interarrivals") return CycleField::Interarrivals;
    if (name == "arrivals") return CycleField::Arrivals;
    if (name == "rejections") return CycleField::Rejections;
    if (name == "orbit_empty_time") return CycleField::OrbitEmptyTime;
    if (name == "max_orbit") return CycleField::MaxOrbit;
    throw ConfigError("unknown cycle field: " + std::string(name));
}

RatioEstimate ratio_estimate(std::span<const double> numerators,
                             std::span<const double> denominators, double level) {
    if (numerators.size() != denominators.size())
        throw ConfigError("ratio_estimate: numerator/denominator length mismatch");
    if (!(level > 0.0 && level < 1.0))
        throw ConfigError("ratio_estimate: level must be in (0,1)");
    const std::size_t n = numerators.size();
    if (n < 2) throw TooFewCycles("ratio_estimate needs at least 2 cycles");

    double num_sum = 0.0, den_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num_sum += numerators[i];
        den_sum += denominators[i];
    }
    if (!(den_sum > 0.0)) throw ZeroDenominator("ratio_estimate: denominator sum is not positive");

    const double point = num_sum / den_sum;
    const double den_mean = den_sum / static_cast<double>(n);

    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = numerators[i] - point * denominators[i];
        ss += r * r; // residuals have zero mean by construction of `point`
    }
    const double s = std::sqrt(ss / static_cast<double>(n - 1));
    const double z = normal_quantile(0.5 * (1.0 + level));
    const double half = z * s / (den_mean * std::sqrt(static_cast<double>(n)));

    RatioEstimate est;
    est.point = point;
    est.ci_lo = point - half;
    est.ci_hi = point + half;
    est.level = level;
    est.n_cycles = static_cast<long long>(n);
    est.numerator_mean = num_sum / static_cast<double>(n);
    est.denominator_mean = den_mean;
    return est;
}

RatioEstimate ratio_estimate(std::span<const CycleRecord> cycles, CycleField numerator,
                             CycleField denominator, double level) {
    std::vector<double> num(cycles.size()), den(cycles.size());
    for (std::size_t i = 0; i < cycles.size(); ++i) {
        num[i] = cycle_field(cycles[i], numerator);
        den[i] = cycle_field(cycles[i], denominator);
    }
    return ratio_estimate(num, den, level);
}

RatioEstimate mean_cycle(std::span<const CycleRecord> cycles, CycleField field, double level) {
    std::vector<double> num(cycles.size());
    const std::vector<double> den(cycles.size(), 1.0);
    for (std::size_t i = 0; i < cycles.size(); ++i)
        num[i] = cycle_field(cycles[i], field);
    return ratio_estimate(num, den, level);
}

// Peter Acklam's inverse normal CDF approximation. The coefficient tables
// are the published ones; relative error < 1.15e-9 across (0,1).
double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw ConfigError("normal_quantile: p must be in (0,1)");

    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;
    constexpr double p_high = 1.0 - p_low;

    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= p_high) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    // One Halley refinement step pushes the error to near machine precision.
    const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
    const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
    x = x - u / (1.0 + 0.5 * x * u);
    return x;
}

} // namespace retrialq
