#pragma once

#include <span>
#include <string_view>

#include "retrialq/simulation.hpp"

namespace retrialq {

// Classical regenerative ratio estimate p = sum(num) / sum(den) with a
// normal-theory interval built from the per-cycle residuals num_i - p*den_i.
struct RatioEstimate {
    double point = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double level = 0.95;
    long long n_cycles = 0;
    double numerator_mean = 0.0;
    double denominator_mean = 0.0;

    double half_width() const { return 0.5 * (ci_hi - ci_lo); }
    bool covers(double x) const { return ci_lo <= x && x <= ci_hi; }
};

enum class CycleField {
    Duration,
    Interarrivals,
    Arrivals,
    Rejections,
    OrbitEmptyTime,
    MaxOrbit,
};

double cycle_field(const CycleRecord& rec, CycleField field);
CycleField cycle_field_from_name(std::string_view name);

RatioEstimate ratio_estimate(std::span<const double> numerators,
                             std::span<const double> denominators, double level = 0.95);
RatioEstimate ratio_estimate(std::span<const CycleRecord> cycles, CycleField numerator,
                             CycleField denominator, double level = 0.95);

// Mean of one field per cycle (ratio estimate with unit denominator).
RatioEstimate mean_cycle(std::span<const CycleRecord> cycles, CycleField field,
                         double level = 0.95);

// Inverse standard normal CDF, Acklam's rational approximation
// (relative error < 1.15e-9 over (0,1)).
double normal_quantile(double p);

} // namespace retrialq
