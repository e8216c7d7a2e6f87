#pragma once

#include <vector>

#include "retrialq/rng.hpp"

namespace retrialq {

enum class DistKind {
    Exponential,
    Deterministic,
    Erlang,
    HyperExponential,
    Uniform,
};

struct SupportBounds {
    double inf;
    double sup; // +infinity for unbounded laws
};

// Parametric description of a nonnegative duration law. The family is a
// closed enumeration: exact means and support bounds are part of the
// contract, which rules out opaque user-supplied samplers.
//
// Admissibility (enforced at construction): all rates > 0, weights
// nonnegative and summing to 1 within 1e-12, lo <= hi, and mean > 0.
class DistributionSpec {
public:
    static DistributionSpec exponential(double rate);
    static DistributionSpec deterministic(double value);
    static DistributionSpec erlang(int shape, double rate);
    static DistributionSpec hyperexp(std::vector<double> weights, std::vector<double> rates);
    static DistributionSpec uniform(double lo, double hi);

    DistKind kind() const { return kind_; }

    double mean() const;
    SupportBounds support_bounds() const;
    double sample(RandomStream& rng) const;

    // parameter accessors; meaningful fields depend on kind()
    double rate() const { return rate_; }
    double value() const { return value_; }
    int shape() const { return shape_; }
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    const std::vector<double>& weights() const { return weights_; }
    const std::vector<double>& rates() const { return rates_; }

private:
    DistributionSpec() = default;

    DistKind kind_ = DistKind::Exponential;
    double rate_ = 0.0;
    double value_ = 0.0;
    int shape_ = 0;
    double lo_ = 0.0;
    double hi_ = 0.0;
    std::vector<double> weights_;
    std::vector<double> rates_;
};

// Condition for the primary queue to empty out with positive probability:
// P(interarrival > service) > 0, which for independent draws is equivalent
// to sup support(interarrival) > inf support(service), strictly.
bool condition6_holds(const DistributionSpec& interarrival, const DistributionSpec& service);

} // namespace retrialq
