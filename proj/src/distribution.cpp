#include "retrialq/distribution.hpp"

#include <cmath>
#include <limits>

#include "retrialq/errors.hpp"

namespace retrialq {

namespace {

constexpr double kWeightSumTol = 1e-12;

void require(bool ok, const char* msg) {
    if (!ok) throw ConfigError(msg);
}

} // namespace

DistributionSpec DistributionSpec::exponential(double rate) {
    require(std::isfinite(rate) && rate > 0.0, "exponential: rate must be > 0");
    DistributionSpec s;
    s.kind_ = DistKind::Exponential;
    s.rate_ = rate;
    return s;
}

DistributionSpec DistributionSpec::deterministic(double value) {
    require(std::isfinite(value) && value >= 0.0, "deterministic: value must be >= 0");
    require(value > 0.0, "deterministic: mean must be > 0");
    DistributionSpec s;
    s.kind_ = DistKind::Deterministic;
    s.value_ = value;
    return s;
}

DistributionSpec DistributionSpec::erlang(int shape, double rate) {
    require(shape >= 1, "erlang: shape must be a positive integer");
    require(std::isfinite(rate) && rate > 0.0, "erlang: rate must be > 0");
    DistributionSpec s;
    s.kind_ = DistKind::Erlang;
    s.shape_ = shape;
    s.rate_ = rate;
    return s;
}

DistributionSpec DistributionSpec::hyperexp(std::vector<double> weights, std::vector<double> rates) {
    require(!weights.empty(), "hyperexp: needs at least one component");
    require(weights.size() == rates.size(), "hyperexp: weights and rates must have the same length");
    double wsum = 0.0;
    for (double w : weights) {
        require(std::isfinite(w) && w >= 0.0, "hyperexp: weights must be nonnegative");
        wsum += w;
    }
    require(std::fabs(wsum - 1.0) <= kWeightSumTol, "hyperexp: weights must sum to 1");
    for (double r : rates)
        require(std::isfinite(r) && r > 0.0, "hyperexp: rates must be > 0");
    DistributionSpec s;
    s.kind_ = DistKind::HyperExponential;
    s.weights_ = std::move(weights);
    s.rates_ = std::move(rates);
    return s;
}

DistributionSpec DistributionSpec::uniform(double lo, double hi) {
    require(std::isfinite(lo) && std::isfinite(hi), "uniform: bounds must be finite");
    require(lo >= 0.0, "uniform: lo must be >= 0");
    require(lo <= hi, "uniform: lo must be <= hi");
    require(lo + hi > 0.0, "uniform: mean must be > 0");
    DistributionSpec s;
    s.kind_ = DistKind::Uniform;
    s.lo_ = lo;
    s.hi_ = hi;
    return s;
}

double DistributionSpec::mean() const {
    switch (kind_) {
    case DistKind::Exponential:
        return 1.0 / rate_;
    case DistKind::Deterministic:
        return value_;
    case DistKind::Erlang:
        return static_cast<double>(shape_) / rate_;
    case DistKind::HyperExponential: {
        double m = 0.0;
        for (std::size_t i = 0; i < weights_.size(); ++i)
            m += weights_[i] / rates_[i];
        return m;
    }
    case DistKind::Uniform:
        return 0.5 * (lo_ + hi_);
    }
    return 0.0; // unreachable
}

SupportBounds DistributionSpec::support_bounds() const {
    const double inf = std::numeric_limits<double>::infinity();
    switch (kind_) {
    case DistKind::Exponential:
    case DistKind::Erlang:
    case DistKind::HyperExponential:
        return {0.0, inf};
    case DistKind::Deterministic:
        return {value_, value_};
    case DistKind::Uniform:
        return {lo_, hi_};
    }
    return {0.0, inf}; // unreachable
}

double DistributionSpec::sample(RandomStream& rng) const {
    switch (kind_) {
    case DistKind::Exponential:
        return rng.exponential(rate_);
    case DistKind::Deterministic:
        return value_;
    case DistKind::Erlang: {
        double sum = 0.0;
        for (int i = 0; i < shape_; ++i)
            sum += rng.exponential(rate_);
        return sum;
    }
    case DistKind::HyperExponential: {
        const double u = rng.uniform();
        double cum = 0.0;
        std::size_t pick = weights_.size() - 1;
        for (std::size_t i = 0; i < weights_.size(); ++i) {
            cum += weights_[i];
            if (u < cum) {
                pick = i;
                break;
            }
        }
        return rng.exponential(rates_[pick]);
    }
    case DistKind::Uniform:
        return lo_ + rng.uniform() * (hi_ - lo_);
    }
    return 0.0; // unreachable
}

bool condition6_holds(const DistributionSpec& interarrival, const DistributionSpec& service) {
    return interarrival.support_bounds().sup > service.support_bounds().inf;
}

} // namespace retrialq
