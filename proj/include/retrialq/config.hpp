#pragma once

#include "retrialq/distribution.hpp"
#include "retrialq/errors.hpp"

namespace retrialq {

// Original: rejected jobs join the orbit and retry at constant rate mu0.
// Auxiliary: the primary queue is fed by the renewal stream plus an
// independent Poisson(mu0) stream; rejected jobs never return.
enum class Mode { Original, Auxiliary };

struct SystemConfig {
    DistributionSpec interarrival;
    DistributionSpec service;
    int servers = 1;          // c
    int capacity = 1;         // K, total places including the servers
    double retrial_rate = 1.0; // mu0
    Mode mode = Mode::Original;

    void validate() const {
        if (servers < 1) throw InvalidDimensions("servers must be >= 1");
        if (capacity < servers) throw InvalidDimensions("capacity must be >= servers");
        if (!(retrial_rate > 0.0)) throw NonPositiveRate("retrial_rate must be > 0");
    }

    int buffer_size() const { return capacity - servers; }
    double arrival_rate() const { return 1.0 / interarrival.mean(); }  // lambda
    double service_rate() const { return 1.0 / service.mean(); }       // mu
    double total_rate() const { return arrival_rate() + retrial_rate; } // lambda + mu0

    bool markovian() const {
        return interarrival.kind() == DistKind::Exponential &&
               service.kind() == DistKind::Exponential;
    }
};

} // namespace retrialq
