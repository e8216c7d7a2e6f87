#pragma once

#include <optional>
#include <string>

#include "retrialq/config.hpp"

namespace retrialq {

// Stationary loss probability of the M/M/c/K queue at total arrival rate
// `total_rate`. Evaluated through the multiplicative birth-death weight
// recurrence (overflow-safe for c, K in the hundreds).
double ploss_mmck(double total_rate, double service_rate, int c, int K);

// Single-server special case, geometric closed form.
double ploss_mm1k(double total_rate, double service_rate, int K);

// Erlang-B blocking probability at offered load a = rate * mean service,
// via the stable recursion B_j = a B_{j-1} / (j + a B_{j-1}).
double erlang_b(double offered_load, int c);

// Loss probability of the M/D/1/K queue with deterministic service time
// `service_time`, via the alternating coefficient
//   b_{K-1} = sum_{n=0}^{K-1} (-1)^n/n! (K-1-n)^n rho^n e^{(K-1-n) rho}
// (0^0 = 1) and P_loss = 1 - b_{K-1} / (1 + rho b_{K-1}). Refuses with
// NumericalInstability when cancellation in the alternating sum would
// leave fewer than ~8 trustworthy digits.
double ploss_md1k(double total_rate, double service_time, int K);

struct PlossValue {
    double value;
    std::string formula; // "mmck", "mm1k", "erlang_b", "md1k"
};

// Routes a system to the matching closed form for the auxiliary loss
// queue at total rate lambda + mu0, or nullopt when no closed form
// applies (caller falls back to simulation of the auxiliary system).
std::optional<PlossValue> ploss_dispatch(const SystemConfig& config);

} // namespace retrialq
