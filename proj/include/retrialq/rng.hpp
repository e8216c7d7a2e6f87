#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace retrialq {

// Reproducibility contract: every draw is derived from std::mt19937_64
// (whose output sequence is fixed by the C++ standard) through the
// transforms below. Standard-library distribution objects are avoided
// because their algorithms are implementation-defined; with the explicit
// ldexp/log transforms an identical (seed, call sequence) pair produces
// identical draws on every platform.

// Stream identities for the stochastic sources of one replication.
// Distinct tags decorrelate the substreams so changing one source's law
// never perturbs another source's draws.
enum class StreamId : std::uint64_t {
    Arrivals = 1,   // renewal interarrival times of the lambda stream
    Poisson = 2,    // extra Poisson arrivals (auxiliary mode)
    Services = 3,   // service durations
    Retrials = 4,   // exponential retrial clock (original mode)
    Scratch = 5,    // free-standing draws outside the simulator
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// One substream. Owned by exactly one replication; not thread-safe.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, StreamId id)
        : engine_(splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(id))) {}

    explicit RandomStream(std::uint64_t seed) : RandomStream(seed, StreamId::Scratch) {}

    // uniform on [0, 1): top 53 bits of the engine output
    double uniform() {
        return std::ldexp(static_cast<double>(engine_() >> 11), -53);
    }

    // Exp(rate) via inversion; -log1p(-u) maps u in [0,1) to [0, inf)
    double exponential(double rate) {
        return -std::log1p(-uniform()) / rate;
    }

private:
    std::mt19937_64 engine_;
};

} // namespace retrialq
