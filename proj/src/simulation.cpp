#include "retrialq/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace retrialq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Simultaneous events are resolved in this fixed order (a completion that
// frees a server is seen by an arrival at the same instant).
enum class Event { Completion, Retrial, Arrival, Poisson };

struct CycleTallies {
    long long lambda_arrivals = 0;
    long long attempts = 0;
    long long rejections = 0;
    long long admissions = 0;
    long long completions = 0;
    long long orbit_joins = 0;
    long long retrial_successes = 0;
    double orbit_empty_time = 0.0;
    long long max_orbit = 0;

    void reset(long long current_orbit) {
        *this = CycleTallies{};
        max_orbit = current_orbit;
    }
};

class Simulator {
public:
    Simulator(const SystemConfig& config, const StopRule& stop, std::uint64_t seed,
              const SimOptions& options)
        : cfg_(config), stop_(stop), opt_(options),
          arrivals_rng_(seed, StreamId::Arrivals),
          poisson_rng_(seed, StreamId::Poisson),
          services_rng_(seed, StreamId::Services),
          retrials_rng_(seed, StreamId::Retrials) {
        cfg_.validate();
        stop_.validate();
        out_.seed = seed;
        out_.first_cycle_delayed = !opt_.initial.empty();
        if (opt_.initial.orbit < 0)
            throw ConfigError("initial orbit must be >= 0");

        orbit_ = opt_.initial.orbit;
        if (opt_.initial.busy_full) {
            for (int i = 0; i < cfg_.servers; ++i)
                push_completion(cfg_.service.sample(services_rng_));
        }
        if (cfg_.mode == Mode::Original && orbit_ > 0)
            retrial_deadline_ = cfg_.retrial_rate > 0.0
                                    ? retrials_rng_.exponential(cfg_.retrial_rate)
                                    : kInf;
        // Zero-delayed start: the first arrival lands at t=0 and opens the
        // first cycle. From a non-empty state the first arrival is a fresh
        // draw and the stretch up to the first regeneration is recorded as
        // the delayed cycle.
        next_arrival_ = opt_.initial.empty() ? 0.0 : cfg_.interarrival.sample(arrivals_rng_);
        if (cfg_.mode == Mode::Auxiliary)
            next_poisson_ = poisson_rng_.exponential(cfg_.retrial_rate);
        cycle_.reset(orbit_);
    }

    SimOutput run() {
        const auto t0 = std::chrono::steady_clock::now();
        for (;;) {
            double tc = busy_.empty() ? kInf : busy_.front();
            double tr = retrial_deadline_;
            double ta = next_arrival_;
            double tp = next_poisson_;
            double tmin = std::min(std::min(tc, tr), std::min(ta, tp));

            if (stop_.horizon && tmin >= *stop_.horizon) {
                advance_to(*stop_.horizon);
                finish_with_tail();
                break;
            }
            advance_to(tmin);
            ++out_.event_count;

            if (tc == tmin) {
                on_completion();
            } else if (tr == tmin) {
                on_retrial();
            } else if (ta == tmin) {
                if (on_arrival()) break; // cycle target reached
            } else {
                on_poisson();
            }
            if (opt_.audit) check_invariants();
        }
        finalize_stats();
        out_.wall_time_sec =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return std::move(out_);
    }

private:
    void advance_to(double t) {
        const double dt = t - clock_;
        out_.totals.orbit_time_integral += static_cast<double>(orbit_) * dt;
        if (orbit_ == 0) {
            out_.totals.orbit_empty_time += dt;
            cycle_.orbit_empty_time += dt;
        }
        clock_ = t;
    }

    void push_completion(double service_time) {
        busy_.push_back(clock_ + service_time);
        std::push_heap(busy_.begin(), busy_.end(), std::greater<>{});
    }

    void pop_completion() {
        std::pop_heap(busy_.begin(), busy_.end(), std::greater<>{});
        busy_.pop_back();
    }

    void redraw_retrial_clock() {
        retrial_deadline_ = clock_ + retrials_rng_.exponential(cfg_.retrial_rate);
    }

    void note_orbit_join() {
        ++orbit_;
        ++cycle_.orbit_joins;
        cycle_.max_orbit = std::max(cycle_.max_orbit, orbit_);
        if (cfg_.mode == Mode::Original && orbit_ == 1)
            redraw_retrial_clock();
    }

    // One admission attempt at the primary queue; shared by all sources.
    void attempt_admission(bool from_orbit) {
        ++out_.totals.attempts;
        ++cycle_.attempts;
        const bool server_free = static_cast<int>(busy_.size()) < cfg_.servers;
        const bool buffer_free = buffer_ < cfg_.buffer_size();
        if (server_free || buffer_free) {
            if (server_free)
                push_completion(cfg_.service.sample(services_rng_));
            else
                ++buffer_;
            ++out_.totals.admissions;
            ++cycle_.admissions;
            if (from_orbit) {
                --orbit_;
                ++cycle_.retrial_successes;
                if (orbit_ > 0)
                    redraw_retrial_clock();
                else
                    retrial_deadline_ = kInf;
            }
        } else {
            ++out_.totals.rejections;
            ++cycle_.rejections;
            if (from_orbit) {
                redraw_retrial_clock(); // attempt failed, customer stays in orbit
            } else {
                note_orbit_join(); // original: joins orbit; auxiliary: counter only
            }
        }
    }

    void on_completion() {
        pop_completion();
        ++out_.totals.completions;
        ++cycle_.completions;
        if (buffer_ > 0) {
            --buffer_;
            push_completion(cfg_.service.sample(services_rng_));
        }
    }

    void on_retrial() {
        ++out_.totals.retrial_attempts;
        attempt_admission(true);
    }

    void on_poisson() {
        ++out_.totals.poisson_arrivals;
        attempt_admission(false);
        next_poisson_ = clock_ + poisson_rng_.exponential(cfg_.retrial_rate);
    }

    // Returns true when the cycle target was reached at this regeneration.
    bool on_arrival() {
        const bool primary_empty = busy_.empty() && buffer_ == 0;
        const bool regen = primary_empty && (cfg_.mode == Mode::Auxiliary || orbit_ == 0);
        if (regen) {
            ++out_.regenerations;
            if (clock_ > cycle_start_) {
                close_cycle();
                if (stop_.cycles &&
                    static_cast<long long>(out_.completed_cycles.size()) == *stop_.cycles) {
                    horizon_end_ = clock_;
                    return true;
                }
            }
            cycle_.reset(orbit_);
            cycle_start_ = clock_;
        }
        ++out_.totals.lambda_arrivals;
        ++cycle_.lambda_arrivals;
        attempt_admission(false);
        next_arrival_ = clock_ + cfg_.interarrival.sample(arrivals_rng_);
        return false;
    }

    void close_cycle() {
        CycleRecord rec;
        rec.duration = clock_ - cycle_start_;
        rec.interarrivals = cycle_.lambda_arrivals;
        rec.arrivals = cycle_.attempts;
        rec.rejections = cycle_.rejections;
        rec.orbit_empty_time = cycle_.orbit_empty_time;
        rec.max_orbit = cycle_.max_orbit;
        if (opt_.audit)
            check_cycle_conservation();
        out_.completed_cycles.push_back(rec);
    }

    void finish_with_tail() {
        horizon_end_ = clock_;
        if (clock_ > cycle_start_) {
            CycleRecord tail;
            tail.duration = clock_ - cycle_start_;
            tail.interarrivals = cycle_.lambda_arrivals;
            tail.arrivals = cycle_.attempts;
            tail.rejections = cycle_.rejections;
            tail.orbit_empty_time = cycle_.orbit_empty_time;
            tail.max_orbit = cycle_.max_orbit;
            out_.truncated_tail = tail;
            out_.has_truncated_tail = true;
        }
    }

    void finalize_stats() {
        out_.horizon_used = horizon_end_;
        if (horizon_end_ > 0.0) {
            out_.path_stats.time_avg_orbit = out_.totals.orbit_time_integral / horizon_end_;
            out_.path_stats.orbit_empty_fraction = out_.totals.orbit_empty_time / horizon_end_;
        }
        out_.path_stats.loss_ratio =
            out_.totals.attempts > 0
                ? static_cast<double>(out_.totals.rejections) / static_cast<double>(out_.totals.attempts)
                : 0.0;
    }

    [[noreturn]] void audit_fail(const char* what) const {
        throw std::logic_error(std::string("simulator invariant violated: ") + what);
    }

    void check_invariants() const {
        if (static_cast<int>(busy_.size()) > cfg_.servers) audit_fail("busy > servers");
        if (buffer_ < 0 || buffer_ > cfg_.buffer_size()) audit_fail("buffer out of range");
        if (orbit_ < 0) audit_fail("negative orbit");
        if (buffer_ > 0 && static_cast<int>(busy_.size()) != cfg_.servers)
            audit_fail("waiting job while a server is idle");
        if (cfg_.mode == Mode::Original) {
            const bool clock_armed = retrial_deadline_ < kInf;
            if (clock_armed != (orbit_ > 0)) audit_fail("retrial clock vs orbit mismatch");
        } else if (retrial_deadline_ < kInf) {
            audit_fail("retrial clock armed in auxiliary mode");
        }
        if (out_.totals.rejections > out_.totals.attempts) audit_fail("rejections > attempts");
        double residual = 0.0;
        for (double t : busy_) {
            if (t < clock_) audit_fail("completion time in the past");
            residual += t - clock_;
        }
        if (residual < 0.0) audit_fail("negative residual work");
    }

    void check_cycle_conservation() const {
        if (cycle_.attempts != cycle_.rejections + cycle_.admissions)
            audit_fail("attempts != rejections + admissions");
        const bool is_delayed_prefix = out_.first_cycle_delayed && out_.completed_cycles.empty();
        if (!is_delayed_prefix) {
            if (cycle_.admissions != cycle_.completions)
                audit_fail("admissions != completions over a closed cycle");
            if (cfg_.mode == Mode::Original &&
                cycle_.orbit_joins != cycle_.retrial_successes)
                audit_fail("orbit joins != retrial successes over a closed cycle");
        }
    }

    SystemConfig cfg_;
    StopRule stop_;
    SimOptions opt_;
    RandomStream arrivals_rng_, poisson_rng_, services_rng_, retrials_rng_;

    double clock_ = 0.0;
    std::vector<double> busy_; // min-heap of absolute completion times
    int buffer_ = 0;           // nu
    long long orbit_ = 0;      // N (counter of past rejections in auxiliary mode)
    double next_arrival_ = kInf;
    double next_poisson_ = kInf;
    double retrial_deadline_ = kInf;

    CycleTallies cycle_;
    double cycle_start_ = 0.0;
    double horizon_end_ = 0.0;
    SimOutput out_;
};

} // namespace

SimOutput simulate(const SystemConfig& config, const StopRule& stop, std::uint64_t seed,
                   const SimOptions& options) {
    return Simulator(config, stop, seed, options).run();
}

double orbit_empty_fraction(const SimOutput& output) {
    if (!(output.horizon_used > 0.0))
        throw NonPositiveHorizon("orbit_empty_fraction needs a positive horizon");
    return output.totals.orbit_empty_time / output.horizon_used;
}

std::span<const CycleRecord> stationary_cycles(const SimOutput& output) {
    std::span<const CycleRecord> all(output.completed_cycles);
    if (output.first_cycle_delayed && !all.empty())
        return all.subspan(1);
    return all;
}

} // namespace retrialq
