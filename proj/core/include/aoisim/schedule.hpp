#pragma once

#include <cstdint>
#include <functional>
#include <mutex>
#include <vector>

namespace aoisim {

enum class Regime { harmonic, power };

/// Returns q = (1 + min{2,p}) / 2, valid whenever p > 1.
double choose_q(double p);

/// Decreasing stepsize sequence a(n), n >= 1. The regime must match the
/// delay moment order it targets: harmonic a/n for p in (0,1], power
/// a*n^(-1/q) with 1 < q < min{2,p} for p > 1. A custom sequence may be
/// attached via tagged(); it is validated against its declared reference
/// class (a(n) <= 2*reference(n) over the first 1e4 indices).
class StepSchedule {
public:
    static StepSchedule harmonic(double a, double p_assumed);
    static StepSchedule power(double a, double p_assumed);  // q = choose_q(p)
    static StepSchedule power_with_q(double a, double q, double p_assumed);
    static StepSchedule tagged(std::function<double(std::int64_t)> fn, const StepSchedule& reference);

    double operator()(std::int64_t n) const;

    Regime regime() const { return regime_; }
    double scale() const { return a_; }
    double q() const { return q_; }
    double p_assumed() const { return p_; }

private:
    StepSchedule() = default;
    Regime regime_ = Regime::harmonic;
    double a_ = 1.0;
    double q_ = 0.0;
    double p_ = 1.0;
    std::function<double(std::int64_t)> custom_;
};

struct SegmentBounds {
    double t_start;        // T_m
    double t_end;          // T_{m+1}
    std::int64_t n_start;  // n(m)
    std::int64_t n_end;    // n(m+1)
};

/// Continuous time axis induced by a schedule: t(0) = 0 and
/// t(n) = sum_{i=1}^{n-1} a(i), plus the segmentation of [0,inf) into
/// pieces [T_m, T_{m+1}) of length at least T with boundaries on the grid,
///   T_0 = 0,  T_{m+1} = min{ t(n) : t(n) >= T_m + T }.
/// Prefix sums and segment boundaries are cached; the caches only grow and
/// extension is serialized, so concurrent readers are safe.
class TimeAxis {
public:
    TimeAxis(StepSchedule schedule, double segment_length);

    double time_instant(std::int64_t n) const;  // t(n), n >= 0
    double stepsize(std::int64_t n) const { return sched_(n); }

    /// sum_{k=n-tau}^{n-1} a(k) with the lower limit clamped at 1;
    /// tau = 0 gives the empty sum 0.
    double window_sum(std::int64_t n, std::int64_t tau) const;

    std::int64_t segment_index(std::int64_t n) const;  // m(n): largest m with T_m <= t(n)
    SegmentBounds segment_bounds(std::int64_t m) const;

    double segment_length() const { return T_; }
    const StepSchedule& schedule() const { return sched_; }

private:
    void ensure_time(std::int64_t n) const;      // caller holds mu_
    void ensure_segments(std::int64_t m) const;  // caller holds mu_

    StepSchedule sched_;
    double T_;
    mutable std::mutex mu_;
    mutable std::vector<double> t_;        // t_[n] = t(n)
    mutable long double acc_ = 0.0L;       // high-precision running sum
    mutable std::vector<std::int64_t> nm_; // nm_[m] = n(m); T_m = t(n(m))
};

}  // namespace aoisim
