#include "aoisim/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace aoisim {

double choose_q(double p) {
    if (!(p > 1.0))
        throw std::invalid_argument("choose_q requires p > 1 (harmonic regime is mandatory for p <= 1)");
    return (1.0 + std::min(2.0, p)) / 2.0;
}

StepSchedule StepSchedule::harmonic(double a, double p_assumed) {
    if (!(a > 0.0)) throw std::invalid_argument("stepsize scale a must be positive");
    if (!(p_assumed > 0.0 && p_assumed <= 1.0))
        throw std::invalid_argument("harmonic regime requires p in (0,1], got p=" + std::to_string(p_assumed));
    StepSchedule s;
    s.regime_ = Regime::harmonic;
    s.a_ = a;
    s.p_ = p_assumed;
    return s;
}

StepSchedule StepSchedule::power(double a, double p_assumed) {
    return power_with_q(a, choose_q(p_assumed), p_assumed);
}

StepSchedule StepSchedule::power_with_q(double a, double q, double p_assumed) {
    if (!(a > 0.0)) throw std::invalid_argument("stepsize scale a must be positive");
    if (!(p_assumed > 1.0))
        throw std::invalid_argument("power regime requires p > 1, got p=" + std::to_string(p_assumed));
    if (!(q > 1.0 && q < std::min(2.0, p_assumed)))
        throw std::invalid_argument("power regime requires 1 < q < min{2,p}, got q=" + std::to_string(q) +
                                    " with p=" + std::to_string(p_assumed));
    StepSchedule s;
    s.regime_ = Regime::power;
    s.a_ = a;
    s.q_ = q;
    s.p_ = p_assumed;
    return s;
}

StepSchedule StepSchedule::tagged(std::function<double(std::int64_t)> fn, const StepSchedule& reference) {
    if (!fn) throw std::invalid_argument("tagged schedule requires a callable");
    // only "not asymptotically larger" matters; spot-check the prefix
    for (std::int64_t n = 1; n <= 10000; ++n) {
        const double v = fn(n);
        if (!(v > 0.0)) throw std::invalid_argument("tagged schedule must be positive at n=" + std::to_string(n));
        if (v > 2.0 * reference(n))
            throw std::invalid_argument("tagged schedule exceeds 2x its reference class at n=" + std::to_string(n));
        if (n > 1 && v > fn(n - 1) + 1e-15)
            throw std::invalid_argument("tagged schedule must be non-increasing (violated at n=" + std::to_string(n) + ")");
    }
    StepSchedule s = reference;
    s.custom_ = std::move(fn);
    return s;
}

double StepSchedule::operator()(std::int64_t n) const {
    if (n < 1) throw std::invalid_argument("stepsize index must satisfy n >= 1");
    if (custom_) return custom_(n);
    if (regime_ == Regime::harmonic) return a_ / static_cast<double>(n);
    return a_ * std::pow(static_cast<double>(n), -1.0 / q_);
}

TimeAxis::TimeAxis(StepSchedule schedule, double segment_length)
    : sched_(std::move(schedule)), T_(segment_length) {
    if (!(T_ > 0.0)) throw std::invalid_argument("segment length T must be positive");
    t_.push_back(0.0);  // t(0)
    t_.push_back(0.0);  // t(1), empty sum
    nm_.push_back(1);   // n(0) = 1, T_0 = t(1) = 0
}

void TimeAxis::ensure_time(std::int64_t n) const {
    while (static_cast<std::int64_t>(t_.size()) <= n) {
        const std::int64_t next = static_cast<std::int64_t>(t_.size());
        acc_ += static_cast<long double>(sched_(next - 1));
        t_.push_back(static_cast<double>(acc_));
    }
}

void TimeAxis::ensure_segments(std::int64_t m) const {
    while (static_cast<std::int64_t>(nm_.size()) <= m) {
        const std::int64_t n_prev = nm_.back();
        ensure_time(n_prev);
        const double target = t_[static_cast<std::size_t>(n_prev)] + T_;
        std::int64_t n = n_prev + 1;
        for (;; ++n) {
            ensure_time(n);
            if (t_[static_cast<std::size_t>(n)] >= target) break;
            if (n - n_prev > (std::int64_t{1} << 40))
                throw std::runtime_error("segment search did not terminate; schedule sums appear bounded");
        }
        nm_.push_back(n);
    }
}

double TimeAxis::time_instant(std::int64_t n) const {
    if (n < 0) throw std::invalid_argument("time instant index must satisfy n >= 0");
    std::lock_guard<std::mutex> lock(mu_);
    ensure_time(n);
    return t_[static_cast<std::size_t>(n)];
}

double TimeAxis::window_sum(std::int64_t n, std::int64_t tau) const {
    if (n < 1) throw std::invalid_argument("window_sum requires n >= 1");
    if (tau < 0) throw std::invalid_argument("window_sum requires tau >= 0");
    const std::int64_t lo = std::max<std::int64_t>(1, n - tau);
    std::lock_guard<std::mutex> lock(mu_);
    ensure_time(n);
    return t_[static_cast<std::size_t>(n)] - t_[static_cast<std::size_t>(lo)];
}

std::int64_t TimeAxis::segment_index(std::int64_t n) const {
    if (n < 1) throw std::invalid_argument("segment_index requires n >= 1");
    std::lock_guard<std::mutex> lock(mu_);
    // T_m <= t(n) iff n(m) <= n, since t is strictly increasing from n=1
    while (nm_.back() <= n) ensure_segments(static_cast<std::int64_t>(nm_.size()));
    auto it = std::upper_bound(nm_.begin(), nm_.end(), n);
    return static_cast<std::int64_t>(it - nm_.begin()) - 1;
}

SegmentBounds TimeAxis::segment_bounds(std::int64_t m) const {
    if (m < 0) throw std::invalid_argument("segment index must satisfy m >= 0");
    std::lock_guard<std::mutex> lock(mu_);
    ensure_segments(m + 1);
    const std::int64_t ns = nm_[static_cast<std::size_t>(m)];
    const std::int64_t ne = nm_[static_cast<std::size_t>(m + 1)];
    return SegmentBounds{t_[static_cast<std::size_t>(ns)], t_[static_cast<std::size_t>(ne)], ns, ne};
}

}  // namespace aoisim
