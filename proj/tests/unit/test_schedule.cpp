#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <numeric>

#include "aoisim/aoi.hpp"
#include "aoisim/schedule.hpp"

using namespace aoisim;

namespace {

// exact rational accumulator for small harmonic sums
struct Fraction {
    long long num = 0, den = 1;
    void add_unit(long long k) {  // += 1/k
        num = num * k + den;
        den *= k;
        const long long g = std::gcd(num, den);
        num /= g;
        den /= g;
    }
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

StepSchedule constant_schedule() {
    // constant a(n) = 1 test device, tagged against a dominating reference
    return StepSchedule::tagged([](std::int64_t) { return 1.0; },
                                StepSchedule::harmonic(20000.0, 1.0));
}

}  // namespace

TEST_CASE("stepsize formulas") {
    CHECK(StepSchedule::harmonic(1.0, 1.0)(4) == 0.25);
    CHECK(StepSchedule::harmonic(0.5, 1.0)(1) == 0.5);
    CHECK(StepSchedule::power_with_q(1.0, 1.25, 1.5)(32) == doctest::Approx(0.0625).epsilon(1e-15));
}

TEST_CASE("regime/moment-order pairing is enforced at construction") {
    CHECK_THROWS_AS(StepSchedule::harmonic(1.0, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(StepSchedule::harmonic(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(StepSchedule::power_with_q(1.0, 1.25, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(StepSchedule::power_with_q(1.0, 2.5, 3.0), std::invalid_argument);
    CHECK_THROWS_AS(StepSchedule::power_with_q(1.0, 1.0, 1.5), std::invalid_argument);
}

TEST_CASE("choose_q midpoint rule") {
    CHECK(choose_q(1.5) == doctest::Approx(1.25).epsilon(1e-15));
    CHECK(choose_q(3.0) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(choose_q(1.1) == doctest::Approx(1.05).epsilon(1e-15));
    CHECK_THROWS_AS(choose_q(1.0), std::invalid_argument);
}

TEST_CASE("time instants with a rational harmonic oracle") {
    TimeAxis axis(StepSchedule::harmonic(1.0, 1.0), 1.0);
    CHECK(axis.time_instant(0) == 0.0);
    CHECK(axis.time_instant(1) == 0.0);  // empty sum
    CHECK(axis.time_instant(3) == doctest::Approx(1.5).epsilon(1e-15));
    Fraction h10;
    for (long long k = 1; k <= 10; ++k) h10.add_unit(k);
    CHECK(h10.num == 7381);
    CHECK(h10.den == 2520);
    CHECK(axis.time_instant(11) == doctest::Approx(h10.value()).epsilon(1e-14));
    CHECK(axis.time_instant(11) == doctest::Approx(2.9289682539682538).epsilon(1e-14));
}

TEST_CASE("window sums clamp at 1 and handle the empty window") {
    TimeAxis axis(StepSchedule::harmonic(1.0, 1.0), 1.0);
    CHECK(axis.window_sum(5, 0) == 0.0);
    CHECK(axis.window_sum(3, 2) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(axis.window_sum(3, 10) == doctest::Approx(1.5).epsilon(1e-15));  // clamped at k=1
    CHECK_THROWS_AS(axis.window_sum(0, 1), std::invalid_argument);
    CHECK_THROWS_AS(axis.window_sum(1, -1), std::invalid_argument);
}

TEST_CASE("window sum against the direct summation oracle on a generated path") {
    TimeAxis axis(StepSchedule::harmonic(1.0, 1.0), 1.0);
    const AoiTrace trace = generate_trace(AoiModel::bernoulli_refresh(0.5), 17, 100000);
    const std::int64_t n = 100000;
    const std::int64_t tau = trace.tau(n);
    double direct = 0.0;
    for (std::int64_t k = std::max<std::int64_t>(1, n - tau); k <= n - 1; ++k)
        direct += 1.0 / static_cast<double>(k);
    CHECK(axis.window_sum(n, tau) == doctest::Approx(direct).epsilon(1e-9));
    CHECK(axis.window_sum(n, tau) < 0.01);
}

TEST_CASE("segments of the constant test schedule land on the arithmetic grid") {
    TimeAxis axis(constant_schedule(), 2.0);  // t(n) = n-1, T = 2
    const SegmentBounds s0 = axis.segment_bounds(0);
    CHECK(s0.t_start == 0.0);
    CHECK(s0.t_end == 2.0);
    CHECK(s0.n_start == 1);
    CHECK(s0.n_end == 3);
    const SegmentBounds s1 = axis.segment_bounds(1);
    CHECK(s1.t_end == 4.0);
    CHECK(s1.n_end == 5);
    CHECK(axis.segment_index(1) == 0);  // m(1) = 0 always
    CHECK(axis.segment_index(3) == 1);
    CHECK(axis.segment_index(4) == 1);
    CHECK(axis.segment_index(5) == 2);
}

TEST_CASE("harmonic axis: first segment boundary found by prefix-sum scan") {
    TimeAxis axis(StepSchedule::harmonic(1.0, 1.0), 1.0);
    // oracle: scan prefix sums for the first t(n) >= 1
    double acc = 0.0;
    std::int64_t n_oracle = 0;
    for (std::int64_t n = 2; n <= 100; ++n) {
        acc += 1.0 / static_cast<double>(n - 1);
        if (acc >= 1.0) {
            n_oracle = n;
            break;
        }
    }
    CHECK(n_oracle == 2);  // t(2) = 1 already satisfies t(n) >= T_0 + T
    CHECK(axis.segment_bounds(0).n_end == n_oracle);
    CHECK(axis.segment_index(1) == 0);
}

TEST_CASE("segment sums stay within [T, T + a(n(m))] and indices are consistent") {
    TimeAxis axis(StepSchedule::harmonic(1.0, 1.0), 1.0);
    for (std::int64_t m = 0; m < 8; ++m) {
        const SegmentBounds seg = axis.segment_bounds(m);
        double sum = 0.0;
        for (std::int64_t n = seg.n_start; n < seg.n_end; ++n) sum += axis.stepsize(n);
        CHECK(sum >= 1.0 - 1e-12);
        CHECK(sum <= 1.0 + axis.stepsize(seg.n_start) + 1e-12);
    }
    for (std::int64_t n : {1, 2, 5, 17, 100, 999}) {
        const std::int64_t m = axis.segment_index(n);
        const SegmentBounds seg = axis.segment_bounds(m);
        CHECK(seg.n_start <= n);
        CHECK(n < seg.n_end);
    }
}

TEST_CASE("Robbins-Monro behaviour of the harmonic schedule") {
    const StepSchedule sched = StepSchedule::harmonic(1.0, 1.0);
    double sum = 0.0, sumsq = 0.0, sum_mid = 0.0;
    for (std::int64_t n = 1; n <= 1000000; ++n) {
        const double a = sched(n);
        sum += a;
        sumsq += a * a;
        if (n == 100000) sum_mid = sum;
    }
    CHECK(sum > sum_mid + 2.0);  // partial sums keep growing, ~ln 10 per decade
    CHECK(sum > 14.0);
    // sum of squares converges to pi^2/6
    double sq1e4 = 0.0;
    for (std::int64_t n = 1; n <= 10000; ++n) sq1e4 += 1.0 / (static_cast<double>(n) * n);
    CHECK(sq1e4 == doctest::Approx(1.6449340668482264).epsilon(1e-3));
    CHECK(sumsq < 1.6449340668482264 + 1e-9);
}

TEST_CASE("tagged schedules are validated against their reference class") {
    const StepSchedule ref = StepSchedule::harmonic(1.0, 1.0);
    const StepSchedule ok = StepSchedule::tagged(
        [](std::int64_t n) { return 1.5 / static_cast<double>(n); }, ref);
    CHECK(ok(3) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK_THROWS_AS(StepSchedule::tagged([](std::int64_t) { return 1.0; }, ref),
                    std::invalid_argument);
    CHECK_THROWS_AS(StepSchedule::tagged([](std::int64_t n) { return static_cast<double>(n); }, ref),
                    std::invalid_argument);
}
