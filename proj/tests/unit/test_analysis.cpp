#include <doctest.h>

#include <cmath>
#include <memory>

#include "aoisim/analysis.hpp"

using namespace aoisim;

namespace {

Eigen::VectorXd vec1(double a) {
    Eigen::VectorXd v(1);
    v << a;
    return v;
}

StepSchedule constant_schedule(double step) {
    return StepSchedule::tagged([step](std::int64_t) { return step; },
                                StepSchedule::harmonic(20000.0 * step, 1.0));
}

SimConfig base_config(StepSchedule sched, std::int64_t horizon) {
    SimConfig cfg;
    cfg.drift = std::make_shared<LinearDrift>(std::vector<int>{1}, 1.0);
    cfg.noise = NoiseModel::zero({1});
    cfg.delays = {AoiModel::zero()};
    cfg.schedule = sched;
    cfg.horizon = horizon;
    cfg.x1 = vec1(1.0);
    cfg.seed = 1;
    return cfg;
}

}  // namespace

TEST_CASE("interpolation hits the knots bit-exactly") {
    SimConfig cfg = base_config(StepSchedule::harmonic(1.0, 1.0), 200);
    cfg.noise = NoiseModel::gaussian_scaled(0.5, {1});
    const SimHistory hist = run(cfg);
    TimeAxis axis(cfg.schedule, 1.0);
    const InterpolatedPath path(hist, axis);
    for (std::int64_t n = 1; n <= 200; ++n)
        CHECK(path.at(axis.time_instant(n))(0) == hist.x(n)(0));
    // midpoint of the first nondegenerate interval
    const double mid = 0.5 * (axis.time_instant(1) + axis.time_instant(2));
    CHECK(path.at(mid)(0) == doctest::Approx(0.5 * (hist.x(1)(0) + hist.x(2)(0))).epsilon(1e-15));
}

TEST_CASE("scaling sequence is the running max of segment-start norms, floored at 1") {
    const StepSchedule sched = constant_schedule(1.0);
    SimConfig cfg = base_config(sched, 4);
    Eigen::MatrixXd states(1, 4);
    states << 2.0, 1.0, 3.0, 0.5;
    const SimHistory hist = SimHistory::from_states(cfg, states);
    TimeAxis axis(sched, 1.0);  // T_m = m, n(m) = m+1
    const RescaledPath path = build_rescaled(hist, axis);
    REQUIRE(path.last_segment() >= 2);
    CHECK(path.scaling_at(0) == 2.0);
    CHECK(path.scaling_at(1) == 2.0);
    CHECK(path.scaling_at(2) == 3.0);
}

TEST_CASE("trajectories inside the unit ball are not rescaled") {
    SimConfig cfg = base_config(StepSchedule::harmonic(1.0, 1.0), 5000);
    cfg.noise = NoiseModel::bounded_uniform(0.1, {1});
    const SimHistory hist = run(cfg);
    TimeAxis axis(cfg.schedule, 1.0);
    const RescaledPath path = build_rescaled(hist, axis);
    for (std::int64_t m = 0; m <= path.last_segment(); ++m) {
        CHECK(path.scaling_at(m) == 1.0);
        CHECK(path.x_hat(axis.segment_bounds(m).t_start)(0) ==
              hist.x(axis.segment_bounds(m).n_start)(0));
    }
}

TEST_CASE("rescaled invariants hold on a run that leaves the unit ball") {
    SimConfig cfg = base_config(StepSchedule::harmonic(1.0, 1.0), 20000);
    cfg.x1 = vec1(7.0);
    cfg.noise = NoiseModel::gaussian_scaled(1.0, {1});
    cfg.delays = {AoiModel::bernoulli_refresh(0.4)};
    const SimHistory hist = run(cfg);
    TimeAxis axis(cfg.schedule, 1.0);
    const RescaledPath path = build_rescaled(hist, axis);
    REQUIRE(path.last_segment() >= 5);
    for (std::int64_t m = 0; m <= path.last_segment(); ++m) {
        CHECK(path.scaling_at(m) >= 1.0);
        if (m > 0) CHECK(path.scaling_at(m) >= path.scaling_at(m - 1));
        const SegmentBounds seg = axis.segment_bounds(m);
        CHECK(path.x_hat_on_segment(m, seg.t_start).norm() <= 1.0 + 1e-12);
    }
}

TEST_CASE("RK4 integrates the exponential to 1e-6 at dt=1e-2") {
    const LinearDrift field({1}, 1.0);
    const OdeSolution sol = rk4_solve(field, vec1(1.0), 0.0, 1.0, 1e-2);
    CHECK(std::abs(sol.back()(0) - 0.36787944117144233) < 1e-6);
}

TEST_CASE("RK4 keeps constants exactly and solves the affine line") {
    const CallbackDrift zero({1}, 0.0, 0.0,
                             [](const Eigen::VectorXd&, Eigen::VectorXd& out) { out(0) = 0.0; });
    const OdeSolution flat = rk4_solve(zero, vec1(3.25), 0.0, 2.0, 0.1);
    for (const auto& y : flat.y) CHECK(y(0) == 3.25);

    // x' = -2x + 1 from 0: x(1) = (1 - e^-2)/2
    const AffineDrift aff({1}, 2.0 * Eigen::MatrixXd::Identity(1, 1), vec1(1.0));
    const OdeSolution sol = rk4_solve(aff, vec1(0.0), 0.0, 1.0, 1e-2);
    CHECK(std::abs(sol.back()(0) - 0.43233235838169365) < 1e-6);
}

TEST_CASE("RK4 halving the step improves the error by at least the order-4 factor") {
    const LinearDrift field({1}, 1.0);
    const double exact = std::exp(-1.0);
    const double e1 = std::abs(rk4_solve(field, vec1(1.0), 0.0, 1.0, 1e-2).back()(0) - exact);
    const double e2 = std::abs(rk4_solve(field, vec1(1.0), 0.0, 1.0, 5e-3).back()(0) - exact);
    CHECK(e1 / e2 >= 12.0);
}

TEST_CASE("a trajectory lying on the ODE solution tracks within interpolation error") {
    const StepSchedule sched = constant_schedule(0.01);
    SimConfig cfg = base_config(sched, 301);
    TimeAxis axis(sched, 1.0);
    Eigen::MatrixXd states(1, 301);
    for (std::int64_t n = 1; n <= 301; ++n) states(0, n - 1) = std::exp(-axis.time_instant(n));
    const SimHistory hist = SimHistory::from_states(cfg, states);
    const RescaledPath path = build_rescaled(hist, axis);
    REQUIRE(path.last_segment() >= 2);
    for (std::int64_t m = 0; m <= 2; ++m) CHECK(tracking_error(path, m) < 5e-5);
}

TEST_CASE("tracking error decreases across segments for a noiseless contraction") {
    SimConfig cfg = base_config(StepSchedule::harmonic(1.0, 1.0), 30000);
    cfg.x1 = vec1(1.0);
    const SimHistory hist = run(cfg);
    TimeAxis axis(cfg.schedule, 1.0);
    const RescaledPath path = build_rescaled(hist, axis);
    REQUIRE(path.last_segment() >= 6);
    double prev = tracking_error(path, 0);
    for (std::int64_t m = 1; m <= 6; ++m) {
        const double err = tracking_error(path, m);
        CHECK(err <= prev * 1.05 + 1e-15);
        prev = err;
    }
}

TEST_CASE("window verifier on trivial delay patterns") {
    const StepSchedule sched = StepSchedule::harmonic(1.0, 1.0);

    const AoiTrace zero = generate_trace(AoiModel::zero(), 1, 100000);
    const WindowLemmaReport rz = verify_lemma_window(zero, sched, 1000, 0.05);
    for (const auto& dec : rz.decades) CHECK(dec.max_window == 0.0);
    CHECK(rz.pass);

    const AoiTrace c5 = generate_trace(AoiModel::constant(5), 1, 100000);
    const WindowLemmaReport rc = verify_lemma_window(c5, sched, 1000, 0.05);
    CHECK(rc.monotone_after_burnin);
    CHECK(rc.final_decade_max < 1e-3);
    // direct-summation oracle for the final decade
    TimeAxis axis(sched, 1.0);
    double direct = 0.0;
    for (std::int64_t n = 10000; n <= 100000; ++n) {
        double w = 0.0;
        for (std::int64_t k = std::max<std::int64_t>(1, n - 5); k <= n - 1; ++k)
            w += 1.0 / static_cast<double>(k);
        direct = std::max(direct, w);
    }
    CHECK(rc.final_decade_max == doctest::Approx(direct).epsilon(1e-9));
}

TEST_CASE("noise probe: zero noise gives zero accumulated oscillation") {
    SimConfig cfg = base_config(StepSchedule::harmonic(1.0, 1.0), 5000);
    const SimHistory hist = run(cfg);
    TimeAxis axis(cfg.schedule, 1.0);
    const RescaledPath path = build_rescaled(hist, axis);
    for (std::int64_t n = 1; n <= 5000; ++n) CHECK(path.zeta_hat(n).norm() == 0.0);
    const NoiseProbeReport rep = noise_convergence_probe(path, 2500, 5000);
    CHECK(rep.tail_oscillation == 0.0);
    CHECK(rep.pass);
}

TEST_CASE("noise probe: deterministic alternating noise forms a convergent series") {
    const std::int64_t N = 4000;
    SimConfig cfg = base_config(StepSchedule::harmonic(1.0, 1.0), N);
    Eigen::MatrixXd states = Eigen::MatrixXd::Zero(1, N);
    Eigen::MatrixXd noise(1, N);
    for (std::int64_t n = 1; n <= N; ++n) noise(0, n - 1) = (n % 2 == 0) ? 1.0 : -1.0;
    const SimHistory hist = SimHistory::from_states(cfg, states, noise);
    TimeAxis axis(cfg.schedule, 1.0);
    const RescaledPath path = build_rescaled(hist, axis);
    const NoiseProbeReport rep = noise_convergence_probe(path, 2000, 4000);
    CHECK(rep.tail_oscillation <= 2.0 / 2000.0);  // alternating series partial sums
    CHECK(rep.pass);
}

TEST_CASE("noise probe passes on a bounded-noise run with square-summable steps") {
    SimConfig cfg = base_config(StepSchedule::harmonic(1.0, 1.0), 100000);
    cfg.noise = NoiseModel::bounded_uniform(1.0, {1});
    const SimHistory hist = run(cfg);
    TimeAxis axis(cfg.schedule, 1.0);
    const RescaledPath path = build_rescaled(hist, axis);
    const NoiseProbeReport rep = noise_convergence_probe(path, 50000, 100000);
    CHECK(rep.bound > 0.0);
    CHECK(rep.pass);
}

TEST_CASE("unit-ball entry probe on the linear field") {
    const LinearDrift field({2}, 1.0);
    const auto times = unit_ball_entry_probe(field, 10.0, 8, 1e-3, 5.0, 3);
    REQUIRE(times.size() == 8);
    for (double t : times) {
        REQUIRE(std::isfinite(t));
        CHECK(t == doctest::Approx(std::log(2.0)).epsilon(0.01));
    }
}

TEST_CASE("empirical delay envelope is the pointwise max and is labeled as such") {
    std::vector<AoiTrace> traces;
    traces.push_back(generate_trace(AoiModel::bernoulli_refresh(0.5), 1, 1000));
    traces.push_back(generate_trace(AoiModel::bernoulli_refresh(0.5), 2, 1000));
    const auto env = empirical_delay_envelope(traces);
    REQUIRE(env.size() == 1000);
    for (std::int64_t n = 1; n <= 1000; ++n) {
        CHECK(env[static_cast<std::size_t>(n - 1)] ==
              std::max(traces[0].tau(n), traces[1].tau(n)));
    }
}
