#include "aoisim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aoisim {

InterpolatedPath::InterpolatedPath(const SimHistory& history, const TimeAxis& axis)
    : hist_(&history), axis_(&axis) {
    if (history.horizon() < 1) throw std::invalid_argument("empty history");
}

double InterpolatedPath::end_time() const { return axis_->time_instant(hist_->horizon()); }

Eigen::VectorXd InterpolatedPath::at(double t) const {
    const std::int64_t N = hist_->horizon();
    if (t <= 0.0) return hist_->x(1);
    if (t >= end_time()) return hist_->x(N);
    // locate n with t(n) <= t < t(n+1) by bisection on the cached axis
    std::int64_t lo = 1, hi = N;
    while (hi - lo > 1) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        if (axis_->time_instant(mid) <= t)
            lo = mid;
        else
            hi = mid;
    }
    const double t0 = axis_->time_instant(lo);
    const double t1 = axis_->time_instant(hi);
    if (t <= t0) return hist_->x(lo);
    const double w = (t - t0) / (t1 - t0);
    return hist_->x(lo) + w * (hist_->x(hi) - hist_->x(lo));
}

RescaledPath::RescaledPath(const SimHistory& history, const TimeAxis& axis)
    : hist_(&history), axis_(&axis), path_(history, axis) {
    const std::int64_t N = history.horizon();
    // complete segments within the horizon
    std::int64_t m = 0;
    while (axis.segment_bounds(m).n_end <= N) ++m;
    last_segment_ = m - 1;  // -1 when not even segment 0 is complete

    const std::int64_t m_top = std::max<std::int64_t>(m - 1, 0);
    s_.resize(static_cast<std::size_t>(m_top) + 2);
    double run = 1.0;
    for (std::int64_t l = 0; l <= m_top + 1; ++l) {
        const std::int64_t nl = axis.segment_bounds(l).n_start;
        if (nl <= N) run = std::max(run, history.x(nl).norm());
        s_[static_cast<std::size_t>(l)] = run;
    }

    // accumulated rescaled noise
    const int d = history.dimension();
    zeta_.setZero(d, N);
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(d);
    for (std::int64_t n = 1; n <= N; ++n) {
        if (n >= 2) {
            const std::int64_t mk = axis.segment_index(n - 1);
            const double sk = mk < static_cast<std::int64_t>(s_.size())
                                  ? s_[static_cast<std::size_t>(mk)]
                                  : s_.back();
            acc += axis.stepsize(n - 1) * (history.noise(n) / sk);
        }
        zeta_.col(n - 1) = acc;
    }
}

Eigen::VectorXd RescaledPath::x_hat(double t) const {
    // largest m with T_m <= t among cached scalings
    std::int64_t m = 0;
    while (m + 1 < static_cast<std::int64_t>(s_.size()) && axis_->segment_bounds(m + 1).t_start <= t) ++m;
    return path_.at(t) / s_[static_cast<std::size_t>(m)];
}

Eigen::VectorXd RescaledPath::x_hat_on_segment(std::int64_t m, double t) const {
    return path_.at(t) / s_[static_cast<std::size_t>(m)];
}

Eigen::VectorXd RescaledPath::e_hat(std::int64_t n) const {
    const std::int64_t m = axis_->segment_index(n);
    return hist_->drift_error(n) / s_[static_cast<std::size_t>(std::min<std::int64_t>(
                                      m, static_cast<std::int64_t>(s_.size()) - 1))];
}

Eigen::VectorXd RescaledPath::m_hat(std::int64_t n) const {
    const std::int64_t m = axis_->segment_index(n - 1);
    return hist_->noise(n) / s_[static_cast<std::size_t>(std::min<std::int64_t>(
                                 m, static_cast<std::int64_t>(s_.size()) - 1))];
}

RescaledPath build_rescaled(const SimHistory& history, const TimeAxis& axis) {
    return RescaledPath(history, axis);
}

double tracking_error(const RescaledPath& path, std::int64_t m, double dt) {
    if (m < 0 || m > path.last_segment()) throw std::invalid_argument("segment index out of range");
    const TimeAxis& axis = path.axis();
    const SegmentBounds seg = axis.segment_bounds(m);

    if (dt <= 0.0) {
        double amin = axis.stepsize(seg.n_start);
        for (std::int64_t n = seg.n_start; n < seg.n_end; ++n) amin = std::min(amin, axis.stepsize(n));
        dt = std::min(1e-2, amin) / 2.0;
    }

    const double s_m = path.scaling_at(m);
    const Eigen::VectorXd x0 = path.history().x(seg.n_start) / s_m;
    const ScaledDriftField field(path.history().config().drift, s_m);
    const OdeSolution sol = rk4_solve(field, x0, seg.t_start, seg.t_end, dt);

    double sup = 0.0;
    for (std::int64_t n = seg.n_start; n <= seg.n_end; ++n) {
        const double t = axis.time_instant(n);
        const Eigen::VectorXd xh = path.history().x(n) / s_m;  // exact knot value
        sup = std::max(sup, (xh - sol.at(t)).norm());
    }
    for (std::size_t k = 0; k < sol.t.size(); ++k)
        sup = std::max(sup, (path.x_hat_on_segment(m, sol.t[k]) - sol.y[k]).norm());
    return sup;
}

AoiLemmaReport verify_lemma_aoi(const AoiTrace& trace, double p, double eps,
                                std::int64_t exceedance_limit) {
    AoiLemmaReport report;
    report.length = trace.length();
    report.last_exceedance = fraction_exceedance(trace, eps, p);
    report.pass = !report.last_exceedance || *report.last_exceedance < exceedance_limit;
    return report;
}

WindowLemmaReport verify_lemma_window(const AoiTrace& trace, const StepSchedule& schedule,
                                      std::int64_t burn_in, double tolerance) {
    WindowLemmaReport report;
    const std::int64_t N = trace.length();
    TimeAxis axis(schedule, 1.0);
    // decade k covers [10^k, 10^{k+1}-1]; the one containing N extends to N
    for (std::int64_t start = 1; start <= N; start *= 10) {
        const std::int64_t end = start * 10 >= N ? N : start * 10 - 1;
        WindowDecade dec;
        dec.start = start;
        for (std::int64_t n = start; n <= end; ++n)
            dec.max_window = std::max(dec.max_window, axis.window_sum(n, trace.tau(n)));
        report.decades.push_back(dec);
        if (end == N) break;
    }
    report.monotone_after_burnin = true;
    for (std::size_t k = 1; k < report.decades.size(); ++k) {
        if (report.decades[k - 1].start < burn_in) continue;
        if (report.decades[k].max_window > report.decades[k - 1].max_window)
            report.monotone_after_burnin = false;
    }
    report.final_decade_max = report.decades.empty() ? 0.0 : report.decades.back().max_window;
    report.pass = report.monotone_after_burnin && report.final_decade_max < tolerance;
    return report;
}

NoiseProbeReport noise_convergence_probe(const RescaledPath& path, std::int64_t window_lo,
                                         std::int64_t window_hi, double factor) {
    const std::int64_t N = path.history().horizon();
    window_hi = std::min(window_hi, N);
    if (window_lo < 1 || window_lo >= window_hi)
        throw std::invalid_argument("noise probe window invalid");
    const int d = path.history().dimension();

    Eigen::VectorXd lo_acc = path.zeta_hat(window_lo), hi_acc = path.zeta_hat(window_lo);
    for (std::int64_t n = window_lo; n <= window_hi; ++n) {
        lo_acc = lo_acc.cwiseMin(path.zeta_hat(n));
        hi_acc = hi_acc.cwiseMax(path.zeta_hat(n));
    }
    NoiseProbeReport report;
    report.tail_oscillation = (hi_acc - lo_acc).norm();

    const TimeAxis& axis = path.axis();
    double a2 = 0.0;
    for (std::int64_t n = window_lo; n <= window_hi; ++n) {
        const double a = axis.stepsize(n);
        a2 += a * a;
    }
    a2 += axis.stepsize(window_hi) * axis.stepsize(window_hi) * static_cast<double>(window_hi);

    double msq = 0.0;
    std::int64_t count = 0;
    for (std::int64_t n = std::max<std::int64_t>(2, window_lo); n <= window_hi; ++n) {
        msq += path.m_hat(n).squaredNorm();
        ++count;
    }
    const double k_emp = count > 0 ? std::sqrt(msq / (static_cast<double>(count) * d)) : 0.0;
    report.bound = factor * std::sqrt(a2 * d) * k_emp;
    report.pass = report.tail_oscillation <= report.bound;
    return report;
}

std::vector<double> unit_ball_entry_probe(const DriftField& field, double c, int samples, double dt,
                                          double t_max, std::uint64_t seed) {
    if (samples < 1) throw std::invalid_argument("probe needs at least one sample");
    Rng rng(derive_stream(seed, kStreamMisc));
    const int d = field.dimension();
    auto scaled = std::make_shared<ScaledDriftField>(
        std::shared_ptr<const DriftField>(&field, [](const DriftField*) {}), c);
    std::vector<double> entry;
    entry.reserve(static_cast<std::size_t>(samples));
    for (int s = 0; s < samples; ++s) {
        Eigen::VectorXd x(d);
        for (int k = 0; k < d; ++k) x(k) = rng.normal();
        const double norm = x.norm();
        x = norm > 0 ? Eigen::VectorXd(x / norm) : Eigen::VectorXd::Unit(d, 0);
        double t = 0.0, hit = std::numeric_limits<double>::quiet_NaN();
        while (t < t_max) {
            const double step_end = std::min(t + 1.0, t_max);
            const OdeSolution sol = rk4_solve(*scaled, x, t, step_end, dt);
            bool found = false;
            for (std::size_t k = 0; k < sol.t.size(); ++k) {
                if (sol.y[k].norm() < 0.5) {
                    hit = sol.t[k];
                    found = true;
                    break;
                }
            }
            if (found) break;
            x = sol.back();
            t = step_end;
        }
        entry.push_back(hit);
    }
    return entry;
}

std::vector<std::int64_t> empirical_delay_envelope(const std::vector<AoiTrace>& traces) {
    if (traces.empty()) return {};
    std::int64_t len = traces.front().length();
    for (const AoiTrace& t : traces) len = std::min(len, t.length());
    std::vector<std::int64_t> env(static_cast<std::size_t>(len), 0);
    for (const AoiTrace& t : traces)
        for (std::int64_t n = 1; n <= len; ++n)
            env[static_cast<std::size_t>(n - 1)] =
                std::max(env[static_cast<std::size_t>(n - 1)], t.tau(n));
    return env;
}

}  // namespace aoisim
