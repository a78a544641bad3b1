#include "aoisim/gronwall.hpp"

#include <cmath>
#include <stdexcept>

#include "aoisim/aoi.hpp"

namespace aoisim {

double GronwallInstance::window_sum(std::int64_t n) const {
    const std::int64_t d = delta[static_cast<std::size_t>(n - 1)];
    const std::int64_t lo = std::max<std::int64_t>(1, n - d);
    double acc = 0.0;
    for (std::int64_t k = lo; k <= n - 1; ++k) acc += a[static_cast<std::size_t>(k - 1)];
    return acc;
}

double GronwallInstance::time_instant(std::int64_t n) const {
    double acc = 0.0;
    for (std::int64_t i = 1; i <= n - 1; ++i) acc += a[static_cast<std::size_t>(i - 1)];
    return acc;
}

void GronwallInstance::validate() const {
    const std::size_t H = y.size();
    if (H == 0) throw std::invalid_argument("gronwall instance is empty");
    if (a.size() != H || b.size() != H || c.size() != H || delta.size() != H)
        throw std::invalid_argument("gronwall instance sequences must have equal length");
    if (!(C > 0.0) || !(B > 0.0)) throw std::invalid_argument("gronwall scalars C, B must be positive");
    for (std::size_t k = 0; k < H; ++k) {
        if (y[k] < 0.0 || a[k] < 0.0 || b[k] < 0.0 || c[k] < 0.0 || delta[k] < 0)
            throw std::invalid_argument("gronwall sequences must be non-negative");
        if (b[k] > B * (1.0 + 1e-12)) throw std::invalid_argument("B must dominate sup b_n");
        if (k > 0 && c[k] < c[k - 1] * (1.0 - 1e-12))
            throw std::invalid_argument("c must be monotonically non-decreasing");
    }
}

std::optional<std::int64_t> gronwall_threshold(const GronwallInstance& inst) {
    inst.validate();
    const std::int64_t H = inst.horizon();
    // suffix maxima of C * window_sum(n)
    std::vector<double> w(static_cast<std::size_t>(H));
    for (std::int64_t n = 1; n <= H; ++n) w[static_cast<std::size_t>(n - 1)] = inst.C * inst.window_sum(n);
    std::vector<double> suffix(static_cast<std::size_t>(H) + 1, 0.0);
    for (std::int64_t n = H; n >= 1; --n)
        suffix[static_cast<std::size_t>(n - 1)] =
            std::max(w[static_cast<std::size_t>(n - 1)], suffix[static_cast<std::size_t>(n)]);
    double t_acc = 0.0;  // t(N) built incrementally
    for (std::int64_t N = 0; N <= H; ++N) {
        if (N >= 2) t_acc += inst.a[static_cast<std::size_t>(N - 2)];
        const double rhs = 1.0 - std::exp(-inst.C * t_acc);
        const double wmax = suffix[static_cast<std::size_t>(std::max<std::int64_t>(N, 1) - 1)];
        if (wmax <= rhs) return N;
    }
    return std::nullopt;
}

GronwallReport gronwall_bound_check(const GronwallInstance& inst, double rel_slack) {
    inst.validate();
    GronwallReport report;
    const std::int64_t H = inst.horizon();

    report.hypothesis_ok = true;
    for (std::int64_t n = 1; n <= H; ++n) {
        const std::int64_t lo = std::max<std::int64_t>(1, n - inst.delta[static_cast<std::size_t>(n - 1)]);
        double acc = 0.0;
        for (std::int64_t k = lo; k <= n - 1; ++k)
            acc += inst.a[static_cast<std::size_t>(k - 1)] * inst.y[static_cast<std::size_t>(k - 1)];
        const double rhs = inst.b[static_cast<std::size_t>(n - 1)] * inst.c[static_cast<std::size_t>(n - 1)] +
                           inst.C * acc;
        if (inst.y[static_cast<std::size_t>(n - 1)] > rhs * (1.0 + rel_slack)) {
            report.hypothesis_ok = false;
            report.first_hypothesis_violation = n;
            break;
        }
    }
    if (!report.hypothesis_ok) return report;

    report.threshold = gronwall_threshold(inst);
    if (!report.threshold) return report;

    const double tN = inst.time_instant(*report.threshold);
    const double amplifier = inst.B * inst.C * std::exp(inst.C * tN);
    report.bound_ok = true;
    for (std::int64_t n = std::max<std::int64_t>(*report.threshold, 1); n <= H; ++n) {
        const double rhs = inst.c[static_cast<std::size_t>(n - 1)] *
                           (inst.b[static_cast<std::size_t>(n - 1)] + amplifier * inst.window_sum(n));
        if (inst.y[static_cast<std::size_t>(n - 1)] > rhs * (1.0 + rel_slack)) {
            report.bound_ok = false;
            report.first_bound_violation = n;
            break;
        }
    }

    // trend diagnostic for the corollary y_n in o(c_n): compare the max of
    // y/c over the first and last tenths of the horizon
    const std::int64_t tenth = std::max<std::int64_t>(1, H / 10);
    double head = 0.0, tail = 0.0;
    for (std::int64_t n = 1; n <= tenth; ++n)
        head = std::max(head, inst.y[static_cast<std::size_t>(n - 1)] /
                                  std::max(inst.c[static_cast<std::size_t>(n - 1)], 1e-300));
    for (std::int64_t n = H - tenth + 1; n <= H; ++n)
        tail = std::max(tail, inst.y[static_cast<std::size_t>(n - 1)] /
                                  std::max(inst.c[static_cast<std::size_t>(n - 1)], 1e-300));
    report.corollary_trend = tail <= head;
    return report;
}

ClassicalGronwallReport classical_gronwall_check(const std::vector<double>& x,
                                                 const std::vector<double>& a, double C, double L,
                                                 double rel_slack) {
    if (x.empty() || a.size() < x.size() - 1)
        throw std::invalid_argument("classical gronwall needs x_0..x_H and a_0..a_{H-1}");
    if (!(C > 0.0) || L < 0.0) throw std::invalid_argument("classical gronwall needs C > 0, L >= 0");
    ClassicalGronwallReport report;
    report.hypothesis_ok = true;
    report.conclusion_ok = true;
    double weighted = 0.0;  // L * sum_{m<=n} a_m x_m
    double asum = 0.0;      // sum_{m<=n} a_m
    for (std::size_t n = 0; n + 1 < x.size(); ++n) {
        weighted += a[n] * x[n];
        asum += a[n];
        if (report.hypothesis_ok && x[n + 1] > (C + L * weighted) * (1.0 + rel_slack)) {
            report.hypothesis_ok = false;
            report.first_hypothesis_violation = static_cast<std::int64_t>(n + 1);
        }
        if (report.conclusion_ok && x[n + 1] > C * std::exp(L * asum) * (1.0 + rel_slack)) {
            report.conclusion_ok = false;
            report.first_conclusion_violation = static_cast<std::int64_t>(n + 1);
        }
    }
    return report;
}

GronwallInstance make_equality_instance(Rng& rng, const GronwallInstanceParams& params) {
    GronwallInstance inst;
    const std::int64_t H = params.horizon;
    const StepSchedule sched =
        StepSchedule::harmonic(rng.uniform(params.a_scale_min, params.a_scale_max), 1.0);
    inst.a.resize(static_cast<std::size_t>(H));
    for (std::int64_t n = 1; n <= H; ++n) inst.a[static_cast<std::size_t>(n - 1)] = sched(n);
    inst.C = rng.uniform(params.c_min, params.c_max);

    const AoiModel delays = AoiModel::bernoulli_refresh(rng.uniform(params.refresh_min, params.refresh_max));
    const AoiTrace trace = generate_trace(delays, rng.next_u64(), H);
    inst.delta.assign(trace.values.begin(), trace.values.end());

    inst.b.resize(static_cast<std::size_t>(H));
    inst.c.resize(static_cast<std::size_t>(H));
    double c_run = rng.uniform(0.0, 1.0);
    double b_max = 0.0;
    for (std::int64_t n = 1; n <= H; ++n) {
        // decaying random b and a non-decreasing random c
        const double bn = params.b_scale * rng.u01() / (1.0 + 0.05 * static_cast<double>(n));
        inst.b[static_cast<std::size_t>(n - 1)] = bn;
        b_max = std::max(b_max, bn);
        c_run += rng.u01() * 0.05;
        inst.c[static_cast<std::size_t>(n - 1)] = c_run;
    }
    inst.B = std::max(b_max, 1e-6);

    // run the recursion with equality
    inst.y.resize(static_cast<std::size_t>(H));
    for (std::int64_t n = 1; n <= H; ++n) {
        const std::int64_t lo = std::max<std::int64_t>(1, n - inst.delta[static_cast<std::size_t>(n - 1)]);
        double acc = 0.0;
        for (std::int64_t k = lo; k <= n - 1; ++k)
            acc += inst.a[static_cast<std::size_t>(k - 1)] * inst.y[static_cast<std::size_t>(k - 1)];
        inst.y[static_cast<std::size_t>(n - 1)] =
            inst.b[static_cast<std::size_t>(n - 1)] * inst.c[static_cast<std::size_t>(n - 1)] + inst.C * acc;
    }
    return inst;
}

}  // namespace aoisim
