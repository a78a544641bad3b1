#include "aoisim/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <stdexcept>

namespace aoisim {

namespace {

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t mid = v.size() / 2;
    return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

double final_window_sum(const SimHistory& hist, const StepSchedule& sched) {
    const std::int64_t N = hist.horizon();
    if (N < 1) return 0.0;
    std::int64_t tau_max = 0;
    const int D = hist.block_count();
    for (int i = 1; i <= D; ++i)
        for (int j = 1; j <= D; ++j) tau_max = std::max(tau_max, hist.tau(i, j, N));
    TimeAxis axis(sched, 1.0);
    return axis.window_sum(N, tau_max);
}

template <typename Fn>
std::vector<SeedOutcome> run_replications(int replications, Fn&& one) {
    std::vector<std::future<SeedOutcome>> futures;
    futures.reserve(static_cast<std::size_t>(replications));
    for (int r = 0; r < replications; ++r)
        futures.push_back(std::async(std::launch::async, one, r));
    std::vector<SeedOutcome> out;
    out.reserve(static_cast<std::size_t>(replications));
    for (auto& f : futures) out.push_back(f.get());  // reduced in seed order
    return out;
}

}  // namespace

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

SgdReport run_sgd_experiment(const SgdExperimentSpec& spec, double error_tolerance,
                             const std::string& config_hash) {
    if (!spec.objective) throw std::invalid_argument("sgd experiment needs an objective");
    if (spec.replications < 1) throw std::invalid_argument("replication count must be >= 1");
    if (spec.objective->min_eigenvalue() <= 0.0)
        throw std::invalid_argument("mean Hessian of the objective is not positive definite");

    SgdReport report;
    report.tolerance = error_tolerance;
    report.config_hash = config_hash;
    report.x_star = spec.objective->minimizer();

    auto drift = drift_from_objective(*spec.objective, spec.block_dims);
    const double zero_residual = drift->eval(report.x_star).norm();
    if (zero_residual > 1e-10)
        throw std::runtime_error("computed minimizer is not a drift zero (residual " +
                                 std::to_string(zero_residual) + ")");

    auto one = [&](int r) {
        SimConfig cfg;
        cfg.drift = drift;
        cfg.noise = NoiseModel::zero(spec.block_dims);
        cfg.objective = spec.objective;
        cfg.delays = spec.delays;
        cfg.schedule = spec.schedule;
        cfg.horizon = spec.horizon;
        cfg.x1 = spec.x1;
        cfg.seed = derive_stream(spec.master_seed, kStreamReplication, static_cast<std::uint64_t>(r));
        cfg.divergence_threshold = spec.divergence_threshold;
        const SimHistory hist = run(cfg);

        SeedOutcome out;
        out.seed = cfg.seed;
        out.status = hist.verdict().status;
        out.final_error = (hist.x(hist.horizon()) - report.x_star).norm();
        out.max_norm = hist.max_norm();
        out.final_window_sum = final_window_sum(hist, spec.schedule);
        return out;
    };
    report.per_seed = run_replications(spec.replications, one);

    std::vector<double> errors;
    for (const SeedOutcome& o : report.per_seed) {
        if (o.status != RunStatus::completed) ++report.diverged_count;
        errors.push_back(o.final_error);
        report.max_final_error = std::max(report.max_final_error, o.final_error);
        report.max_norm_overall = std::max(report.max_norm_overall, o.max_norm);
    }
    report.median_final_error = median(errors);
    report.pass = report.diverged_count == 0 && report.median_final_error < error_tolerance;
    return report;
}

MomentumReport run_momentum_experiment(const MomentumExperimentSpec& spec, double gap_tolerance,
                                       const std::string& config_hash) {
    if (!spec.drift) throw std::invalid_argument("momentum experiment needs a drift field");
    if (spec.replications < 1) throw std::invalid_argument("replication count must be >= 1");

    MomentumReport report;
    report.tolerance = gap_tolerance;
    report.config_hash = config_hash;

    const int D = spec.drift->block_count();
    std::vector<AoiModel> zero_delays(static_cast<std::size_t>(D) * D, AoiModel::zero());

    auto one = [&](int r) {
        const std::uint64_t seed =
            derive_stream(spec.master_seed, kStreamReplication, static_cast<std::uint64_t>(r));

        SimConfig hb;
        hb.drift = spec.drift;
        hb.noise = spec.noise;
        hb.objective = spec.objective;
        hb.delays = zero_delays;
        hb.schedule = spec.schedule;
        hb.horizon = spec.horizon;
        hb.x1 = spec.x1;
        hb.seed = seed;
        hb.variant = Variant::heavy_ball;
        hb.beta = spec.beta;
        hb.divergence_threshold = spec.divergence_threshold;

        SimConfig plain = hb;
        plain.variant = Variant::plain;
        plain.beta = 0.0;

        const SimHistory hist_hb = run(hb);
        const SimHistory hist_plain = run(plain);

        SeedOutcome out;
        out.seed = seed;
        out.status = hist_hb.verdict().status == RunStatus::completed ? hist_plain.verdict().status
                                                                      : hist_hb.verdict().status;
        out.final_error = (hist_hb.x(hist_hb.horizon()) - hist_plain.x(hist_plain.horizon())).norm();
        out.max_norm = std::max(hist_hb.max_norm(), hist_plain.max_norm());
        for (std::int64_t n = std::min(spec.delta_burn_in, hist_hb.horizon()); n <= hist_hb.horizon(); ++n)
            out.max_delta_tail = std::max(out.max_delta_tail, hist_hb.delta_norm(n));
        return out;
    };
    report.per_seed = run_replications(spec.replications, one);

    for (const SeedOutcome& o : report.per_seed) {
        if (o.status != RunStatus::completed) ++report.diverged_count;
        report.max_twin_gap = std::max(report.max_twin_gap, o.final_error);
        report.max_delta_tail = std::max(report.max_delta_tail, o.max_delta_tail);
    }
    report.pass = report.diverged_count == 0 && report.max_twin_gap < gap_tolerance;
    return report;
}

}  // namespace aoisim
