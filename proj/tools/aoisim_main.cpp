// Command-line front end: experiment orchestration and report emission.
// Exit codes: 0 all enabled checks passed, 1 internal error, 2 configuration
// error, 3 divergence verdict, 4 verifier failure.

#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "aoisim/analysis.hpp"
#include "aoisim/config.hpp"
#include "aoisim/engine.hpp"
#include "aoisim/experiments.hpp"
#include "aoisim/gronwall.hpp"
#include "aoisim/report.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitConfig = 2;
constexpr int kExitDivergence = 3;
constexpr int kExitVerify = 4;

struct CommonOpts {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> horizon;
    std::optional<int> replications;
    std::optional<std::string> out_dir;
    std::optional<std::string> format;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool config_required = true) {
    auto* c = cmd->add_option("--config", opts.config_path, "experiment config file");
    if (config_required) c->required();
    cmd->add_option("--seed", opts.seed, "master seed (overrides config)");
    cmd->add_option("--horizon", opts.horizon, "iteration horizon (overrides config)");
    cmd->add_option("--replications", opts.replications, "replication count (overrides config)");
    cmd->add_option("--out", opts.out_dir, "output directory (overrides config)");
    cmd->add_option("--format", opts.format, "output files: csv, summary or both");
}

bool load_config(const CommonOpts& opts, aoisim::ExperimentConfig& cfg) {
    const auto errors = aoisim::ExperimentConfig::parse_file(opts.config_path, cfg);
    if (!errors.empty()) {
        std::cerr << "configuration errors (" << errors.size() << "):\n";
        for (const auto& e : errors) std::cerr << "  " << e.to_string() << "\n";
        return false;
    }
    if (opts.seed) cfg.run_spec.seed = *opts.seed;
    if (opts.horizon) cfg.run_spec.horizon = *opts.horizon;
    if (opts.replications) cfg.run_spec.replications = *opts.replications;
    if (opts.out_dir) cfg.output.directory = *opts.out_dir;
    if (opts.format) {
        if (*opts.format != "csv" && *opts.format != "summary" && *opts.format != "both") {
            std::cerr << "--format must be csv, summary or both\n";
            return false;
        }
        cfg.output.format = *opts.format;
    }
    return true;
}

bool want_csv(const aoisim::ExperimentConfig& cfg) { return cfg.output.format != "summary"; }
bool want_summary(const aoisim::ExperimentConfig& cfg) { return cfg.output.format != "csv"; }

std::string join_path(const std::string& dir, const std::string& name) { return dir + "/" + name; }

const char* status_name(aoisim::RunStatus s) {
    switch (s) {
        case aoisim::RunStatus::completed: return "completed";
        case aoisim::RunStatus::diverged: return "diverged";
        case aoisim::RunStatus::cap_exceeded: return "cap-exceeded";
    }
    return "?";
}

int cmd_run(const CommonOpts& opts) {
    aoisim::ExperimentConfig cfg;
    if (!load_config(opts, cfg)) return kExitConfig;

    aoisim::SimConfig sim = cfg.make_sim_config();
    aoisim::Summary summary;
    summary.add("command", "run");
    summary.add("config_hash", cfg.config_hash());
    summary.add("replications", static_cast<std::int64_t>(cfg.run_spec.replications));
    summary.add("horizon", cfg.run_spec.horizon);
    summary.add("master_seed", std::to_string(cfg.run_spec.seed));

    bool any_bad_verdict = false;
    for (int r = 0; r < cfg.run_spec.replications; ++r) {
        aoisim::SimConfig rep = sim;
        rep.seed = cfg.run_spec.replications == 1
                       ? cfg.run_spec.seed
                       : aoisim::derive_stream(cfg.run_spec.seed, aoisim::kStreamReplication,
                                               static_cast<std::uint64_t>(r));
        const aoisim::SimHistory hist = aoisim::run(rep);
        const std::string tag = "rep" + std::to_string(r);
        summary.add(tag + ".seed", std::to_string(rep.seed));
        summary.add(tag + ".verdict", status_name(hist.verdict().status));
        summary.add(tag + ".recorded", hist.horizon());
        summary.add(tag + ".final_norm", hist.x(hist.horizon()).norm());
        summary.add(tag + ".max_norm", hist.max_norm());
        if (hist.verdict().status != aoisim::RunStatus::completed) any_bad_verdict = true;
        if (want_csv(cfg)) {
            std::ostringstream os;
            hist.write_csv(os);
            aoisim::atomic_write(join_path(cfg.output.directory, "history_" + tag + ".csv"), os.str());
        }
    }
    summary.add_bool("all_completed", !any_bad_verdict);
    if (want_summary(cfg))
        aoisim::atomic_write(join_path(cfg.output.directory, "run_summary.txt"), summary.to_string());
    return any_bad_verdict ? kExitDivergence : kExitOk;
}

int cmd_verify_aoi(const CommonOpts& opts) {
    aoisim::ExperimentConfig cfg;
    if (!load_config(opts, cfg)) return kExitConfig;

    const aoisim::AoiModel model = cfg.delays.fill;
    const double p = cfg.resolved_p();
    const std::int64_t limit = cfg.analysis.exceedance_limit > 0 ? cfg.analysis.exceedance_limit
                                                                 : cfg.run_spec.horizon;
    aoisim::CsvTable table({"seed", "last_exceedance", "length", "pass"});
    int passed = 0;
    for (int r = 0; r < cfg.run_spec.replications; ++r) {
        const std::uint64_t seed = aoisim::derive_stream(cfg.run_spec.seed, aoisim::kStreamReplication,
                                                         static_cast<std::uint64_t>(r));
        const aoisim::AoiTrace trace = aoisim::generate_trace(model, seed, cfg.run_spec.horizon);
        const aoisim::AoiLemmaReport rep =
            aoisim::verify_lemma_aoi(trace, p, cfg.analysis.epsilon, limit);
        passed += rep.pass ? 1 : 0;
        table.add_row({std::to_string(seed),
                       rep.last_exceedance ? aoisim::CsvTable::num(*rep.last_exceedance) : "-1",
                       aoisim::CsvTable::num(rep.length), rep.pass ? "1" : "0"});
    }
    const bool pass = passed == cfg.run_spec.replications;
    aoisim::Summary summary;
    summary.add("command", "verify-aoi");
    summary.add("config_hash", cfg.config_hash());
    summary.add("model", model.id());
    summary.add("epsilon", cfg.analysis.epsilon);
    summary.add("p", p);
    summary.add("exceedance_limit", limit);
    summary.add("seeds_passed", static_cast<std::int64_t>(passed));
    summary.add("seeds_total", static_cast<std::int64_t>(cfg.run_spec.replications));
    summary.add_bool("pass", pass);
    if (want_summary(cfg))
        aoisim::atomic_write(join_path(cfg.output.directory, "aoi_report.txt"), summary.to_string());
    if (want_csv(cfg))
        aoisim::atomic_write(join_path(cfg.output.directory, "aoi_seeds.csv"), table.to_string());
    return pass ? kExitOk : kExitVerify;
}

int cmd_verify_window(const CommonOpts& opts) {
    aoisim::ExperimentConfig cfg;
    if (!load_config(opts, cfg)) return kExitConfig;

    const aoisim::AoiModel model = cfg.delays.fill;
    const aoisim::StepSchedule sched = cfg.make_schedule();
    aoisim::CsvTable table({"seed", "decade_start", "max_window"});
    int passed = 0;
    for (int r = 0; r < cfg.run_spec.replications; ++r) {
        const std::uint64_t seed = aoisim::derive_stream(cfg.run_spec.seed, aoisim::kStreamReplication,
                                                         static_cast<std::uint64_t>(r));
        const aoisim::AoiTrace trace = aoisim::generate_trace(model, seed, cfg.run_spec.horizon);
        const aoisim::WindowLemmaReport rep = aoisim::verify_lemma_window(
            trace, sched, cfg.analysis.burn_in, cfg.analysis.window_tolerance);
        passed += rep.pass ? 1 : 0;
        for (const auto& dec : rep.decades)
            table.add_row({std::to_string(seed), aoisim::CsvTable::num(dec.start),
                           aoisim::CsvTable::num(dec.max_window)});
    }
    const bool pass = passed == cfg.run_spec.replications;
    aoisim::Summary summary;
    summary.add("command", "verify-window");
    summary.add("config_hash", cfg.config_hash());
    summary.add("model", model.id());
    summary.add("burn_in", cfg.analysis.burn_in);
    summary.add("window_tolerance", cfg.analysis.window_tolerance);
    summary.add("seeds_passed", static_cast<std::int64_t>(passed));
    summary.add("seeds_total", static_cast<std::int64_t>(cfg.run_spec.replications));
    summary.add_bool("pass", pass);
    if (want_summary(cfg))
        aoisim::atomic_write(join_path(cfg.output.directory, "window_report.txt"), summary.to_string());
    if (want_csv(cfg))
        aoisim::atomic_write(join_path(cfg.output.directory, "window_decades.csv"), table.to_string());
    return pass ? kExitOk : kExitVerify;
}

int cmd_verify_gronwall(const CommonOpts& opts, int random_count, std::int64_t horizon) {
    // config optional for this command
    std::string out_dir = opts.out_dir.value_or("out");
    std::string format = opts.format.value_or("both");
    std::uint64_t seed = opts.seed.value_or(1);

    aoisim::Rng rng(aoisim::derive_stream(seed, aoisim::kStreamMisc));
    aoisim::GronwallInstanceParams params;
    params.horizon = horizon;
    int threshold_found = 0, bound_ok = 0, hypothesis_ok = 0;
    int classical_ok = 0;
    for (int k = 0; k < random_count; ++k) {
        const aoisim::GronwallInstance inst = aoisim::make_equality_instance(rng, params);
        const aoisim::GronwallReport rep = aoisim::gronwall_bound_check(inst);
        hypothesis_ok += rep.hypothesis_ok ? 1 : 0;
        if (rep.threshold) {
            ++threshold_found;
            bound_ok += rep.bound_ok ? 1 : 0;
        }
        // classical equality recursion x_{n+1} = C + L sum a_m x_m
        const double C = rng.uniform(0.5, 2.0);
        const double L = rng.uniform(0.1, 1.0);
        std::vector<double> a(static_cast<std::size_t>(horizon) + 1), x(static_cast<std::size_t>(horizon) + 1);
        x[0] = C * rng.u01();
        double acc = 0.0;
        for (std::size_t n = 0; n + 1 <= static_cast<std::size_t>(horizon); ++n) {
            a[n] = rng.uniform(0.0, 2.0) / static_cast<double>(n + 1);
            acc += a[n] * x[n];
            x[n + 1] = C + L * acc;
        }
        const aoisim::ClassicalGronwallReport crep = aoisim::classical_gronwall_check(x, a, C, L);
        classical_ok += (crep.hypothesis_ok && crep.conclusion_ok) ? 1 : 0;
    }
    const bool pass = bound_ok == threshold_found && hypothesis_ok == random_count &&
                      classical_ok == random_count;
    aoisim::Summary summary;
    summary.add("command", "verify-gronwall");
    summary.add("instances", static_cast<std::int64_t>(random_count));
    summary.add("horizon", horizon);
    summary.add("seed", std::to_string(seed));
    summary.add("hypothesis_ok", static_cast<std::int64_t>(hypothesis_ok));
    summary.add("threshold_found", static_cast<std::int64_t>(threshold_found));
    summary.add("bound_ok", static_cast<std::int64_t>(bound_ok));
    summary.add("classical_ok", static_cast<std::int64_t>(classical_ok));
    summary.add_bool("pass", pass);
    if (format != "csv") aoisim::atomic_write(join_path(out_dir, "gronwall_report.txt"), summary.to_string());
    return pass ? kExitOk : kExitVerify;
}

int cmd_sgd(const CommonOpts& opts) {
    aoisim::ExperimentConfig cfg;
    if (!load_config(opts, cfg)) return kExitConfig;

    const aoisim::SgdExperimentSpec spec = cfg.make_sgd_spec();
    const aoisim::SgdReport report =
        aoisim::run_sgd_experiment(spec, cfg.analysis.error_tolerance, cfg.config_hash());

    aoisim::CsvTable table({"seed", "verdict", "final_error", "max_norm", "final_window_sum",
                            "max_delta_tail"});
    for (const auto& o : report.per_seed)
        table.add_row({std::to_string(o.seed), status_name(o.status), aoisim::CsvTable::num(o.final_error),
                       aoisim::CsvTable::num(o.max_norm), aoisim::CsvTable::num(o.final_window_sum),
                       aoisim::CsvTable::num(o.max_delta_tail)});

    aoisim::Summary summary;
    summary.add("command", "sgd");
    summary.add("config_hash", report.config_hash);
    summary.add("replications", static_cast<std::int64_t>(report.per_seed.size()));
    std::ostringstream xs;
    xs << report.x_star.transpose();
    summary.add("x_star", xs.str());
    summary.add("median_final_error", report.median_final_error);
    summary.add("max_final_error", report.max_final_error);
    summary.add("max_norm_overall", report.max_norm_overall);
    summary.add("diverged_count", static_cast<std::int64_t>(report.diverged_count));
    summary.add("error_tolerance", report.tolerance);
    summary.add_bool("pass", report.pass);
    if (want_summary(cfg))
        aoisim::atomic_write(join_path(cfg.output.directory, "sgd_report.txt"), summary.to_string());
    if (want_csv(cfg))
        aoisim::atomic_write(join_path(cfg.output.directory, "sgd_seeds.csv"), table.to_string());
    if (report.diverged_count > 0) return kExitDivergence;
    return report.pass ? kExitOk : kExitVerify;
}

int cmd_momentum(const CommonOpts& opts) {
    aoisim::ExperimentConfig cfg;
    if (!load_config(opts, cfg)) return kExitConfig;

    const aoisim::MomentumExperimentSpec spec = cfg.make_momentum_spec();
    const aoisim::MomentumReport report =
        aoisim::run_momentum_experiment(spec, cfg.analysis.twin_tolerance, cfg.config_hash());

    aoisim::CsvTable table({"seed", "verdict", "final_error", "max_norm", "final_window_sum",
                            "max_delta_tail"});
    for (const auto& o : report.per_seed)
        table.add_row({std::to_string(o.seed), status_name(o.status), aoisim::CsvTable::num(o.final_error),
                       aoisim::CsvTable::num(o.max_norm), aoisim::CsvTable::num(o.final_window_sum),
                       aoisim::CsvTable::num(o.max_delta_tail)});

    aoisim::Summary summary;
    summary.add("command", "momentum");
    summary.add("config_hash", report.config_hash);
    summary.add("replications", static_cast<std::int64_t>(report.per_seed.size()));
    summary.add("beta", cfg.run_spec.beta);
    summary.add("max_twin_gap", report.max_twin_gap);
    summary.add("max_delta_tail", report.max_delta_tail);
    summary.add("diverged_count", static_cast<std::int64_t>(report.diverged_count));
    summary.add("twin_tolerance", report.tolerance);
    summary.add_bool("pass", report.pass);
    if (want_summary(cfg))
        aoisim::atomic_write(join_path(cfg.output.directory, "momentum_report.txt"), summary.to_string());
    if (want_csv(cfg))
        aoisim::atomic_write(join_path(cfg.output.directory, "momentum_seeds.csv"), table.to_string());
    if (report.diverged_count > 0) return kExitDivergence;
    return report.pass ? kExitOk : kExitVerify;
}

int cmd_track(const CommonOpts& opts) {
    aoisim::ExperimentConfig cfg;
    if (!load_config(opts, cfg)) return kExitConfig;

    aoisim::SimConfig sim = cfg.make_sim_config();
    const aoisim::SimHistory hist = aoisim::run(sim);
    if (hist.verdict().status != aoisim::RunStatus::completed) {
        std::cerr << "run did not complete: " << status_name(hist.verdict().status) << " at n="
                  << hist.verdict().at << "\n";
        return kExitDivergence;
    }
    aoisim::TimeAxis axis(sim.schedule, cfg.schedule.segment_length);
    const aoisim::RescaledPath path = aoisim::build_rescaled(hist, axis);

    aoisim::CsvTable table({"m", "t_start", "t_end", "n_start", "n_end", "sup_error"});
    std::vector<double> errors;
    for (std::int64_t m = 0; m <= path.last_segment(); ++m) {
        const aoisim::SegmentBounds seg = axis.segment_bounds(m);
        const double err = aoisim::tracking_error(path, m);
        errors.push_back(err);
        table.add_row({aoisim::CsvTable::num(m), aoisim::CsvTable::num(seg.t_start),
                       aoisim::CsvTable::num(seg.t_end), aoisim::CsvTable::num(seg.n_start),
                       aoisim::CsvTable::num(seg.n_end), aoisim::CsvTable::num(err)});
    }
    bool monotone = true;
    for (std::size_t m = static_cast<std::size_t>(cfg.analysis.segment_burn_in) + 1; m < errors.size(); ++m)
        if (errors[m] > cfg.analysis.tracking_slack * errors[m - 1]) monotone = false;
    const double final_error = errors.empty() ? 0.0 : errors.back();
    const bool pass = monotone && final_error < cfg.analysis.tracking_tolerance && !errors.empty();

    aoisim::Summary summary;
    summary.add("command", "track");
    summary.add("config_hash", cfg.config_hash());
    summary.add("segments", static_cast<std::int64_t>(errors.size()));
    summary.add("segment_burn_in", cfg.analysis.segment_burn_in);
    summary.add("tracking_slack", cfg.analysis.tracking_slack);
    summary.add("tracking_tolerance", cfg.analysis.tracking_tolerance);
    summary.add("final_segment_error", final_error);
    summary.add_bool("monotone_after_burn_in", monotone);
    summary.add_bool("pass", pass);
    if (want_summary(cfg))
        aoisim::atomic_write(join_path(cfg.output.directory, "track_report.txt"), summary.to_string());
    if (want_csv(cfg))
        aoisim::atomic_write(join_path(cfg.output.directory, "track_segments.csv"), table.to_string());
    return pass ? kExitOk : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"distributed stochastic approximation under information delays"};
    app.require_subcommand(1);

    CommonOpts run_opts, aoi_opts, window_opts, gronwall_opts, sgd_opts, momentum_opts, track_opts;
    int gronwall_random = 1000;
    std::int64_t gronwall_horizon = 500;

    auto* c_run = app.add_subcommand("run", "execute the configured iteration and export histories");
    add_common(c_run, run_opts);
    auto* c_aoi = app.add_subcommand("verify-aoi", "empirical fraction-exceedance check for delay paths");
    add_common(c_aoi, aoi_opts);
    auto* c_window = app.add_subcommand("verify-window", "stepsize-over-age window sum decay check");
    add_common(c_window, window_opts);
    auto* c_gronwall = app.add_subcommand("verify-gronwall",
                                          "randomized equality-recursion check of the Gronwall bounds");
    add_common(c_gronwall, gronwall_opts, /*config_required=*/false);
    c_gronwall->add_option("--random", gronwall_random, "number of randomized instances");
    c_gronwall->add_option("--gronwall-horizon", gronwall_horizon, "instance horizon");
    auto* c_sgd = app.add_subcommand("sgd", "distributed SGD experiment on the quadratic objective");
    add_common(c_sgd, sgd_opts);
    auto* c_momentum = app.add_subcommand("momentum", "heavy-ball vs plain twin experiment");
    add_common(c_momentum, momentum_opts);
    auto* c_track = app.add_subcommand("track", "segment-wise ODE tracking error of a run");
    add_common(c_track, track_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (c_run->parsed()) return cmd_run(run_opts);
        if (c_aoi->parsed()) return cmd_verify_aoi(aoi_opts);
        if (c_window->parsed()) return cmd_verify_window(window_opts);
        if (c_gronwall->parsed()) return cmd_verify_gronwall(gronwall_opts, gronwall_random, gronwall_horizon);
        if (c_sgd->parsed()) return cmd_sgd(sgd_opts);
        if (c_momentum->parsed()) return cmd_momentum(momentum_opts);
        if (c_track->parsed()) return cmd_track(track_opts);
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitInternal;
}
