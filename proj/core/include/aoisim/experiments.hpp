#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "aoisim/aoi.hpp"
#include "aoisim/engine.hpp"
#include "aoisim/noise.hpp"
#include "aoisim/objective.hpp"
#include "aoisim/schedule.hpp"

namespace aoisim {

struct SeedOutcome {
    std::uint64_t seed = 0;       // replication seed (derived from the master seed)
    RunStatus status = RunStatus::completed;
    double final_error = 0.0;     // ||x_N - x*|| (SGD) or twin gap (momentum)
    double max_norm = 0.0;        // max_n ||x_n||
    double final_window_sum = 0.0;
    double max_delta_tail = 0.0;  // max_n>=n0 ||delta_n|| (momentum only)
};

struct SgdExperimentSpec {
    std::shared_ptr<const QuadraticObjective> objective;
    std::vector<int> block_dims;
    std::vector<AoiModel> delays;  // D x D
    StepSchedule schedule = StepSchedule::harmonic(1.0, 1.0);
    std::int64_t horizon = 100000;
    int replications = 20;
    std::uint64_t master_seed = 1;
    Eigen::VectorXd x1;
    double divergence_threshold = 1e12;
};

struct SgdReport {
    Eigen::VectorXd x_star;
    std::vector<SeedOutcome> per_seed;  // in replication order
    double median_final_error = 0.0;
    double max_final_error = 0.0;
    double max_norm_overall = 0.0;
    int diverged_count = 0;
    double tolerance = 0.0;  // pass threshold on the median error
    bool pass = false;
    std::string config_hash;
};

/// Runs all replications (concurrently, reduced in seed order) of the
/// distributed SGD iteration on the quadratic objective and aggregates
/// per-seed outcomes. x* solves (E[A]+E[A]^T) x* = -E[b] and is verified to
/// be a drift zero before any run starts.
SgdReport run_sgd_experiment(const SgdExperimentSpec& spec, double error_tolerance,
                             const std::string& config_hash = "");

struct MomentumExperimentSpec {
    std::shared_ptr<const DriftField> drift;
    NoiseModel noise;
    /// Optional sampling objective; when set, g(x_n) is a sampled gradient
    /// and the plain twin runs the matching one-agent SGD iteration.
    std::shared_ptr<const QuadraticObjective> objective;
    double beta = 0.9;
    StepSchedule schedule = StepSchedule::harmonic(1.0, 1.0);
    std::int64_t horizon = 100000;
    int replications = 20;
    std::uint64_t master_seed = 1;
    Eigen::VectorXd x1;
    std::int64_t delta_burn_in = 1000;  // max ||delta_n|| reported over n >= this
    double divergence_threshold = 1e12;
};

struct MomentumReport {
    std::vector<SeedOutcome> per_seed;  // final_error = ||x^hb_N - x^plain_N||
    double max_twin_gap = 0.0;
    double max_delta_tail = 0.0;
    int diverged_count = 0;
    double tolerance = 0.0;  // pass threshold on the twin gap
    bool pass = false;
    std::string config_hash;
};

/// Runs heavy-ball and plain-SA twins on shared seeds (identical noise
/// streams) and reports final-iterate gaps plus the delta_n tail profile.
MomentumReport run_momentum_experiment(const MomentumExperimentSpec& spec, double gap_tolerance,
                                       const std::string& config_hash = "");

/// FNV-1a hash of a canonical config string, hex-encoded; embedded in every
/// report so results are traceable to inputs.
std::string fnv1a_hex(const std::string& text);

}  // namespace aoisim
