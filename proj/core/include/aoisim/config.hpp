#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aoisim/engine.hpp"
#include "aoisim/experiments.hpp"

namespace aoisim {

struct ConfigError {
    std::string where;  // "file:line", "[section]" or "[section] key"
    std::string message;
    std::string to_string() const { return where.empty() ? message : where + ": " + message; }
};

/// Experiment configuration: a plain-text document of [section] headers and
/// key = value lines ('#' starts a comment). The full grammar is documented
/// in the project README. Parsing validates the schema (unknown sections and
/// keys are rejected) and cross-field consistency, and reports every problem
/// found, not just the first.
class ExperimentConfig {
public:
    struct DriftSpec {
        std::string kind = "linear";
        std::vector<int> block_dims{1};
        double gain = 1.0;
        std::optional<Eigen::MatrixXd> matrix;
        std::optional<Eigen::VectorXd> offset;
        double kappa = 0.0;
        std::string base_kind = "linear";
        double base_gain = 1.0;
        std::optional<Eigen::MatrixXd> base_matrix;
        std::optional<Eigen::VectorXd> base_offset;
        std::vector<double> table_x, table_h;
    };
    struct NoiseSpec {
        std::string kind = "zero";
        double scale = 0.0;
    };
    struct ObjectiveSpec {
        bool present = false;
        std::optional<Eigen::MatrixXd> a_mean, a_spread;
        std::optional<Eigen::VectorXd> b_mean, b_spread;
    };
    struct DelaysSpec {
        AoiModel fill = AoiModel::zero();          // off-diagonal default
        std::optional<AoiModel> diagonal;          // defaults to zero
        std::map<std::pair<int, int>, AoiModel> overrides;
        double declared_p = 1.0;
    };
    struct ScheduleSpec {
        std::string regime = "harmonic";
        double a = 1.0;
        std::optional<double> q;
        std::optional<double> p;  // defaults to delays.declared_p
        double segment_length = 1.0;
    };
    struct RunSpec {
        std::string variant = "plain";
        double beta = 0.0;
        std::int64_t horizon = 1000;
        int replications = 1;
        std::uint64_t seed = 1;
        std::optional<Eigen::VectorXd> x1;  // defaults to ones
        double divergence_threshold = 1e12;
        std::string momentum_tau = "log";
        std::optional<std::int64_t> history_cap;
    };
    struct AnalysisSpec {
        double epsilon = 0.05;
        std::int64_t exceedance_limit = 0;  // 0 means "the horizon"
        double window_tolerance = 0.05;
        std::int64_t burn_in = 1000;
        double tracking_tolerance = 0.1;
        double tracking_slack = 1.2;
        std::int64_t segment_burn_in = 5;
        std::int64_t delta_burn_in = 1000;
        double error_tolerance = 1e-2;
        double twin_tolerance = 1e-2;
        double noise_probe_factor = 10.0;
    };
    struct OutputSpec {
        std::string directory = "out";
        std::string format = "both";  // csv | summary | both
    };

    DriftSpec drift;
    NoiseSpec noise;
    ObjectiveSpec objective;
    DelaysSpec delays;
    ScheduleSpec schedule;
    RunSpec run_spec;
    AnalysisSpec analysis;
    OutputSpec output;

    static std::vector<ConfigError> parse_file(const std::string& path, ExperimentConfig& out);
    static std::vector<ConfigError> parse_string(const std::string& text, const std::string& origin,
                                                 ExperimentConfig& out);

    // resolved objects (throw std::invalid_argument on inconsistencies that
    // validation should already have caught)
    std::shared_ptr<const DriftField> make_drift() const;
    NoiseModel make_noise() const;
    std::shared_ptr<const QuadraticObjective> make_objective() const;
    std::vector<AoiModel> make_delay_matrix() const;
    StepSchedule make_schedule() const;
    SimConfig make_sim_config() const;
    SgdExperimentSpec make_sgd_spec() const;
    MomentumExperimentSpec make_momentum_spec() const;

    int dimension() const;
    double resolved_p() const { return schedule.p.value_or(delays.declared_p); }

    /// Deterministic key=value dump of the effective configuration.
    std::string canonical_string() const;
    std::string config_hash() const;
};

/// Parses a delay-model spec such as "bernoulli-refresh(q=0.5)" or "zero".
/// Returns errors instead of throwing so callers can aggregate.
std::optional<AoiModel> parse_aoi_model(const std::string& text, std::string* error);

}  // namespace aoisim
