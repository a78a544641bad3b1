#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <vector>

#include "aoisim/aoi.hpp"
#include "aoisim/drift.hpp"
#include "aoisim/noise.hpp"
#include "aoisim/objective.hpp"
#include "aoisim/schedule.hpp"

namespace aoisim {

enum class Variant { plain, heavy_ball };

/// Deterministic age sequence used by the heavy-ball split:
/// log_time gives ceil(n / log(n+1)); stepsize_sum gives ceil(n / sum a(k)).
enum class MomentumTauKind { log_time, stepsize_sum };

std::int64_t momentum_tau(std::int64_t n, MomentumTauKind kind, const StepSchedule* schedule = nullptr);

struct SimConfig {
    std::shared_ptr<const DriftField> drift;
    NoiseModel noise;
    /// When set, drift samples come from the objective (distributed SGD);
    /// the recorded noise is the sample deviation from the mean drift.
    std::shared_ptr<const StochasticObjective> objective;
    std::vector<AoiModel> delays;  // row-major D x D
    StepSchedule schedule = StepSchedule::harmonic(1.0, 1.0);
    std::int64_t horizon = 1;
    Eigen::VectorXd x1;
    std::uint64_t seed = 0;
    Variant variant = Variant::plain;
    double beta = 0.0;
    MomentumTauKind momentum_tau_kind = MomentumTauKind::log_time;
    /// When set, only the last `history_cap` states are retained during the
    /// run; a delayed read older than the cap aborts the run (never clamps).
    std::optional<std::int64_t> history_cap;
    double divergence_threshold = 1e12;

    void validate() const;  // throws std::invalid_argument listing the problem
};

enum class RunStatus { completed, diverged, cap_exceeded };

struct Verdict {
    RunStatus status = RunStatus::completed;
    std::int64_t at = 0;  // iteration index for diverged/cap_exceeded
};

/// Full record of one run: trajectory, realized ages, realized noise, drift
/// errors, and (heavy-ball) momentum internals. Replaying the same config
/// and seed reproduces the history bit-identically.
class SimHistory {
public:
    const SimConfig& config() const { return config_; }
    const Verdict& verdict() const { return verdict_; }

    std::int64_t horizon() const { return recorded_; }        // states actually recorded
    int dimension() const { return static_cast<int>(x_.rows()); }
    int block_count() const { return static_cast<int>(config_.drift->block_count()); }

    // 1-based accessors mirroring the iteration indices
    Eigen::VectorXd x(std::int64_t n) const { return x_.col(n - 1); }
    std::int64_t tau(int i, int j, std::int64_t n) const;      // realized tau_ij(n)
    std::int64_t read_index(int i, int j, std::int64_t n) const;  // max(1, n - tau_ij(n))
    Eigen::VectorXd noise(std::int64_t n) const;               // M_n, n >= 2
    Eigen::VectorXd drift_error(std::int64_t n) const { return e_.col(n - 1); }  // e_n
    double e_norm(std::int64_t n) const { return e_.col(n - 1).norm(); }

    // heavy-ball internals (throw unless variant == heavy_ball)
    Eigen::VectorXd momentum(std::int64_t n) const;   // m_n
    Eigen::VectorXd g_value(std::int64_t n) const;    // g(x_n) = h(x_n) + M_{n+1}
    Eigen::VectorXd h_value(std::int64_t n) const;    // h(x_n)
    Eigen::VectorXd delta(std::int64_t n) const;      // tail error delta_n
    double delta_norm(std::int64_t n) const;
    double c_value(std::int64_t n) const;             // c(n)

    double max_norm() const;  // max_n ||x_n|| over the recorded trajectory

    /// CSV schema: n, x_1..x_d, tau_1_1..tau_D_D, e_norm, step and, for
    /// heavy-ball runs, m_1..m_d, delta_norm, c_n. Header row mandatory.
    void write_csv(std::ostream& os) const;

    /// Wraps an externally supplied trajectory (columns = states) so the
    /// analysis machinery can run on it; ages and drift errors are zero,
    /// noise columns may be supplied (column n-1 holds M_{n+1}).
    static SimHistory from_states(SimConfig config, Eigen::MatrixXd states,
                                  std::optional<Eigen::MatrixXd> noise = std::nullopt);

private:
    friend struct EngineImpl;
    SimConfig config_;
    Verdict verdict_;
    std::int64_t recorded_ = 0;
    Eigen::MatrixXd x_;      // col n-1 = x_n
    Eigen::MatrixXd noise_;  // col n-1 = M_{n+1}
    Eigen::MatrixXd e_;      // col n-1 = e_n
    std::vector<std::int64_t> tau_;  // [(i*D+j)*N + (n-1)]
    // heavy-ball series
    Eigen::MatrixXd m_, g_, h_, delta_;
    std::vector<double> c_;
};

/// Executes the configured variant to the horizon or to divergence.
/// Deterministic for a given config; never throws for runtime outcomes
/// (divergence and cap overruns are verdicts).
SimHistory run(const SimConfig& config);

struct MomentumSplit {
    Eigen::VectorXd window;  // (1-beta) * sum_{i=max(1,n-tau(n))}^{n} beta^{n-i} g_i
    Eigen::VectorXd delta;   // (1/c(n)) * sum_{i=1}^{n-tau(n)-1} beta^{n-i} g_i
    double c = 0.0;          // c(n)
    std::int64_t tau = 0;    // tau(n)
};

/// Direct-summation split of the heavy-ball moving average at index n;
/// window + (1-beta)*c(n)*delta reconstructs m_n exactly. g holds
/// g(x_1)..g(x_N) as columns.
MomentumSplit momentum_split(const Eigen::MatrixXd& g, std::int64_t n, double beta,
                             MomentumTauKind kind = MomentumTauKind::log_time,
                             const StepSchedule* schedule = nullptr);

}  // namespace aoisim
