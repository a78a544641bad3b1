#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "aoisim/aoi.hpp"
#include "aoisim/engine.hpp"
#include "aoisim/ode.hpp"
#include "aoisim/schedule.hpp"

namespace aoisim {

/// Piecewise-linear interpolation of a recorded trajectory over the time
/// axis: xbar(t(n)) = x_n exactly at the knots.
class InterpolatedPath {
public:
    InterpolatedPath(const SimHistory& history, const TimeAxis& axis);

    Eigen::VectorXd at(double t) const;
    double end_time() const;  // t(N)
    const TimeAxis& axis() const { return *axis_; }
    const SimHistory& history() const { return *hist_; }

private:
    const SimHistory* hist_;
    const TimeAxis* axis_;
};

/// Segment-rescaled view of a run: the scaling sequence
///   s(m) = max(sup_{l<=m} ||xbar(T_l)||, 1)
/// is monotone non-decreasing, xhat(t) = xbar(t)/s(m) on [T_m, T_{m+1}), and
/// the rescaled noise accumulates into zeta_n = sum_{k<n} a(k) Mhat_{k+1}.
class RescaledPath {
public:
    RescaledPath(const SimHistory& history, const TimeAxis& axis);

    const std::vector<double>& scaling() const { return s_; }
    double scaling_at(std::int64_t m) const { return s_[static_cast<std::size_t>(m)]; }
    std::int64_t last_segment() const { return last_segment_; }  // largest m with n(m+1) <= N

    Eigen::VectorXd x_hat(double t) const;                       // scaling chosen by m(t)
    Eigen::VectorXd x_hat_on_segment(std::int64_t m, double t) const;  // scaling pinned to s(m)

    Eigen::VectorXd e_hat(std::int64_t n) const;   // e_n / s(m(n))
    Eigen::VectorXd m_hat(std::int64_t n) const;   // M_n / s(m(n-1)), n >= 2
    Eigen::VectorXd zeta_hat(std::int64_t n) const { return zeta_.col(n - 1); }

    const InterpolatedPath& interpolated() const { return path_; }
    const SimHistory& history() const { return *hist_; }
    const TimeAxis& axis() const { return *axis_; }

private:
    const SimHistory* hist_;
    const TimeAxis* axis_;
    InterpolatedPath path_;
    std::vector<double> s_;
    std::int64_t last_segment_ = 0;
    Eigen::MatrixXd zeta_;  // col n-1 = zeta_n
};

RescaledPath build_rescaled(const SimHistory& history, const TimeAxis& axis);

/// sup_{t in [T_m, T_{m+1}]} ||xhat(t) - x^m(t)|| where x^m solves
/// x' = h_{s(m)}(x) from x^m(T_m) = xhat(T_m). The supremum is taken over
/// the union of trajectory and integrator knots; dt <= 0 selects the default
/// min(1e-2, smallest a(n) in the segment)/2.
double tracking_error(const RescaledPath& path, std::int64_t m, double dt = 0.0);

// --- lemma-style empirical verifiers ---------------------------------------

struct AoiLemmaReport {
    std::optional<std::int64_t> last_exceedance;
    std::int64_t length = 0;
    bool pass = false;  // last exceedance strictly below the given limit
};

AoiLemmaReport verify_lemma_aoi(const AoiTrace& trace, double p, double eps, std::int64_t exceedance_limit);

struct WindowDecade {
    std::int64_t start = 0;  // decade covers [start, min(10*start, N+1))
    double max_window = 0.0;
};

struct WindowLemmaReport {
    std::vector<WindowDecade> decades;
    bool monotone_after_burnin = false;
    double final_decade_max = 0.0;
    bool pass = false;
};

/// Decade maxima of sum_{k=n-tau(n)}^{n-1} a(k) over the trace; pass iff the
/// maxima are non-increasing across decades starting at or after `burn_in`
/// and the final decade stays below `tolerance`.
WindowLemmaReport verify_lemma_window(const AoiTrace& trace, const StepSchedule& schedule,
                                      std::int64_t burn_in, double tolerance);

struct NoiseProbeReport {
    double tail_oscillation = 0.0;  // bounding-box diagonal of zeta over the window
    double bound = 0.0;             // factor * sqrt(tail sum of a^2) * empirical noise scale
    bool pass = false;
};

/// Cauchy-style diagnostic for the accumulated rescaled noise over
/// n in [window_lo, window_hi].
NoiseProbeReport noise_convergence_probe(const RescaledPath& path, std::int64_t window_lo,
                                         std::int64_t window_hi, double factor = 10.0);

/// Integrates x' = h_c(x) from uniformly random unit-sphere starts and
/// reports the first time ||x(t)|| < 1/2 (NaN if not reached by t_max).
std::vector<double> unit_ball_entry_probe(const DriftField& field, double c, int samples, double dt,
                                          double t_max, std::uint64_t seed);

/// Pointwise max of several realized delay paths. This is an
/// across-replication empirical envelope; it is NOT the deterministic
/// almost-uniform bound used in the theory, and is labeled accordingly in
/// reports.
std::vector<std::int64_t> empirical_delay_envelope(const std::vector<AoiTrace>& traces);

}  // namespace aoisim
