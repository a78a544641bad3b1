#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "aoisim/rng.hpp"
#include "aoisim/schedule.hpp"

namespace aoisim {

/// Instance of the Gronwall-type recurrence with a varying lower summation
/// limit. Sequences are 1-based (entry n lives at index n-1) over
/// n = 1..horizon:
///   hypothesis   y_n <= b_n c_n + C * sum_{k=n-Delta_n}^{n-1} a_k y_k
///   conclusion   y_n <= c_n ( b_n + B C e^{C t(N)} sum_{k=n-Delta_n}^{n-1} a_k )
/// with t(n) the time axis of the a-sequence and N the threshold index below.
/// Window sums clamp their lower limit at 1; Delta_n = 0 gives the empty sum.
struct GronwallInstance {
    std::vector<double> y;
    std::vector<double> a;              // a_n >= 0 (zeros allowed)
    std::vector<double> b;
    std::vector<double> c;              // monotone non-decreasing, non-negative
    std::vector<std::int64_t> delta;    // Delta_n >= 0
    double C = 1.0;
    double B = 0.0;  // >= sup_n b_n

    std::int64_t horizon() const { return static_cast<std::int64_t>(y.size()); }
    double window_sum(std::int64_t n) const;  // sum_{k=max(1,n-Delta_n)}^{n-1} a_k
    double time_instant(std::int64_t n) const;
    void validate() const;  // shape/sign/monotonicity checks, throws
};

/// Smallest N in [0, horizon] with
///   C * window_sum(n) <= 1 - e^{-C t(N)}  for all n in [max(N,1), horizon];
/// nullopt when no such N exists within the horizon.
std::optional<std::int64_t> gronwall_threshold(const GronwallInstance& inst);

struct GronwallReport {
    bool hypothesis_ok = false;
    std::int64_t first_hypothesis_violation = 0;  // 0 when none
    std::optional<std::int64_t> threshold;
    bool bound_ok = false;  // meaningful only when hypothesis_ok && threshold
    std::int64_t first_bound_violation = 0;
    bool corollary_trend = false;  // y_n/c_n shrinking (diagnostic only)
};

/// Verifies the hypothesis first (violations are reported, not treated as
/// bound failures), finds the threshold, then checks the conclusion for all
/// n >= max(N,1) with the given relative roundoff slack.
GronwallReport gronwall_bound_check(const GronwallInstance& inst, double rel_slack = 1e-9);

struct ClassicalGronwallReport {
    bool hypothesis_ok = false;
    std::int64_t first_hypothesis_violation = 0;
    bool conclusion_ok = false;
    std::int64_t first_conclusion_violation = 0;
};

/// Discrete Gronwall inequality: given 0-based sequences x_0..x_H and
/// a_0..a_H with x_{n+1} <= C + L sum_{m<=n} a_m x_m for all n, checks
/// x_{n+1} <= C exp(L sum_{m<=n} a_m) elementwise.
ClassicalGronwallReport classical_gronwall_check(const std::vector<double>& x,
                                                 const std::vector<double>& a, double C, double L,
                                                 double rel_slack = 1e-9);

struct GronwallInstanceParams {
    std::int64_t horizon = 500;
    double c_min = 0.1, c_max = 2.0;        // C range
    double refresh_min = 0.1, refresh_max = 0.9;  // bernoulli-refresh q for Delta paths
    double b_scale = 1.0;
    double a_scale_min = 0.5, a_scale_max = 1.5;
};

/// Randomized instance whose y is defined by running the hypothesis
/// recursion WITH EQUALITY, so the hypothesis holds by construction.
GronwallInstance make_equality_instance(Rng& rng, const GronwallInstanceParams& params);

}  // namespace aoisim
