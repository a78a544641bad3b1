#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aoisim/rng.hpp"

namespace aoisim {

/// Catalog of delay process models. Every model realizes an age-of-information
/// path tau(1), tau(2), ... on the non-negative integers with the two path
/// properties
///   tau(n+1) <= tau(n) + 1          (unit growth)
///   n - tau(n) monotonically non-decreasing (freshness index)
enum class AoiKind {
    zero,              ///< tau == 0
    constant,          ///< tau == c
    bounded_uniform,   ///< renewal ages with gaps uniform on {1..B+1}; ages <= B
    bernoulli_refresh, ///< reset to 0 with probability q each step, else +1
    pareto_refresh,    ///< renewal ages with Pareto-tailed gaps, age tail index alpha
    walk_with_reset,   ///< reflected +/-1 random walk, reset to 0 with probability q
    scripted,          ///< replay of a fixed path
};

struct AoiModel {
    AoiKind kind = AoiKind::zero;
    double q = 0.0;              // refresh/reset probability
    double alpha = 0.0;          // tail index of the dominating age variable
    std::int64_t c = 0;          // constant age
    std::int64_t bound = 0;      // max age for bounded_uniform
    std::vector<std::int64_t> script;  // scripted path, tau(n) at script[n-1]
    std::uint64_t seed_offset = 0;     // per-pair stream offset

    static AoiModel zero();
    static AoiModel constant(std::int64_t c);
    static AoiModel bounded_uniform(std::int64_t max_age);
    static AoiModel bernoulli_refresh(double q);
    static AoiModel pareto_refresh(double alpha);
    static AoiModel walk_with_reset(double q);
    static AoiModel scripted(std::vector<std::int64_t> path);

    /// Short human-readable id, e.g. "bernoulli-refresh(q=0.5)".
    std::string id() const;
};

/// Stateful single-path generator. next() emits tau(1), tau(2), ... in order.
/// Distinct generators (different seeds or pair offsets) are independent.
class AoiGenerator {
public:
    AoiGenerator(const AoiModel& model, std::uint64_t master_seed);

    std::int64_t next();
    std::int64_t time() const { return n_; }  // index of the last emitted value

private:
    AoiModel model_;
    Rng rng_;
    std::int64_t n_ = 0;
    std::int64_t age_ = 0;
    std::int64_t remaining_ = 0;  // steps left in the current renewal gap
};

struct AoiTrace {
    std::vector<std::int64_t> values;  // values[k] = tau(k+1)
    std::string model_id;
    std::uint64_t seed = 0;

    std::int64_t tau(std::int64_t n) const { return values[static_cast<std::size_t>(n - 1)]; }
    std::int64_t length() const { return static_cast<std::int64_t>(values.size()); }
};

AoiTrace generate_trace(const AoiModel& model, std::uint64_t master_seed, std::int64_t length);

/// Checks the two AoIP path properties and non-negativity. On failure returns
/// false and, if given, stores a message naming the first offending index.
bool validate_aoip(const std::vector<std::int64_t>& path, std::string* why = nullptr);

/// Loads a scripted path from a plain-text file, one non-negative integer per
/// line, n=1 at line 1. Throws std::runtime_error on malformed content or on
/// a path property violation.
AoiTrace load_scripted_trace(const std::string& file_path);

/// (1/N) sum_n tau(n)^p. Throws std::invalid_argument for p <= 0 or an empty trace.
double empirical_moment(const AoiTrace& trace, double p);

/// Largest n with tau(n) > eps*n (p <= 1) or tau(n) > eps*n^(1/p) (p > 1);
/// nullopt when the bound holds over the whole trace. eps must lie in (0,1).
std::optional<std::int64_t> fraction_exceedance(const AoiTrace& trace, double eps, double p);

}  // namespace aoisim
