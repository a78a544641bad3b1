#include "aoisim/aoi.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace aoisim {

namespace {

std::string format_param(const char* name, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s=%g", name, v);
    return buf;
}

}  // namespace

AoiModel AoiModel::zero() { return AoiModel{}; }

AoiModel AoiModel::constant(std::int64_t c) {
    if (c < 0) throw std::invalid_argument("constant delay must be non-negative");
    AoiModel m;
    m.kind = AoiKind::constant;
    m.c = c;
    return m;
}

AoiModel AoiModel::bounded_uniform(std::int64_t max_age) {
    if (max_age < 0) throw std::invalid_argument("bounded-uniform bound must be non-negative");
    AoiModel m;
    m.kind = AoiKind::bounded_uniform;
    m.bound = max_age;
    return m;
}

AoiModel AoiModel::bernoulli_refresh(double q) {
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("bernoulli-refresh q must lie in [0,1]");
    AoiModel m;
    m.kind = AoiKind::bernoulli_refresh;
    m.q = q;
    return m;
}

AoiModel AoiModel::pareto_refresh(double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("pareto-refresh alpha must be positive");
    AoiModel m;
    m.kind = AoiKind::pareto_refresh;
    m.alpha = alpha;
    return m;
}

AoiModel AoiModel::walk_with_reset(double q) {
    if (!(q > 0.0 && q <= 1.0)) throw std::invalid_argument("walk-with-reset q must lie in (0,1]");
    AoiModel m;
    m.kind = AoiKind::walk_with_reset;
    m.q = q;
    return m;
}

AoiModel AoiModel::scripted(std::vector<std::int64_t> path) {
    std::string why;
    if (!validate_aoip(path, &why)) throw std::invalid_argument("scripted path invalid: " + why);
    AoiModel m;
    m.kind = AoiKind::scripted;
    m.script = std::move(path);
    return m;
}

std::string AoiModel::id() const {
    switch (kind) {
        case AoiKind::zero: return "zero";
        case AoiKind::constant: return "constant(c=" + std::to_string(c) + ")";
        case AoiKind::bounded_uniform: return "bounded-uniform(B=" + std::to_string(bound) + ")";
        case AoiKind::bernoulli_refresh: return "bernoulli-refresh(" + format_param("q", q) + ")";
        case AoiKind::pareto_refresh: return "pareto-refresh(" + format_param("alpha", alpha) + ")";
        case AoiKind::walk_with_reset: return "walk-with-reset(" + format_param("q", q) + ")";
        case AoiKind::scripted: return "scripted(n=" + std::to_string(script.size()) + ")";
    }
    return "?";
}

AoiGenerator::AoiGenerator(const AoiModel& model, std::uint64_t master_seed)
    : model_(model), rng_(derive_stream(master_seed, kStreamAoi, model.seed_offset)) {}

std::int64_t AoiGenerator::next() {
    ++n_;
    switch (model_.kind) {
        case AoiKind::zero:
            age_ = 0;
            break;
        case AoiKind::constant:
            age_ = model_.c;
            break;
        case AoiKind::bernoulli_refresh:
            age_ = rng_.bernoulli(model_.q) ? 0 : age_ + 1;
            break;
        case AoiKind::walk_with_reset:
            if (rng_.bernoulli(model_.q)) {
                age_ = 0;
            } else {
                age_ += rng_.bernoulli(0.5) ? 1 : -1;
                if (age_ < 0) age_ = 0;
            }
            break;
        case AoiKind::bounded_uniform:
        case AoiKind::pareto_refresh:
            // renewal structure: within a gap of length G the age runs 0..G-1
            if (remaining_ == 0) {
                std::int64_t gap;
                if (model_.kind == AoiKind::bounded_uniform) {
                    gap = 1 + static_cast<std::int64_t>(rng_.u01() * static_cast<double>(model_.bound + 1));
                    if (gap > model_.bound + 1) gap = model_.bound + 1;
                } else {
                    // P(G >= m) = m^-(1+alpha): the age of the induced renewal
                    // process is then uniformly dominated by a variable with
                    // tail index alpha (finite p-th moment for every p < alpha)
                    const double u = rng_.u01_open();
                    const double g = std::floor(std::pow(u, -1.0 / (1.0 + model_.alpha)));
                    gap = g > 9.0e18 ? static_cast<std::int64_t>(9e18) : static_cast<std::int64_t>(g);
                    if (gap < 1) gap = 1;
                }
                age_ = 0;
                remaining_ = gap - 1;
            } else {
                ++age_;
                --remaining_;
            }
            break;
        case AoiKind::scripted:
            if (n_ > static_cast<std::int64_t>(model_.script.size()))
                throw std::out_of_range("scripted path exhausted at n=" + std::to_string(n_));
            age_ = model_.script[static_cast<std::size_t>(n_ - 1)];
            break;
    }
    return age_;
}

AoiTrace generate_trace(const AoiModel& model, std::uint64_t master_seed, std::int64_t length) {
    if (length < 1) throw std::invalid_argument("trace length must be >= 1");
    AoiTrace trace;
    trace.model_id = model.id();
    trace.seed = master_seed;
    trace.values.resize(static_cast<std::size_t>(length));
    AoiGenerator gen(model, master_seed);
    for (std::int64_t n = 0; n < length; ++n) trace.values[static_cast<std::size_t>(n)] = gen.next();
    return trace;
}

bool validate_aoip(const std::vector<std::int64_t>& path, std::string* why) {
    for (std::size_t k = 0; k < path.size(); ++k) {
        if (path[k] < 0) {
            if (why) *why = "tau(" + std::to_string(k + 1) + ") negative";
            return false;
        }
        if (k > 0 && path[k] > path[k - 1] + 1) {
            if (why)
                *why = "unit growth violated at n=" + std::to_string(k + 1) + ": " +
                       std::to_string(path[k - 1]) + " -> " + std::to_string(path[k]);
            return false;
        }
    }
    return true;
}

AoiTrace load_scripted_trace(const std::string& file_path) {
    std::ifstream in(file_path);
    if (!in) throw std::runtime_error("cannot open scripted path file: " + file_path);
    std::vector<std::int64_t> values;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        // strip whitespace-only lines
        std::size_t a = line.find_first_not_of(" \t\r");
        if (a == std::string::npos) continue;
        std::size_t b = line.find_last_not_of(" \t\r");
        const std::string tok = line.substr(a, b - a + 1);
        try {
            std::size_t pos = 0;
            const long long v = std::stoll(tok, &pos);
            if (pos != tok.size()) throw std::invalid_argument("trailing characters");
            values.push_back(v);
        } catch (const std::exception&) {
            throw std::runtime_error(file_path + ":" + std::to_string(lineno) +
                                     ": expected one non-negative integer, got '" + tok + "'");
        }
    }
    if (values.empty()) throw std::runtime_error(file_path + ": empty scripted path");
    std::string why;
    if (!validate_aoip(values, &why))
        throw std::runtime_error(file_path + ": not a valid age process: " + why);
    AoiTrace trace;
    trace.model_id = "scripted(file=" + file_path + ")";
    trace.values = std::move(values);
    return trace;
}

double empirical_moment(const AoiTrace& trace, double p) {
    if (!(p > 0.0)) throw std::invalid_argument("moment order p must be positive");
    if (trace.values.empty()) throw std::invalid_argument("empty trace");
    double acc = 0.0;
    for (std::int64_t v : trace.values) acc += std::pow(static_cast<double>(v), p);
    return acc / static_cast<double>(trace.values.size());
}

std::optional<std::int64_t> fraction_exceedance(const AoiTrace& trace, double eps, double p) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0,1)");
    if (!(p > 0.0)) throw std::invalid_argument("moment order p must be positive");
    std::optional<std::int64_t> last;
    const std::int64_t len = trace.length();
    for (std::int64_t n = 1; n <= len; ++n) {
        const double threshold =
            p <= 1.0 ? eps * static_cast<double>(n) : eps * std::pow(static_cast<double>(n), 1.0 / p);
        if (static_cast<double>(trace.tau(n)) > threshold) last = n;
    }
    return last;
}

}  // namespace aoisim
