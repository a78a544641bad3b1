#include "aoisim/engine.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace aoisim {

std::int64_t momentum_tau(std::int64_t n, MomentumTauKind kind, const StepSchedule* schedule) {
    if (n < 1) throw std::invalid_argument("momentum tau requires n >= 1");
    if (kind == MomentumTauKind::log_time)
        return static_cast<std::int64_t>(
            std::ceil(static_cast<double>(n) / std::log(static_cast<double>(n) + 1.0)));
    if (!schedule) throw std::invalid_argument("stepsize-sum tau needs a schedule");
    double acc = 0.0;
    for (std::int64_t k = 1; k <= n; ++k) acc += (*schedule)(k);
    return static_cast<std::int64_t>(std::ceil(static_cast<double>(n) / acc));
}

void SimConfig::validate() const {
    if (!drift) throw std::invalid_argument("config: drift field not set");
    const int d = drift->dimension();
    const int D = drift->block_count();
    if (x1.size() != d)
        throw std::invalid_argument("config: initial state has dimension " + std::to_string(x1.size()) +
                                    ", drift expects " + std::to_string(d));
    if (noise.block_dims != drift->block_dims())
        throw std::invalid_argument("config: noise block structure does not match the drift field");
    if (objective && objective->dimension() != d)
        throw std::invalid_argument("config: objective dimension does not match the drift field");
    if (horizon < 1) throw std::invalid_argument("config: horizon must be >= 1");
    if (static_cast<std::int64_t>(delays.size()) != static_cast<std::int64_t>(D) * D)
        throw std::invalid_argument("config: delay matrix must have D*D entries (D=" + std::to_string(D) + ")");
    if (!(beta >= 0.0 && beta < 1.0))
        throw std::invalid_argument("config: momentum beta must lie in [0,1)");
    if (variant == Variant::heavy_ball) {
        for (const AoiModel& m : delays)
            if (m.kind != AoiKind::zero)
                throw std::invalid_argument(
                    "config: heavy-ball variant evaluates drifts at the current iterate; "
                    "the delay matrix must be all-zero");
    }
    for (const AoiModel& m : delays)
        if (m.kind == AoiKind::scripted && static_cast<std::int64_t>(m.script.size()) < horizon)
            throw std::invalid_argument("config: scripted delay path shorter than the horizon");
    if (!(divergence_threshold > 0.0))
        throw std::invalid_argument("config: divergence threshold must be positive");
    if (history_cap && *history_cap < 1)
        throw std::invalid_argument("config: history cap must be >= 1 when set");
}

std::int64_t SimHistory::tau(int i, int j, std::int64_t n) const {
    const int D = block_count();
    return tau_[static_cast<std::size_t>(((i - 1) * D + (j - 1)) * x_.cols() + (n - 1))];
}

std::int64_t SimHistory::read_index(int i, int j, std::int64_t n) const {
    return std::max<std::int64_t>(1, n - tau(i, j, n));
}

Eigen::VectorXd SimHistory::noise(std::int64_t n) const {
    if (n < 2 || n - 2 >= noise_.cols()) throw std::out_of_range("noise index out of range");
    return noise_.col(n - 2);
}

Eigen::VectorXd SimHistory::momentum(std::int64_t n) const {
    if (config_.variant != Variant::heavy_ball) throw std::logic_error("not a heavy-ball history");
    return m_.col(n - 1);
}

Eigen::VectorXd SimHistory::g_value(std::int64_t n) const {
    if (config_.variant != Variant::heavy_ball) throw std::logic_error("not a heavy-ball history");
    return g_.col(n - 1);
}

Eigen::VectorXd SimHistory::h_value(std::int64_t n) const {
    if (config_.variant != Variant::heavy_ball) throw std::logic_error("not a heavy-ball history");
    return h_.col(n - 1);
}

Eigen::VectorXd SimHistory::delta(std::int64_t n) const {
    if (config_.variant != Variant::heavy_ball) throw std::logic_error("not a heavy-ball history");
    return delta_.col(n - 1);
}

double SimHistory::delta_norm(std::int64_t n) const { return delta(n).norm(); }

double SimHistory::c_value(std::int64_t n) const {
    if (config_.variant != Variant::heavy_ball) throw std::logic_error("not a heavy-ball history");
    return c_[static_cast<std::size_t>(n - 1)];
}

double SimHistory::max_norm() const {
    double mx = 0.0;
    for (std::int64_t n = 0; n < recorded_; ++n) mx = std::max(mx, x_.col(n).norm());
    return mx;
}

namespace {

void append_num(std::string& row, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    row += buf;
}

}  // namespace

void SimHistory::write_csv(std::ostream& os) const {
    const int d = dimension();
    const int D = block_count();
    const bool hb = config_.variant == Variant::heavy_ball;
    std::string header = "n";
    for (int k = 1; k <= d; ++k) header += ",x_" + std::to_string(k);
    for (int i = 1; i <= D; ++i)
        for (int j = 1; j <= D; ++j) header += ",tau_" + std::to_string(i) + "_" + std::to_string(j);
    header += ",e_norm,step";
    if (hb) {
        for (int k = 1; k <= d; ++k) header += ",m_" + std::to_string(k);
        header += ",delta_norm,c_n";
    }
    os << header << "\n";
    std::string row;
    for (std::int64_t n = 1; n <= recorded_; ++n) {
        row.clear();
        row += std::to_string(n);
        for (int k = 0; k < d; ++k) {
            row += ',';
            append_num(row, x_(k, n - 1));
        }
        for (int i = 1; i <= D; ++i)
            for (int j = 1; j <= D; ++j) {
                row += ',';
                row += std::to_string(tau(i, j, n));
            }
        row += ',';
        append_num(row, e_norm(n));
        row += ',';
        append_num(row, config_.schedule(n));
        if (hb) {
            for (int k = 0; k < d; ++k) {
                row += ',';
                append_num(row, m_(k, n - 1));
            }
            row += ',';
            append_num(row, delta_norm(n));
            row += ',';
            append_num(row, c_[static_cast<std::size_t>(n - 1)]);
        }
        os << row << "\n";
    }
}

namespace {

double geometric_window(double beta, std::int64_t terms) {
    // sum_{j=0}^{terms-1} beta^j
    if (beta == 0.0) return terms >= 1 ? 1.0 : 0.0;
    return (1.0 - std::pow(beta, static_cast<double>(terms))) / (1.0 - beta);
}

}  // namespace

struct EngineImpl {
    static SimHistory run_plain(const SimConfig& cfg);
    static SimHistory run_heavy_ball(const SimConfig& cfg);
};

SimHistory EngineImpl::run_plain(const SimConfig& cfg) {
    const int d = cfg.drift->dimension();
    const int D = cfg.drift->block_count();
    const std::int64_t N = cfg.horizon;

    SimHistory hist;
    hist.config_ = cfg;
    hist.x_.setZero(d, N);
    hist.noise_.setZero(d, N);
    hist.e_.setZero(d, N);
    hist.tau_.assign(static_cast<std::size_t>(D) * D * N, 0);
    hist.x_.col(0) = cfg.x1;
    hist.recorded_ = 1;

    std::vector<AoiGenerator> gens;
    gens.reserve(static_cast<std::size_t>(D) * D);
    for (int i = 1; i <= D; ++i)
        for (int j = 1; j <= D; ++j) {
            AoiModel m = cfg.delays[static_cast<std::size_t>((i - 1) * D + (j - 1))];
            // fixed per-pair stream offsets; a user offset shifts within the pair
            m.seed_offset += (static_cast<std::uint64_t>(i) << 40) + (static_cast<std::uint64_t>(j) << 16);
            gens.emplace_back(m, cfg.seed);
        }
    std::vector<Rng> noise_rng, sample_rng;
    for (int i = 1; i <= D; ++i) {
        noise_rng.emplace_back(derive_stream(cfg.seed, kStreamNoise, static_cast<std::uint64_t>(i)));
        sample_rng.emplace_back(derive_stream(cfg.seed, kStreamSample, static_cast<std::uint64_t>(i)));
    }

    Eigen::VectorXd v(d), h_del(d), h_cur(d), g(d);
    for (std::int64_t n = 1; n <= N; ++n) {
        // realized ages and per-agent delayed reads for step n
        bool cap_hit = false;
        for (int i = 1; i <= D && !cap_hit; ++i) {
            for (int j = 1; j <= D; ++j) {
                const std::size_t pair = static_cast<std::size_t>((i - 1) * D + (j - 1));
                const std::int64_t t = gens[pair].next();
                hist.tau_[pair * static_cast<std::size_t>(N) + static_cast<std::size_t>(n - 1)] = t;
                const std::int64_t r = std::max<std::int64_t>(1, n - t);
                if (cfg.history_cap && n - r > *cfg.history_cap) {
                    hist.verdict_ = Verdict{RunStatus::cap_exceeded, n};
                    cap_hit = true;
                    break;
                }
            }
        }
        if (cap_hit) break;

        cfg.drift->eval_into(hist.x_.col(n - 1), h_cur);
        int off = 0;
        for (int i = 1; i <= D; ++i) {
            const int di = cfg.drift->block_dim(i);
            int voff = 0;
            for (int j = 1; j <= D; ++j) {
                const std::int64_t r = hist.read_index(i, j, n);
                const int dj = cfg.drift->block_dim(j);
                v.segment(voff, dj) = hist.x_.col(r - 1).segment(voff, dj);
                voff += dj;
            }
            const Eigen::VectorXd hi = cfg.drift->eval_block(i, v);
            h_del.segment(off, di) = hi;
            if (n < N) {
                if (cfg.objective) {
                    const Eigen::VectorXd gi =
                        sgd_sample_drift(*cfg.objective, i, cfg.drift->block_dims(), v,
                                         sample_rng[static_cast<std::size_t>(i - 1)]);
                    g.segment(off, di) = gi;
                    hist.noise_.col(n - 1).segment(off, di) = gi - hi;
                } else {
                    const Eigen::VectorXd mi = sample_noise_block(
                        cfg.noise, i, noise_rng[static_cast<std::size_t>(i - 1)], v);
                    hist.noise_.col(n - 1).segment(off, di) = mi;
                    g.segment(off, di) = hi + mi;
                }
            }
            off += di;
        }
        hist.e_.col(n - 1) = h_del - h_cur;

        if (n == N) break;
        hist.x_.col(n) = hist.x_.col(n - 1) + cfg.schedule(n) * g;
        hist.recorded_ = n + 1;
        if (!hist.x_.col(n).allFinite() || hist.x_.col(n).norm() > cfg.divergence_threshold) {
            hist.verdict_ = Verdict{RunStatus::diverged, n + 1};
            break;
        }
    }
    return hist;
}

SimHistory EngineImpl::run_heavy_ball(const SimConfig& cfg) {
    const int d = cfg.drift->dimension();
    const int D = cfg.drift->block_count();
    const std::int64_t N = cfg.horizon;
    const double beta = cfg.beta;

    SimHistory hist;
    hist.config_ = cfg;
    hist.x_.setZero(d, N);
    hist.noise_.setZero(d, N);
    hist.e_.setZero(d, N);
    hist.tau_.assign(static_cast<std::size_t>(D) * D * N, 0);
    hist.m_.setZero(d, N);
    hist.g_.setZero(d, N);
    hist.h_.setZero(d, N);
    hist.delta_.setZero(d, N);
    hist.c_.assign(static_cast<std::size_t>(N), 0.0);
    hist.x_.col(0) = cfg.x1;
    hist.recorded_ = 1;

    Rng noise_rng(derive_stream(cfg.seed, kStreamNoise, 1));
    Rng sample_rng(derive_stream(cfg.seed, kStreamSample, 1));

    // sliding geometric sums over the g and h histories:
    //   tail  = sum_{i=1}^{K_n} beta^{n-i} g_i       with K_n = n - tau(n) - 1
    //   hwin  = sum_{i=lo_n}^{n-1} beta^{n-i} h_i    with lo_n = max(1, n - tau(n))
    Eigen::VectorXd tail = Eigen::VectorXd::Zero(d);
    Eigen::VectorXd hwin = Eigen::VectorXd::Zero(d);
    std::int64_t k_prev = 0, lo_prev = 1;
    double a_running = 0.0;

    Eigen::VectorXd m_prev = Eigen::VectorXd::Zero(d);
    for (std::int64_t n = 1; n <= N; ++n) {
        hist.h_.col(n - 1) = cfg.drift->eval(hist.x_.col(n - 1));
        if (cfg.objective) {
            hist.g_.col(n - 1) = -cfg.objective->sample_gradient(hist.x_.col(n - 1), sample_rng);
            hist.noise_.col(n - 1) = hist.g_.col(n - 1) - hist.h_.col(n - 1);
        } else {
            hist.noise_.col(n - 1) = sample_noise(cfg.noise, noise_rng, hist.x_.col(n - 1));
            hist.g_.col(n - 1) = hist.h_.col(n - 1) + hist.noise_.col(n - 1);
        }
        hist.m_.col(n - 1) = beta * m_prev + (1.0 - beta) * hist.g_.col(n - 1);
        m_prev = hist.m_.col(n - 1);

        std::int64_t tau_n;
        if (cfg.momentum_tau_kind == MomentumTauKind::log_time) {
            tau_n = momentum_tau(n, MomentumTauKind::log_time);
        } else {
            a_running += cfg.schedule(n);
            tau_n = static_cast<std::int64_t>(std::ceil(static_cast<double>(n) / a_running));
        }
        const std::int64_t lo = std::max<std::int64_t>(1, n - tau_n);
        const std::int64_t k_n = std::max<std::int64_t>(0, n - tau_n - 1);

        tail *= beta;
        for (std::int64_t i = k_prev + 1; i <= k_n; ++i)
            tail += std::pow(beta, static_cast<double>(n - i)) * hist.g_.col(i - 1);
        for (std::int64_t i = k_n + 1; i <= k_prev; ++i)
            tail -= std::pow(beta, static_cast<double>(n - i)) * hist.g_.col(i - 1);
        k_prev = k_n;

        hwin *= beta;
        if (n >= 2) hwin += beta * hist.h_.col(n - 2);
        for (std::int64_t i = lo_prev; i < lo; ++i)
            hwin -= std::pow(beta, static_cast<double>(n - i)) * hist.h_.col(i - 1);
        for (std::int64_t i = lo; i < lo_prev; ++i)
            hwin += std::pow(beta, static_cast<double>(n - i)) * hist.h_.col(i - 1);
        lo_prev = lo;

        const double c_n = geometric_window(beta, n - lo + 1);
        hist.c_[static_cast<std::size_t>(n - 1)] = c_n;
        hist.delta_.col(n - 1) = tail / c_n;
        hist.e_.col(n - 1) = (hwin - (c_n - 1.0) * hist.h_.col(n - 1)) / c_n;

        if (n == N) break;
        hist.x_.col(n) = hist.x_.col(n - 1) + cfg.schedule(n) * hist.m_.col(n - 1);
        hist.recorded_ = n + 1;
        if (!hist.x_.col(n).allFinite() || hist.x_.col(n).norm() > cfg.divergence_threshold) {
            hist.verdict_ = Verdict{RunStatus::diverged, n + 1};
            break;
        }
    }
    return hist;
}

SimHistory run(const SimConfig& config) {
    config.validate();
    return config.variant == Variant::plain ? EngineImpl::run_plain(config)
                                            : EngineImpl::run_heavy_ball(config);
}

SimHistory SimHistory::from_states(SimConfig config, Eigen::MatrixXd states,
                                   std::optional<Eigen::MatrixXd> noise) {
    config.horizon = states.cols();
    config.validate();
    if (states.rows() != config.drift->dimension())
        throw std::invalid_argument("state rows must match the drift dimension");
    if (noise && (noise->rows() != states.rows() || noise->cols() != states.cols()))
        throw std::invalid_argument("noise matrix must match the state matrix shape");
    const int D = config.drift->block_count();
    SimHistory hist;
    hist.config_ = std::move(config);
    hist.recorded_ = states.cols();
    hist.noise_ = noise ? std::move(*noise) : Eigen::MatrixXd::Zero(states.rows(), states.cols());
    hist.e_.setZero(states.rows(), states.cols());
    hist.tau_.assign(static_cast<std::size_t>(D) * D * states.cols(), 0);
    hist.x_ = std::move(states);
    return hist;
}

MomentumSplit momentum_split(const Eigen::MatrixXd& g, std::int64_t n, double beta, MomentumTauKind kind,
                             const StepSchedule* schedule) {
    if (n < 1 || n > g.cols()) throw std::invalid_argument("momentum split index out of range");
    if (!(beta >= 0.0 && beta < 1.0)) throw std::invalid_argument("beta must lie in [0,1)");
    MomentumSplit split;
    split.tau = momentum_tau(n, kind, schedule);
    const std::int64_t lo = std::max<std::int64_t>(1, n - split.tau);
    split.c = geometric_window(beta, n - lo + 1);
    Eigen::VectorXd window = Eigen::VectorXd::Zero(g.rows());
    for (std::int64_t i = lo; i <= n; ++i)
        window += std::pow(beta, static_cast<double>(n - i)) * g.col(i - 1);
    split.window = (1.0 - beta) * window;
    Eigen::VectorXd tail = Eigen::VectorXd::Zero(g.rows());
    for (std::int64_t i = 1; i <= n - split.tau - 1; ++i)
        tail += std::pow(beta, static_cast<double>(n - i)) * g.col(i - 1);
    split.delta = tail / split.c;
    return split;
}

}  // namespace aoisim
