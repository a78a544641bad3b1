#include "aoisim/noise.hpp"

#include <cmath>
#include <stdexcept>

namespace aoisim {

namespace {

void check_dims(const std::vector<int>& dims) {
    if (dims.empty()) throw std::invalid_argument("noise model needs at least one block");
    for (int d : dims)
        if (d < 1) throw std::invalid_argument("noise block dimensions must be positive");
}

double fill_block(const NoiseModel& model, Rng& rng, const Eigen::VectorXd& arg, Eigen::VectorXd& out) {
    const double sd = model.scale * std::sqrt(1.0 + arg.squaredNorm());
    switch (model.kind) {
        case NoiseKind::zero:
            out.setZero();
            break;
        case NoiseKind::gaussian_scaled:
            for (Eigen::Index k = 0; k < out.size(); ++k) out(k) = sd * rng.normal();
            break;
        case NoiseKind::bounded_uniform:
            for (Eigen::Index k = 0; k < out.size(); ++k) out(k) = rng.uniform(-sd, sd);
            break;
    }
    return sd;
}

}  // namespace

NoiseModel NoiseModel::zero(std::vector<int> dims) {
    check_dims(dims);
    return NoiseModel{NoiseKind::zero, 0.0, std::move(dims)};
}

NoiseModel NoiseModel::gaussian_scaled(double k, std::vector<int> dims) {
    check_dims(dims);
    if (!(k >= 0.0)) throw std::invalid_argument("noise scale must be non-negative");
    return NoiseModel{NoiseKind::gaussian_scaled, k, std::move(dims)};
}

NoiseModel NoiseModel::bounded_uniform(double k, std::vector<int> dims) {
    check_dims(dims);
    if (!(k >= 0.0)) throw std::invalid_argument("noise scale must be non-negative");
    return NoiseModel{NoiseKind::bounded_uniform, k, std::move(dims)};
}

int NoiseModel::dimension() const {
    int d = 0;
    for (int v : block_dims) d += v;
    return d;
}

Eigen::VectorXd sample_noise(const NoiseModel& model, Rng& rng, const Eigen::VectorXd& arg) {
    if (arg.size() != model.dimension()) throw std::invalid_argument("noise argument dimension mismatch");
    Eigen::VectorXd out(model.dimension());
    int off = 0;
    for (int d : model.block_dims) {
        Eigen::VectorXd block(d);
        fill_block(model, rng, arg, block);
        out.segment(off, d) = block;
        off += d;
    }
    return out;
}

Eigen::VectorXd sample_noise_block(const NoiseModel& model, int i, Rng& rng, const Eigen::VectorXd& arg) {
    if (i < 1 || i > static_cast<int>(model.block_dims.size()))
        throw std::invalid_argument("noise block index out of range");
    Eigen::VectorXd block(model.block_dims[static_cast<std::size_t>(i - 1)]);
    fill_block(model, rng, arg, block);
    return block;
}

}  // namespace aoisim
