#pragma once

#include <Eigen/Dense>
#include <vector>

#include "aoisim/rng.hpp"

namespace aoisim {

/// Martingale-difference noise families. All kinds are sign-symmetric, so
/// the zero conditional mean holds by construction; the conditional second
/// moment scales with the delayed argument vector as
///   per-component std = K * sqrt(1 + ||arg||^2).
enum class NoiseKind { zero, gaussian_scaled, bounded_uniform };

struct NoiseModel {
    NoiseKind kind = NoiseKind::zero;
    double scale = 0.0;  // K
    std::vector<int> block_dims;

    static NoiseModel zero(std::vector<int> dims);
    static NoiseModel gaussian_scaled(double k, std::vector<int> dims);
    static NoiseModel bounded_uniform(double k, std::vector<int> dims);

    int dimension() const;
};

/// Full-vector sample; every block is scaled from the same argument vector.
Eigen::VectorXd sample_noise(const NoiseModel& model, Rng& rng, const Eigen::VectorXd& arg);

/// Block sample for 1-based agent i, scaled from that agent's delayed
/// argument vector.
Eigen::VectorXd sample_noise_block(const NoiseModel& model, int i, Rng& rng, const Eigen::VectorXd& arg);

}  // namespace aoisim
