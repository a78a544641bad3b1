#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "aoisim/drift.hpp"
#include "aoisim/rng.hpp"

namespace aoisim {

/// Stochastic objective F(x) = E[f(x; xi)] with a per-sample gradient map.
class StochasticObjective {
public:
    virtual ~StochasticObjective() = default;
    virtual int dimension() const = 0;
    virtual Eigen::VectorXd sample_gradient(const Eigen::VectorXd& x, Rng& rng) const = 0;
    virtual Eigen::VectorXd mean_gradient(const Eigen::VectorXd& x) const = 0;
    virtual double mean_value(const Eigen::VectorXd& x) const = 0;  // F(x)
};

/// f(x;xi) = x^T A(xi) x + b(xi)^T x with A(xi) = A_mean + s_A * A_spread and
/// b(xi) = b_mean + s_b * b_spread, where s_A, s_b are independent signs.
/// E[A(xi)] must be such that A_mean + A_mean^T is positive definite for the
/// stability theory to apply; min_eigenvalue() probes this.
class QuadraticObjective : public StochasticObjective {
public:
    QuadraticObjective(Eigen::MatrixXd a_mean, Eigen::MatrixXd a_spread, Eigen::VectorXd b_mean,
                       Eigen::VectorXd b_spread);

    int dimension() const override { return static_cast<int>(b_mean_.size()); }
    Eigen::VectorXd sample_gradient(const Eigen::VectorXd& x, Rng& rng) const override;
    Eigen::VectorXd mean_gradient(const Eigen::VectorXd& x) const override;
    double mean_value(const Eigen::VectorXd& x) const override;

    Eigen::MatrixXd mean_hessian() const;  // A_mean + A_mean^T
    double min_eigenvalue() const;
    /// Solves (A_mean + A_mean^T) x* = -b_mean.
    Eigen::VectorXd minimizer() const;

    const Eigen::MatrixXd& a_mean() const { return a_mean_; }
    const Eigen::VectorXd& b_mean() const { return b_mean_; }

private:
    Eigen::MatrixXd a_mean_, a_spread_;
    Eigen::VectorXd b_mean_, b_spread_;
};

/// Mean drift field h(x) = -grad F(x) = -((A_mean + A_mean^T) x + b_mean).
std::shared_ptr<const DriftField> drift_from_objective(const QuadraticObjective& obj,
                                                       std::vector<int> block_dims);

/// -grad_{x_i} f(delayed args; xi) for the 1-based agent i, with a fresh
/// sample xi drawn from the agent's stream.
Eigen::VectorXd sgd_sample_drift(const StochasticObjective& obj, int agent,
                                 const std::vector<int>& block_dims, const Eigen::VectorXd& delayed_args,
                                 Rng& rng);

}  // namespace aoisim
