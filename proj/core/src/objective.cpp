#include "aoisim/objective.hpp"

#include <stdexcept>

namespace aoisim {

QuadraticObjective::QuadraticObjective(Eigen::MatrixXd a_mean, Eigen::MatrixXd a_spread,
                                       Eigen::VectorXd b_mean, Eigen::VectorXd b_spread)
    : a_mean_(std::move(a_mean)),
      a_spread_(std::move(a_spread)),
      b_mean_(std::move(b_mean)),
      b_spread_(std::move(b_spread)) {
    const Eigen::Index d = b_mean_.size();
    if (d < 1) throw std::invalid_argument("quadratic objective needs dimension >= 1");
    if (a_mean_.rows() != d || a_mean_.cols() != d || a_spread_.rows() != d || a_spread_.cols() != d ||
        b_spread_.size() != d)
        throw std::invalid_argument("quadratic objective shape mismatch");
}

Eigen::VectorXd QuadraticObjective::sample_gradient(const Eigen::VectorXd& x, Rng& rng) const {
    if (x.size() != b_mean_.size()) throw std::invalid_argument("gradient argument dimension mismatch");
    const double sa = rng.bernoulli(0.5) ? 1.0 : -1.0;
    const double sb = rng.bernoulli(0.5) ? 1.0 : -1.0;
    const Eigen::MatrixXd a = a_mean_ + sa * a_spread_;
    return (a + a.transpose()) * x + (b_mean_ + sb * b_spread_);
}

Eigen::VectorXd QuadraticObjective::mean_gradient(const Eigen::VectorXd& x) const {
    return mean_hessian() * x + b_mean_;
}

double QuadraticObjective::mean_value(const Eigen::VectorXd& x) const {
    return x.dot(a_mean_ * x) + b_mean_.dot(x);
}

Eigen::MatrixXd QuadraticObjective::mean_hessian() const { return a_mean_ + a_mean_.transpose(); }

double QuadraticObjective::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mean_hessian());
    return es.eigenvalues().minCoeff();
}

Eigen::VectorXd QuadraticObjective::minimizer() const {
    return mean_hessian().ldlt().solve(-b_mean_);
}

std::shared_ptr<const DriftField> drift_from_objective(const QuadraticObjective& obj,
                                                       std::vector<int> block_dims) {
    int d = 0;
    for (int v : block_dims) d += v;
    if (d != obj.dimension()) throw std::invalid_argument("block dimensions do not match objective");
    return std::make_shared<AffineDrift>(std::move(block_dims), obj.mean_hessian(),
                                         Eigen::VectorXd(-obj.b_mean()));
}

Eigen::VectorXd sgd_sample_drift(const StochasticObjective& obj, int agent,
                                 const std::vector<int>& block_dims, const Eigen::VectorXd& delayed_args,
                                 Rng& rng) {
    if (agent < 1 || agent > static_cast<int>(block_dims.size()))
        throw std::invalid_argument("agent index out of range");
    int off = 0;
    for (int i = 0; i < agent - 1; ++i) off += block_dims[static_cast<std::size_t>(i)];
    const Eigen::VectorXd grad = obj.sample_gradient(delayed_args, rng);
    return -grad.segment(off, block_dims[static_cast<std::size_t>(agent - 1)]);
}

}  // namespace aoisim
