#include "aoisim/drift.hpp"

#include <numeric>
#include <stdexcept>

namespace aoisim {

namespace {

double spectral_norm(const Eigen::MatrixXd& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    return svd.singularValues()(0);
}

std::vector<int> checked_dims(std::vector<int> dims) {
    if (dims.empty()) throw std::invalid_argument("drift field needs at least one block");
    for (int d : dims)
        if (d < 1) throw std::invalid_argument("block dimensions must be positive");
    return dims;
}

}  // namespace

DriftField::DriftField(std::vector<int> dims, double lipschitz, double growth)
    : dims_(checked_dims(std::move(dims))), lipschitz_(lipschitz), growth_(growth) {
    offsets_.resize(dims_.size());
    int off = 0;
    for (std::size_t i = 0; i < dims_.size(); ++i) {
        offsets_[i] = off;
        off += dims_[i];
    }
    d_ = off;
}

int DriftField::block_offset(int i) const {
    if (i < 1 || i > block_count()) throw std::invalid_argument("block index out of range");
    return offsets_[static_cast<std::size_t>(i - 1)];
}

Eigen::VectorXd DriftField::eval(const Eigen::VectorXd& x) const {
    if (x.size() != d_) throw std::invalid_argument("drift argument dimension mismatch");
    Eigen::VectorXd out(d_);
    eval_into(x, out);
    return out;
}

Eigen::VectorXd DriftField::eval_block(int i, const Eigen::VectorXd& x) const {
    const Eigen::VectorXd full = eval(x);
    return full.segment(block_offset(i), block_dim(i));
}

ScaledDriftField::ScaledDriftField(std::shared_ptr<const DriftField> base, double c)
    : DriftField(base->block_dims(), base->lipschitz(), base->growth()), base_(std::move(base)), c_(c) {
    if (!(c_ >= 1.0)) throw std::invalid_argument("scaling factor must satisfy c >= 1");
}

void ScaledDriftField::eval_into(const Eigen::VectorXd& x, Eigen::VectorXd& out) const {
    base_->eval_into(c_ * x, out);
    out /= c_;
}

Eigen::VectorXd scaled_drift(const DriftField& field, double c, const Eigen::VectorXd& x) {
    if (!(c >= 1.0)) throw std::invalid_argument("scaling factor must satisfy c >= 1");
    return field.eval(c * x) / c;
}

LimitProbe limit_drift_probe(const DriftField& field, const Eigen::VectorXd& x,
                             const std::vector<double>& scales, double tol) {
    if (scales.empty()) throw std::invalid_argument("limit probe needs at least one scale");
    if (!(scales.front() >= 1.0)) throw std::invalid_argument("probe scales must start at c >= 1");
    for (std::size_t k = 1; k < scales.size(); ++k)
        if (!(scales[k] > scales[k - 1]))
            throw std::invalid_argument("probe scales must be strictly increasing");
    LimitProbe probe;
    probe.values.reserve(scales.size());
    for (double c : scales) probe.values.push_back(scaled_drift(field, c, x));
    probe.limit = probe.values.back();
    if (probe.values.size() >= 2) {
        probe.final_gap = (probe.values.back() - probe.values[probe.values.size() - 2]).norm();
        probe.converged = probe.final_gap < tol;
    }
    return probe;
}

LinearDrift::LinearDrift(std::vector<int> dims, Eigen::MatrixXd gain_matrix)
    : DriftField(std::move(dims), spectral_norm(gain_matrix), spectral_norm(gain_matrix)),
      S_(std::move(gain_matrix)) {
    if (S_.rows() != dimension() || S_.cols() != dimension())
        throw std::invalid_argument("gain matrix shape does not match block dimensions");
}

LinearDrift::LinearDrift(std::vector<int> dims, double gain)
    : LinearDrift(dims, [&] {
          int d = 0;
          for (int v : dims) d += v;
          return Eigen::MatrixXd(gain * Eigen::MatrixXd::Identity(d, d));
      }()) {}

void LinearDrift::eval_into(const Eigen::VectorXd& x, Eigen::VectorXd& out) const {
    out.noalias() = -(S_ * x);
}

std::shared_ptr<const DriftField> LinearDrift::limit_field() const {
    return std::make_shared<LinearDrift>(block_dims(), S_);
}

AffineDrift::AffineDrift(std::vector<int> dims, Eigen::MatrixXd gain_matrix, Eigen::VectorXd offset)
    : DriftField(std::move(dims), spectral_norm(gain_matrix),
                 std::max(spectral_norm(gain_matrix), offset.norm())),
      S_(std::move(gain_matrix)),
      u_(std::move(offset)) {
    if (S_.rows() != dimension() || S_.cols() != dimension() || u_.size() != dimension())
        throw std::invalid_argument("affine drift shape does not match block dimensions");
}

void AffineDrift::eval_into(const Eigen::VectorXd& x, Eigen::VectorXd& out) const {
    out.noalias() = -(S_ * x);
    out += u_;
}

std::shared_ptr<const DriftField> AffineDrift::limit_field() const {
    return std::make_shared<LinearDrift>(block_dims(), S_);
}

RegularizedDrift::RegularizedDrift(std::shared_ptr<const DriftField> base, double kappa)
    : DriftField(base->block_dims(), base->lipschitz() + 2.0 * kappa, base->growth() + 2.0 * kappa),
      base_(std::move(base)),
      kappa_(kappa) {
    if (!(kappa_ >= 0.0)) throw std::invalid_argument("regularization coefficient must be non-negative");
}

void RegularizedDrift::eval_into(const Eigen::VectorXd& x, Eigen::VectorXd& out) const {
    base_->eval_into(x, out);
    out -= 2.0 * kappa_ * x;
}

std::shared_ptr<const DriftField> RegularizedDrift::limit_field() const {
    auto base_limit = base_->limit_field();
    if (!base_limit) return nullptr;
    return std::make_shared<RegularizedDrift>(base_limit, kappa_);
}

ScriptedTableDrift::ScriptedTableDrift(std::vector<double> grid, std::vector<double> values)
    : DriftField({1},
                 [&] {
                     double lmax = 0.0;
                     for (std::size_t k = 1; k < grid.size(); ++k) {
                         const double dx = grid[k] - grid[k - 1];
                         if (!(dx > 0.0)) throw std::invalid_argument("table grid must be strictly increasing");
                         lmax = std::max(lmax, std::abs(values[k] - values[k - 1]) / dx);
                     }
                     return lmax;
                 }(),
                 [&] {
                     double vmax = 0.0;
                     for (double v : values) vmax = std::max(vmax, std::abs(v));
                     return vmax;
                 }()),
      grid_(std::move(grid)),
      values_(std::move(values)) {
    if (grid_.size() < 2 || grid_.size() != values_.size())
        throw std::invalid_argument("table drift needs matching grid/value arrays of length >= 2");
}

void ScriptedTableDrift::eval_into(const Eigen::VectorXd& x, Eigen::VectorXd& out) const {
    const double v = x(0);
    if (v <= grid_.front()) {
        out(0) = values_.front();
        return;
    }
    if (v >= grid_.back()) {
        out(0) = values_.back();
        return;
    }
    const auto it = std::upper_bound(grid_.begin(), grid_.end(), v);
    const std::size_t hi = static_cast<std::size_t>(it - grid_.begin());
    const double w = (v - grid_[hi - 1]) / (grid_[hi] - grid_[hi - 1]);
    out(0) = values_[hi - 1] + w * (values_[hi] - values_[hi - 1]);
}

CallbackDrift::CallbackDrift(std::vector<int> dims, double lipschitz, double growth,
                             std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)> fn)
    : DriftField(std::move(dims), lipschitz, growth), fn_(std::move(fn)) {
    if (!fn_) throw std::invalid_argument("callback drift requires a callable");
}

void CallbackDrift::eval_into(const Eigen::VectorXd& x, Eigen::VectorXd& out) const { fn_(x, out); }

}  // namespace aoisim
