#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <vector>

namespace aoisim {

/// Deterministic mean-drift field h: R^d -> R^d with block structure
/// h = (h^1, ..., h^D), h^i in R^{d_i}. Carries declared Lipschitz and
/// linear-growth metadata (analytic values when known; they are never
/// estimated at runtime).
class DriftField {
public:
    virtual ~DriftField() = default;

    const std::vector<int>& block_dims() const { return dims_; }
    int dimension() const { return d_; }
    int block_count() const { return static_cast<int>(dims_.size()); }
    int block_offset(int i) const;  // i is 1-based
    int block_dim(int i) const { return dims_[static_cast<std::size_t>(i - 1)]; }

    virtual void eval_into(const Eigen::VectorXd& x, Eigen::VectorXd& out) const = 0;
    Eigen::VectorXd eval(const Eigen::VectorXd& x) const;
    /// h^i(x) for the 1-based block index i.
    Eigen::VectorXd eval_block(int i, const Eigen::VectorXd& x) const;

    double lipschitz() const { return lipschitz_; }
    double growth() const { return growth_; }

    /// Analytic scaling limit h_inf when available (nullptr otherwise).
    virtual std::shared_ptr<const DriftField> limit_field() const { return nullptr; }

protected:
    DriftField(std::vector<int> dims, double lipschitz, double growth);

private:
    std::vector<int> dims_;
    std::vector<int> offsets_;
    int d_ = 0;
    double lipschitz_ = 0.0;
    double growth_ = 0.0;
};

/// h_c(x) = h(c x)/c for c >= 1. Same Lipschitz constant and growth bound
/// as the base field.
class ScaledDriftField : public DriftField {
public:
    ScaledDriftField(std::shared_ptr<const DriftField> base, double c);
    void eval_into(const Eigen::VectorXd& x, Eigen::VectorXd& out) const override;
    double scaling() const { return c_; }

private:
    std::shared_ptr<const DriftField> base_;
    double c_;
};

/// One-shot evaluation of h_c at a point; throws for c < 1.
Eigen::VectorXd scaled_drift(const DriftField& field, double c, const Eigen::VectorXd& x);

struct LimitProbe {
    std::vector<Eigen::VectorXd> values;  // h_{c_k}(x) per probe scale
    bool converged = false;               // Cauchy criterion on successive values
    double final_gap = 0.0;
    Eigen::VectorXd limit;                // last evaluation
};

/// Evaluates h_{c_k}(x) along a strictly increasing scale sequence (c_1 >= 1)
/// and reports whether successive differences fall below tol. Diagnostic
/// only; convergence of the probe is evidence, not proof.
LimitProbe limit_drift_probe(const DriftField& field, const Eigen::VectorXd& x,
                             const std::vector<double>& scales, double tol = 1e-6);

// --- built-in fields -------------------------------------------------------

/// h(x) = -S x
class LinearDrift : public DriftField {
public:
    LinearDrift(std::vector<int> dims, Eigen::MatrixXd gain_matrix);
    LinearDrift(std::vector<int> dims, double gain);  // S = gain * I
    void eval_into(const Eigen::VectorXd& x, Eigen::VectorXd& out) const override;
    std::shared_ptr<const DriftField> limit_field() const override;
    const Eigen::MatrixXd& gain() const { return S_; }

private:
    Eigen::MatrixXd S_;
};

/// h(x) = -S x + u; scaling limit is the linear part.
class AffineDrift : public DriftField {
public:
    AffineDrift(std::vector<int> dims, Eigen::MatrixXd gain_matrix, Eigen::VectorXd offset);
    void eval_into(const Eigen::VectorXd& x, Eigen::VectorXd& out) const override;
    std::shared_ptr<const DriftField> limit_field() const override;

private:
    Eigen::MatrixXd S_;
    Eigen::VectorXd u_;
};

/// h(x) = base(x) - 2*kappa*x (L2-regularization of the underlying objective).
class RegularizedDrift : public DriftField {
public:
    RegularizedDrift(std::shared_ptr<const DriftField> base, double kappa);
    void eval_into(const Eigen::VectorXd& x, Eigen::VectorXd& out) const override;
    std::shared_ptr<const DriftField> limit_field() const override;

private:
    std::shared_ptr<const DriftField> base_;
    double kappa_;
};

/// 1-d drift tabulated on a grid, evaluated by linear interpolation and
/// clamped to the end values outside the grid.
class ScriptedTableDrift : public DriftField {
public:
    ScriptedTableDrift(std::vector<double> grid, std::vector<double> values);
    void eval_into(const Eigen::VectorXd& x, Eigen::VectorXd& out) const override;

private:
    std::vector<double> grid_, values_;
};

/// Arbitrary callable with declared metadata; mainly for tests.
class CallbackDrift : public DriftField {
public:
    CallbackDrift(std::vector<int> dims, double lipschitz, double growth,
                  std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)> fn);
    void eval_into(const Eigen::VectorXd& x, Eigen::VectorXd& out) const override;

private:
    std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)> fn_;
};

}  // namespace aoisim
