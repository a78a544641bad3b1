#pragma once

#include <Eigen/Dense>
#include <vector>

#include "aoisim/drift.hpp"

namespace aoisim {

/// Dense ODE output: integrator knots with linear interpolation in between.
struct OdeSolution {
    std::vector<double> t;
    std::vector<Eigen::VectorXd> y;

    Eigen::VectorXd at(double tq) const;
    const Eigen::VectorXd& back() const { return y.back(); }
};

/// Classical fixed-step 4th-order Runge-Kutta for x' = f(x) on [t0, t1].
/// The step is shrunk so the endpoint is hit exactly; throws on a non-finite
/// state.
OdeSolution rk4_solve(const DriftField& f, const Eigen::VectorXd& y0, double t0, double t1, double dt);

}  // namespace aoisim
