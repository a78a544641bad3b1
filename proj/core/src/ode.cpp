#include "aoisim/ode.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aoisim {

Eigen::VectorXd OdeSolution::at(double tq) const {
    if (t.empty()) throw std::logic_error("empty ODE solution");
    if (tq <= t.front()) return y.front();
    if (tq >= t.back()) return y.back();
    const auto it = std::upper_bound(t.begin(), t.end(), tq);
    const std::size_t hi = static_cast<std::size_t>(it - t.begin());
    const double w = (tq - t[hi - 1]) / (t[hi] - t[hi - 1]);
    return y[hi - 1] + w * (y[hi] - y[hi - 1]);
}

OdeSolution rk4_solve(const DriftField& f, const Eigen::VectorXd& y0, double t0, double t1, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("RK4 step must be positive");
    if (!(t1 >= t0)) throw std::invalid_argument("RK4 interval must satisfy t1 >= t0");
    const double span = t1 - t0;
    const std::int64_t steps = span == 0.0 ? 0 : std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(span / dt - 1e-12)));
    const double h = steps == 0 ? 0.0 : span / static_cast<double>(steps);

    OdeSolution sol;
    sol.t.reserve(static_cast<std::size_t>(steps + 1));
    sol.y.reserve(static_cast<std::size_t>(steps + 1));
    sol.t.push_back(t0);
    sol.y.push_back(y0);

    Eigen::VectorXd k1(y0.size()), k2(y0.size()), k3(y0.size()), k4(y0.size());
    Eigen::VectorXd y = y0;
    for (std::int64_t s = 1; s <= steps; ++s) {
        f.eval_into(y, k1);
        f.eval_into(y + 0.5 * h * k1, k2);
        f.eval_into(y + 0.5 * h * k2, k3);
        f.eval_into(y + h * k3, k4);
        y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!y.allFinite()) throw std::runtime_error("RK4 state became non-finite");
        sol.t.push_back(t0 + static_cast<double>(s) * h);
        sol.y.push_back(y);
    }
    sol.t.back() = t1;
    return sol;
}

}  // namespace aoisim
