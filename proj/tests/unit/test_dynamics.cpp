#include <doctest.h>

#include <cmath>

#include "aoisim/drift.hpp"
#include "aoisim/noise.hpp"
#include "aoisim/objective.hpp"

using namespace aoisim;

namespace {

Eigen::VectorXd vec1(double a) {
    Eigen::VectorXd v(1);
    v << a;
    return v;
}

Eigen::VectorXd vec2(double a, double b) {
    Eigen::VectorXd v(2);
    v << a, b;
    return v;
}

QuadraticObjective two_point_objective() {
    // A(xi) in {0.5, 1.5}, b(xi) in {1, 3}, independent and equiprobable
    Eigen::MatrixXd am(1, 1), as(1, 1);
    am << 1.0;
    as << 0.5;
    Eigen::VectorXd bm(1), bs(1);
    bm << 2.0;
    bs << 1.0;
    return QuadraticObjective(am, as, bm, bs);
}

}  // namespace

TEST_CASE("linear drift evaluation and block access") {
    LinearDrift h({1, 1}, 1.0);
    CHECK(h.eval(vec2(1, 2)) == vec2(-1, -2));
    CHECK_THROWS_AS(h.eval(vec1(1)), std::invalid_argument);

    Eigen::MatrixXd s(2, 2);
    s << 1, 0, 0, 2;
    LinearDrift blocks({1, 1}, s);
    CHECK(blocks.eval_block(2, vec2(3, 5))(0) == -10.0);
    CHECK(blocks.eval_block(1, vec2(3, 5))(0) == -3.0);
    // block concatenation equals the full evaluation
    Eigen::VectorXd joined(2);
    joined << blocks.eval_block(1, vec2(3, 5)), blocks.eval_block(2, vec2(3, 5));
    CHECK(joined == blocks.eval(vec2(3, 5)));
}

TEST_CASE("quadratic-objective drift at a point") {
    // f(x;xi) = x^2 + 2x deterministic; h(x) = -(2x + 2)
    Eigen::MatrixXd am(1, 1);
    am << 1.0;
    QuadraticObjective obj(am, Eigen::MatrixXd::Zero(1, 1), vec1(2.0), Eigen::VectorXd::Zero(1));
    auto h = drift_from_objective(obj, {1});
    CHECK(h->eval(vec1(0))(0) == -2.0);
    CHECK(h->eval(vec1(1))(0) == -4.0);
}

TEST_CASE("scaled drift") {
    LinearDrift lin({1}, 1.0);
    CHECK(scaled_drift(lin, 1000.0, vec1(2))(0) == -2.0);
    CHECK_THROWS_AS(scaled_drift(lin, 0.5, vec1(2)), std::invalid_argument);

    AffineDrift aff({1}, Eigen::MatrixXd::Identity(1, 1), vec1(1.0));  // h(x) = -x + 1
    CHECK(scaled_drift(aff, 10.0, vec1(1))(0) == doctest::Approx(-0.9).epsilon(1e-15));

    // h(x) = -x + sin(x); at c = 1e6 the perturbation has shrunk below 1e-6
    CallbackDrift wavy({1}, 2.0, 2.0, [](const Eigen::VectorXd& x, Eigen::VectorXd& out) {
        out(0) = -x(0) + std::sin(x(0));
    });
    const double expected = -1.0 + std::sin(1e6) / 1e6;  // direct evaluation
    CHECK(scaled_drift(wavy, 1e6, vec1(1))(0) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(std::abs(scaled_drift(wavy, 1e6, vec1(1))(0) - (-1.0)) <= 1e-6);
}

TEST_CASE("scaled drift is the identity at c=1 and c-independent for linear fields") {
    Eigen::MatrixXd s(2, 2);
    s << 2, 0.5, 0.5, 1;
    LinearDrift lin({2}, s);
    for (double x1 : {-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0})
        for (double x2 : {-1.0, 0.5, 2.0}) {
            const Eigen::VectorXd x = vec2(x1, x2);
            CHECK(scaled_drift(lin, 1.0, x) == lin.eval(x));
            for (double c : {2.0, 10.0, 1000.0})
                CHECK((scaled_drift(lin, c, x) - lin.eval(x)).norm() == 0.0);
        }
}

TEST_CASE("limit probe converges for fields with an analytic scaling limit") {
    const std::vector<double> scales = {10, 100, 1000, 10000, 100000, 1000000};
    LinearDrift lin({1}, 1.0);
    const LimitProbe lp = limit_drift_probe(lin, vec1(3), scales);
    CHECK(lp.converged);
    CHECK(lp.limit(0) == -3.0);

    AffineDrift aff({1}, Eigen::MatrixXd::Identity(1, 1), vec1(1.0));
    const LimitProbe ap = limit_drift_probe(aff, vec1(3), scales, 1e-4);
    CHECK(ap.converged);
    CHECK(ap.limit(0) == doctest::Approx(-3.0).epsilon(1e-5));

    // quadratic drift scaling limit is the pure linear part -(A+A^T)x
    Eigen::MatrixXd am(2, 2);
    am << 1.0, 0.2, 0.0, 0.8;
    QuadraticObjective obj(am, Eigen::MatrixXd::Zero(2, 2), vec2(1, -2), Eigen::VectorXd::Zero(2));
    auto h = drift_from_objective(obj, {1, 1});
    const LimitProbe qp = limit_drift_probe(*h, vec2(1, 1), scales, 1e-4);
    CHECK(qp.converged);
    const Eigen::VectorXd analytic = -(obj.mean_hessian() * vec2(1, 1));
    CHECK((qp.limit - analytic).norm() < 1e-5);
    REQUIRE(h->limit_field() != nullptr);
    CHECK((h->limit_field()->eval(vec2(1, 1)) - analytic).norm() == 0.0);

    CHECK_THROWS_AS(limit_drift_probe(lin, vec1(1), {0.5, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(limit_drift_probe(lin, vec1(1), {10.0, 5.0}), std::invalid_argument);
}

TEST_CASE("scaled fields inherit the declared Lipschitz constant on sampled pairs") {
    Eigen::MatrixXd am(2, 2);
    am << 1.0, 0.3, 0.1, 0.7;
    QuadraticObjective obj(am, Eigen::MatrixXd::Zero(2, 2), vec2(2, 1), Eigen::VectorXd::Zero(2));
    auto h = drift_from_objective(obj, {1, 1});
    const double L = h->lipschitz();
    Rng rng(7);
    for (double c : {1.0, 3.0, 100.0, 1e5}) {
        for (int k = 0; k < 50; ++k) {
            const Eigen::VectorXd x = vec2(rng.uniform(-5, 5), rng.uniform(-5, 5));
            const Eigen::VectorXd y = vec2(rng.uniform(-5, 5), rng.uniform(-5, 5));
            const double lhs = (scaled_drift(*h, c, x) - scaled_drift(*h, c, y)).norm();
            CHECK(lhs <= L * (x - y).norm() * (1 + 1e-9) + 1e-12);
        }
    }
}

TEST_CASE("zero noise is identically zero") {
    NoiseModel model = NoiseModel::zero({1, 1});
    Rng rng(1);
    CHECK(sample_noise(model, rng, vec2(3, 4)).norm() == 0.0);
}

TEST_CASE("gaussian-scaled noise is centered with the advertised scale") {
    NoiseModel model = NoiseModel::gaussian_scaled(1.0, {1});
    Rng rng(123);
    const int n = 100000;
    double sum = 0.0, sumsq = 0.0;
    for (int k = 0; k < n; ++k) {
        const double v = sample_noise(model, rng, vec1(0))(0);
        sum += v;
        sumsq += v * v;
    }
    const double mean = sum / n;
    const double sd = std::sqrt(sumsq / n - mean * mean);
    CHECK(std::abs(mean) <= 3.0 * sd / std::sqrt(static_cast<double>(n)));
    CHECK(sd == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("noise second moment respects the conditional bound") {
    const double K = 2.0;
    NoiseModel model = NoiseModel::gaussian_scaled(K, {1, 2});
    Rng rng(5);
    Eigen::VectorXd arg(3);
    arg << 3, 0, 0;  // ||arg|| = 3
    const int n = 100000;
    double acc = 0.0;
    for (int k = 0; k < n; ++k) acc += sample_noise(model, rng, arg).squaredNorm();
    CHECK(acc / n <= K * K * (1 + 9.0) * 3 * 1.05);

    NoiseModel bounded = NoiseModel::bounded_uniform(K, {1});
    const Eigen::VectorXd arg1 = vec1(3.0);
    double bacc = 0.0, bmax = 0.0;
    for (int k = 0; k < n; ++k) {
        const double v = sample_noise(bounded, rng, arg1)(0);
        bacc += v * v;
        bmax = std::max(bmax, std::abs(v));
    }
    CHECK(bacc / n <= K * K * (1 + 9.0));
    CHECK(bmax <= K * std::sqrt(1 + 9.0));
}

TEST_CASE("sgd sample drift on the quadratic family") {
    Rng rng(11);
    // degenerate distribution: a = 1, b = 0, x = 3 -> -6
    Eigen::MatrixXd am(1, 1);
    am << 1.0;
    QuadraticObjective det(am, Eigen::MatrixXd::Zero(1, 1), Eigen::VectorXd::Zero(1),
                           Eigen::VectorXd::Zero(1));
    CHECK(sgd_sample_drift(det, 1, {1}, vec1(3), rng)(0) == -6.0);

    // two-point law: A in {0.5, 1.5}, b = 0, x = 1 -> drift in {-1, -3}
    Eigen::MatrixXd as(1, 1);
    as << 0.5;
    QuadraticObjective two(am, as, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1));
    bool saw_low = false, saw_high = false;
    for (int k = 0; k < 200; ++k) {
        const double v = sgd_sample_drift(two, 1, {1}, vec1(1), rng)(0);
        CHECK((v == -1.0 || v == -3.0));
        saw_low |= v == -3.0;
        saw_high |= v == -1.0;
    }
    CHECK(saw_low);
    CHECK(saw_high);
}

TEST_CASE("sampled gradients average to the analytic mean gradient") {
    QuadraticObjective obj = two_point_objective();
    Rng rng(3);
    const Eigen::VectorXd x = vec1(0.7);
    const int n = 100000;
    double acc = 0.0;
    for (int k = 0; k < n; ++k) acc += obj.sample_gradient(x, rng)(0);
    const double mc_tol = 5.0 / std::sqrt(static_cast<double>(n));  // spread is O(1)
    CHECK(std::abs(acc / n - obj.mean_gradient(x)(0)) <= mc_tol);
}

TEST_CASE("mean gradient matches central finite differences of the mean value") {
    Eigen::MatrixXd am(2, 2);
    am << 1.0, 0.25, 0.1, 0.9;
    QuadraticObjective obj(am, Eigen::MatrixXd::Zero(2, 2), vec2(1, -1), Eigen::VectorXd::Zero(2));
    Rng rng(9);
    const double h = 1e-5;
    for (int probe = 0; probe < 10; ++probe) {
        const Eigen::VectorXd x = vec2(rng.uniform(-2, 2), rng.uniform(-2, 2));
        for (int k = 0; k < 2; ++k) {
            Eigen::VectorXd xp = x, xm = x;
            xp(k) += h;
            xm(k) -= h;
            const double fd = (obj.mean_value(xp) - obj.mean_value(xm)) / (2 * h);
            CHECK(fd == doctest::Approx(obj.mean_gradient(x)(k)).epsilon(1e-4));
        }
    }
}

TEST_CASE("quadratic minimizer is a drift zero") {
    QuadraticObjective obj = two_point_objective();
    CHECK(obj.minimizer()(0) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(obj.min_eigenvalue() == doctest::Approx(2.0).epsilon(1e-14));
    auto h = drift_from_objective(obj, {1});
    CHECK(h->eval(obj.minimizer()).norm() < 1e-10);
}
