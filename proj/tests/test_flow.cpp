#include <cmath>

#include "conflow/detail/sampling.hpp"
#include "conflow/fields.hpp"
#include "conflow/flow.hpp"
#include "doctest.h"

using namespace conflow::flow;
using conflow::fields::catalog_get;
using Eigen::VectorXd;

namespace {
VectorXd vec1(double x) { return VectorXd::Constant(1, x); }
}

TEST_CASE("linear flow solves exactly") {
    const auto quad = catalog_get("quadratic", {{"dim", 2}});
    VectorXd x0(2);
    x0 << 1.0, 0.0;
    const auto traj = integrate(quad, x0, 1.0);
    CHECK((traj.end_state() - std::exp(-1.0) * x0).norm() < 1e-6);
    CHECK(traj.terminated_by == Termination::Horizon);
    CHECK(traj.times.front() == 0.0);
}

TEST_CASE("cos flow from far away settles at the origin") {
    const auto cosf = catalog_get("cos_example");
    const auto traj = integrate(cosf, vec1(10.0), 20.0);
    CHECK(std::abs(traj.end_state()(0)) < 1e-6);
    CHECK(traj.f_values.back() == doctest::Approx(-2.0).epsilon(1e-9));
    // Lyapunov decrease along the whole trajectory.
    for (std::size_t i = 1; i < traj.f_values.size(); ++i)
        CHECK(traj.f_values[i] <= traj.f_values[i - 1] + 1e-9);
}

TEST_CASE("asinh flow from far away") {
    const auto f = catalog_get("asinh_example");
    const auto traj = integrate(f, vec1(100.0), 60.0, {});
    CHECK(std::abs(traj.end_state()(0)) < 1e-4);
    for (std::size_t i = 1; i < traj.f_values.size(); ++i)
        CHECK(traj.f_values[i] <= traj.f_values[i - 1] + 1e-9);
}

TEST_CASE("integrator order on the linear flow") {
    // Fixed-step runs against the closed form: halving h must shrink the
    // terminal error by at least 2^4.
    const auto quad = catalog_get("quadratic", {{"dim", 1}});
    auto terminal_error = [&](double h) {
        StepControls c;
        c.fixed_step = true;
        c.h_init = h;
        c.grad_tol = 0.0;
        const auto traj = integrate(quad, vec1(1.0), 2.0, c);
        return std::abs(traj.end_state()(0) - std::exp(-2.0));
    };
    const double e1 = terminal_error(0.2);
    const double e2 = terminal_error(0.1);
    CHECK(e2 < e1 / std::pow(2.0, 4.0));
}

TEST_CASE("energy identity along samples") {
    const auto cosf = catalog_get("cos_example");
    StepControls c;
    c.n_samples = 4000;
    const auto traj = integrate(cosf, vec1(3.0), 4.0, c);
    // (f_{k+1} - f_k) / dt tracks -|grad f|^2 at the midpoint sample.
    int checked = 0;
    for (std::size_t k = 0; k + 2 < traj.times.size(); k += 2) {
        const double dt = traj.times[k + 2] - traj.times[k];
        if (dt <= 0) continue;
        const double lhs = (traj.f_values[k + 2] - traj.f_values[k]) / dt;
        const double rhs = -traj.grad_norms[k + 1] * traj.grad_norms[k + 1];
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-3));
        ++checked;
    }
    CHECK(checked > 100);
}

TEST_CASE("grad_tol termination reports the stop reason") {
    const auto quad = catalog_get("quadratic", {{"dim", 1}});
    StepControls c;
    c.grad_tol = 1e-6;
    const auto traj = integrate(quad, vec1(1.0), 100.0, c);
    CHECK(traj.terminated_by == Termination::GradTol);
    CHECK(traj.grad_norms.back() <= 2e-6);
    CHECK(traj.end_time() < 100.0);
}

TEST_CASE("pair distance series") {
    const auto quad = catalog_get("quadratic", {{"dim", 1}});
    const auto ta = integrate(quad, vec1(1.0), 3.0);
    const auto tb = integrate(quad, vec1(2.0), 3.0);

    const auto same = pair_distance_series(ta, ta);
    for (double d : same.euclidean) CHECK(d == 0.0);

    const auto series = pair_distance_series(ta, tb);
    for (std::size_t i = 0; i < series.times.size(); ++i)
        CHECK(series.euclidean[i] ==
              doctest::Approx(std::exp(-series.times[i])).epsilon(1e-6));

    const auto quad2 = catalog_get("quadratic", {{"dim", 2}});
    const auto t2 = integrate(quad2, VectorXd::Ones(2), 1.0);
    CHECK_THROWS_AS(pair_distance_series(ta, t2), std::invalid_argument);
}

TEST_CASE("dimpled pair decays with a positive fitted rate") {
    const auto f = catalog_get("dimpled_quadratic", {{"dim", 2}});
    VectorXd a(2), b(2);
    a << 5.0, 1.0;
    b << 4.0, -2.0;
    const auto series =
        pair_distance_series(integrate(f, a, 25.0), integrate(f, b, 25.0));
    CHECK(series.euclidean.back() < 1e-6 * series.euclidean.front());
}

TEST_CASE("settle_time") {
    const auto quad = catalog_get("quadratic", {{"dim", 1}});
    const auto inside = integrate(quad, vec1(0.1), 5.0);
    CHECK(settle_time(inside, VectorXd::Zero(1), 0.5) == 0.0);

    // Closed form: |x(t)| = R e^{-t} enters radius r at t = log(R/r).
    const double R = 8.0, r = 0.25;
    StepControls c;
    c.n_samples = 20000;
    const auto traj = integrate(quad, vec1(R), 10.0, c);
    CHECK(settle_time(traj, VectorXd::Zero(1), r) ==
          doctest::Approx(std::log(R / r)).epsilon(1e-3));

    // Never settles within the horizon.
    const auto shortr = integrate(quad, vec1(8.0), 0.5);
    CHECK(std::isinf(settle_time(shortr, VectorXd::Zero(1), 1e-3)));

    // cos flow: settle time stable under sampling refinement within 2%.
    const auto cosf = catalog_get("cos_example");
    StepControls c1;
    c1.n_samples = 2000;
    StepControls c2;
    c2.n_samples = 4000;
    c2.rtol = 1e-10;
    const double s1 =
        settle_time(integrate(cosf, vec1(10.0), 20.0, c1), VectorXd::Zero(1), 0.5);
    const double s2 =
        settle_time(integrate(cosf, vec1(10.0), 20.0, c2), VectorXd::Zero(1), 0.5);
    CHECK(std::abs(s1 - s2) <= 0.02 * s1);
}

TEST_CASE("step floor is reported, not spun on") {
    // Finite-time blow-up into x = 1: the flow accelerates without bound and
    // the controller must stop at the step floor with the last state intact.
    conflow::fields::ScalarField f;
    f.name = "sqrt_edge";
    f.dim = 1;
    f.value = [](const VectorXd& x) {
        return std::sqrt(std::max(1e-300, 1.0 - x(0)));
    };
    f.gradient = [](const VectorXd& x) {
        const double d = std::max(1e-300, 1.0 - x(0));
        return VectorXd(VectorXd::Constant(1, -0.5 / std::sqrt(d)));
    };
    f.hessian = [](const VectorXd& x) {
        const double d = std::max(1e-300, 1.0 - x(0));
        return Eigen::MatrixXd(
            Eigen::MatrixXd::Constant(1, 1, -0.25 / std::pow(d, 1.5)));
    };
    f.f_star = 0.0;
    f.x_star = VectorXd::Ones(1);
    const auto traj = integrate(f, vec1(0.0), 10.0);
    CHECK(traj.terminated_by == Termination::StepFloor);
    CHECK(traj.states.back().allFinite());
}
