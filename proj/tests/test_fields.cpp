#include <Eigen/Dense>
#include <cmath>

#include "conflow/detail/quadrature.hpp"
#include "conflow/detail/sampling.hpp"
#include "conflow/fields.hpp"
#include "doctest.h"

using conflow::fields::ScalarField;
using conflow::fields::catalog_get;
using conflow::fields::fd_gradient;
using conflow::fields::fd_hessian;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

VectorXd vec1(double x) { return VectorXd::Constant(1, x); }

/// Richardson-extrapolated central differences; independent derivative
/// oracle used to validate the analytic formulas.
MatrixXd richardson_hessian(const ScalarField& f, const VectorXd& x, double h) {
    const MatrixXd coarse = fd_hessian(f, x, h);
    const MatrixXd fine = fd_hessian(f, x, h / 2.0);
    return (4.0 * fine - coarse) / 3.0;
}

VectorXd richardson_gradient(const ScalarField& f, const VectorXd& x, double h) {
    const VectorXd coarse = fd_gradient(f, x, h);
    const VectorXd fine = fd_gradient(f, x, h / 2.0);
    return (4.0 * fine - coarse) / 3.0;
}

}  // namespace

TEST_CASE("catalog closed-form examples") {
    const auto asinh_f = catalog_get("asinh_example");
    CHECK(asinh_f.value(vec1(0.0)) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(asinh_f.gradient(vec1(0.0))(0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(asinh_f.hessian(vec1(0.0))(0, 0) == doctest::Approx(1.0));

    const auto quad2 = catalog_get("quadratic", {{"dim", 2}});
    const VectorXd origin = VectorXd::Zero(2);
    CHECK(quad2.value(origin) == 0.0);
    CHECK(quad2.gradient(origin).norm() == 0.0);

    const auto cosf = catalog_get("cos_example");
    CHECK(cosf.hessian(vec1(M_PI))(0, 0) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(cosf.f_star == doctest::Approx(-2.0));
    CHECK(cosf.x_star(0) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("fd_gradient oracle examples") {
    const auto quad = catalog_get("quadratic", {{"dim", 2}});
    VectorXd x(2);
    x << 1.0, 0.0;
    const VectorXd g = fd_gradient(quad, x, 1e-5);
    CHECK((g - x).norm() < 1e-8);

    const auto cosf = catalog_get("cos_example");
    CHECK(std::abs(fd_gradient(cosf, vec1(1.0), 1e-5)(0) -
                   (1.0 + 2.0 * std::sin(1.0))) < 1e-7);

    const auto asinh_f = catalog_get("asinh_example");
    CHECK(std::abs(fd_gradient(asinh_f, vec1(3.0), 1e-5)(0) -
                   std::log(3.0 + std::sqrt(10.0))) < 1e-7);
}

TEST_CASE("fd_hessian oracle examples") {
    const auto quad3 = catalog_get("quadratic", {{"dim", 3}});
    VectorXd x(3);
    x << 0.3, -0.7, 1.1;
    CHECK((fd_hessian(quad3, x) - MatrixXd::Identity(3, 3)).norm() < 1e-6);

    const auto cosf = catalog_get("cos_example");
    CHECK(std::abs(fd_hessian(cosf, vec1(0.0))(0, 0) - 3.0) < 1e-6);

    const auto stair = catalog_get("staircase_radial", {{"dim", 2}});
    conflow::detail::Rng rng(42);
    for (int k = 0; k < 20; ++k) {
        VectorXd p(2);
        p << rng.uniform(-6.0, 6.0), rng.uniform(-6.0, 6.0);
        const MatrixXd exact = stair.hessian(p);
        const MatrixXd fd = richardson_hessian(stair, p, 1e-4);
        CHECK((fd - exact).norm() <= 1e-5 * (1.0 + exact.norm()));
    }
}

TEST_CASE("FD vs analytic on 100 seeded points per catalog field") {
    for (const auto& name : conflow::fields::catalog_names()) {
        CAPTURE(name);
        std::map<std::string, double> params;
        if (name == "quadratic" || name == "dimpled_quadratic") params["dim"] = 2;
        const auto f = catalog_get(name, params);
        conflow::detail::Rng rng(7);
        for (int k = 0; k < 100; ++k) {
            VectorXd x(f.dim);
            for (int i = 0; i < f.dim; ++i) x(i) = rng.uniform(-6.0, 6.0);
            const VectorXd g = f.gradient(x);
            const MatrixXd H = f.hessian(x);
            CHECK((fd_gradient(f, x) - g).norm() <= 1e-5 * (1.0 + g.norm()));
            CHECK((richardson_hessian(f, x, 1e-4) - H).norm() <=
                  1e-4 * (1.0 + H.norm()));
            // Hessians are constructed symmetric, not symmetrized after the fact.
            CHECK(H == H.transpose());
            // Properness probe: sampled values never dip below f_star.
            CHECK(f.value(x) >= f.f_star);
            CHECK(f.gradient(f.x_star).norm() <= 1e-9);
        }
    }
}

TEST_CASE("catalog errors") {
    CHECK_THROWS_AS(catalog_get("nonexistent"), std::invalid_argument);
    CHECK_THROWS_AS(catalog_get("quadratic", {{"dim", 0}}), std::invalid_argument);
    // Amplitude far outside the documented validity range: minimizer
    // uniqueness would be lost, the family must refuse to construct.
    CHECK_THROWS_AS(catalog_get("dimpled_quadratic", {{"amplitude", 10.0}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(catalog_get("staircase_radial", {{"max_radius", 1.0}}),
                    std::invalid_argument);
}

TEST_CASE("dimpled_quadratic validity oracle scan") {
    // The family documentation promises: unique critical point at the origin
    // and genuine non-convexity inside the annulus. Verified by a dense scan,
    // not assumed.
    const auto f = catalog_get("dimpled_quadratic", {{"dim", 1}});
    double min_h_prime = std::numeric_limits<double>::infinity();
    double min_hess = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= 120000; ++i) {
        const double r = 12.0 * i / 120000.0;
        const double hp = f.grad1(r);
        min_h_prime = std::min(min_h_prime, hp / r);
        const double h2 = f.hess1(r);
        if (r > 1.0 && r < 4.0) min_hess = std::min(min_hess, h2);
    }
    CHECK(min_h_prime > 0.0);        // single critical point on the ray
    CHECK(min_hess < 0.0);           // strictly concave somewhere in [r1, r2]
    CHECK(f.hess1(0.5) == doctest::Approx(1.0));    // convex inside the annulus
    CHECK(f.hess1(5.0) == doctest::Approx(1.0));    // and outside it
}

TEST_CASE("staircase_radial profile oracle") {
    const auto f = catalog_get("staircase_radial", {{"dim", 1}});
    CHECK(f.value1(0.0) == 0.0);
    CHECK(f.grad1(0.0) == 0.0);

    // Ambient region: h'' = 1 + r^2 exactly.
    CHECK(f.hess1(1.5) == doctest::Approx(1.0 + 1.5 * 1.5).epsilon(1e-12));
    CHECK(f.hess1(7.5) == doctest::Approx(1.0 + 7.5 * 7.5).epsilon(1e-12));
    // Dip centers: h'' = -1 exactly (blend fully engaged).
    for (int k = 2; k <= 6; ++k)
        CHECK(f.hess1(double(k)) == doctest::Approx(-1.0).epsilon(1e-12));
    // Window edges are continuous joins.
    for (double r : {1.9, 2.1, 3.9, 4.1}) {
        CHECK(f.hess1(r - 1e-9) == doctest::Approx(f.hess1(r + 1e-9)).epsilon(1e-6));
    }

    // Independent antiderivative oracle: integrate h'' by quadrature and
    // compare against the exact piecewise h'.
    for (double r : {1.0, 2.05, 3.0, 4.5, 6.2, 7.9}) {
        const auto q = conflow::detail::integrate_adaptive(
            [&](double t) { return f.hess1(t); }, 0.0, r, 1e-12, 1e-13);
        CHECK(f.grad1(r) == doctest::Approx(q.value).epsilon(1e-9));
    }
    // And h itself against the integral of h'.
    for (double r : {2.5, 5.0, 8.0}) {
        const auto q = conflow::detail::integrate_adaptive(
            [&](double t) { return f.grad1(t); }, 0.0, r, 1e-12, 1e-13);
        CHECK(f.value1(r) == doctest::Approx(q.value).epsilon(1e-9));
    }
    // Unique critical point: h' > 0 on a dense scan of (0, 12].
    double min_ratio = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= 120000; ++i) {
        const double r = 12.0 * i / 120000.0;
        min_ratio = std::min(min_ratio, f.grad1(r) / r);
    }
    CHECK(min_ratio > 0.0);
}

TEST_CASE("region sampling determinism and containment") {
    using conflow::fields::Region;
    using conflow::fields::SamplePlan;
    const auto f = catalog_get("cos_example");

    auto box = Region::box_symmetric(1, 10.0, SamplePlan::grid({41}));
    const auto s1 = box.samples();
    const auto s2 = box.samples();
    REQUIRE(s1.size() == 41);
    CHECK(s1.front()(0) == -10.0);
    CHECK(s1.back()(0) == 10.0);
    for (std::size_t i = 0; i < s1.size(); ++i) CHECK(s1[i] == s2[i]);

    auto ball = Region::ball(VectorXd::Zero(2), 2.0, SamplePlan::lowdisc(200, 3));
    for (const auto& x : ball.samples()) CHECK(x.norm() <= 2.0);

    auto shell = Region::shell(VectorXd::Zero(2), 1.0, 4.0, SamplePlan::lowdisc(100, 3));
    for (const auto& x : shell.samples()) {
        CHECK(x.norm() >= 1.0);
        CHECK(x.norm() <= 4.0);
    }

    auto sub = Region::sublevel(-1.0, SamplePlan::lowdisc(100, 9));
    for (const auto& x : sub.samples(&f)) CHECK(f.value(x) <= -1.0);
    CHECK_THROWS(sub.samples(nullptr));

    auto logbox = Region::box_symmetric(1, 1e4, SamplePlan::log_axis(50, 1e-2, true));
    const auto ls = logbox.samples();
    CHECK(ls.size() == 100);
    CHECK(ls.front()(0) == doctest::Approx(-1e4));
    CHECK(ls.back()(0) == doctest::Approx(1e4));
}
