#include <cmath>
#include <cstdio>
#include <filesystem>

#include "conflow/curvature.hpp"
#include "conflow/detail/sampling.hpp"
#include "conflow/fields.hpp"
#include "conflow/metric.hpp"
#include "conflow/pipelines.hpp"
#include "conflow/pli.hpp"
#include "doctest.h"

using namespace conflow;
using metric::ConformalMetric;
using metric::smooth_transition;
using metric::smooth_transition_integral;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

curvature::ConcavityProfile constant_profile(double value, double y_lo, double y_hi) {
    curvature::ConcavityProfile p;
    p.nu = 1.0;
    p.margin = value;
    p.y_grid = {y_lo, y_hi};
    p.m_star_samples = {0.0, 0.0};
    p.envelope_values = {value, value};
    p.tail_slope = 0.0;
    return p;
}

ConformalMetric linear_metric(double slope, double start, double end) {
    return ConformalMetric::from_profile([slope](double) { return slope; }, start,
                                         end, {}, detail::Extrapolation::Error,
                                         {{"family", "test_linear"}});
}

}  // namespace

TEST_CASE("smooth transition") {
    CHECK(smooth_transition(-1.0) == 0.0);
    CHECK(smooth_transition(0.0) == 0.0);
    CHECK(smooth_transition(2.0) == 1.0);
    CHECK(smooth_transition(1.0) == 1.0);
    CHECK(smooth_transition(0.5) == doctest::Approx(0.5));
    // Complementary blend: sigma(t) + sigma(1-t) = 1.
    for (double t : {0.1, 0.25, 0.7})
        CHECK(smooth_transition(t) + smooth_transition(1.0 - t) ==
              doctest::Approx(1.0).epsilon(1e-15));
    // All one-sided derivatives vanish at the edges (FD probe).
    const double h = 1e-4;
    CHECK(std::abs(smooth_transition(h) - smooth_transition(0.0)) / h < 1e-8);
    CHECK(std::abs(smooth_transition(1.0) - smooth_transition(1.0 - h)) / h < 1e-8);

    CHECK(smooth_transition_integral(0.0) == 0.0);
    CHECK(smooth_transition_integral(1.0) == doctest::Approx(0.5));
    CHECK(smooth_transition_integral(3.0) == doctest::Approx(2.5));
    // d/du of the integral is the transition itself.
    for (double u : {0.2, 0.5, 0.8}) {
        const double fd = (smooth_transition_integral(u + 1e-6) -
                           smooth_transition_integral(u - 1e-6)) / 2e-6;
        CHECK(fd == doctest::Approx(smooth_transition(u)).epsilon(1e-6));
    }
}

TEST_CASE("envelope metric reproduces the logarithmic closed form") {
    // Constant envelope and alpha = sqrt(2s) give
    // g(s) = (margin/2) log(s / (delta/2)) up to the smoothing offset.
    const double margin = 0.1, delta = 0.4;
    const auto profile = constant_profile(margin, 0.5 * delta, 120.0);
    const auto alpha = pli::make_sqrt_mu(2.0);
    const auto m = metric::build_envelope_metric(profile, alpha, 0.0, delta, 120.0);

    CHECK(m.g(0.5 * delta) == 0.0);
    CHECK(m.g(0.1) == 0.0);  // constant below the onset
    CHECK(m.g_prime(0.5 * delta) == 0.0);
    // C^1 join: the derivative stays tiny just above the onset.
    CHECK(m.g_prime(0.5 * delta + 1e-6) < 1e-8);

    const double w = 0.1 * delta;
    auto closed_form = [&](double s) { return 0.5 * margin * std::log(s / (0.5 * delta)); };
    for (double s1 : {0.5 * delta + w, 1.0, 7.0}) {
        for (double s2 : {10.0, 60.0, 110.0}) {
            CHECK(m.g(s2) - m.g(s1) ==
                  doctest::Approx(closed_form(s2) - closed_form(s1)).epsilon(1e-8));
        }
    }
    // Beyond the smoothing window the derivative is the exact profile value.
    for (double s : {1.0, 20.0, 100.0})
        CHECK(m.g_prime(s) == doctest::Approx(margin / (2.0 * s)).epsilon(1e-12));

    CHECK_THROWS_AS(metric::build_envelope_metric(profile, alpha, 0.0, -1.0, 120.0),
                    std::invalid_argument);
}

TEST_CASE("envelope metric for the asinh objective grows without bound") {
    const auto field = fields::catalog_get("asinh_example");
    const auto alpha = pli::make_log(0.5);
    std::vector<fields::Region> regions{fields::Region::box_symmetric(
        1, 1000.0, fields::SamplePlan::grid({501}))};
    const auto res = pipelines::run_envelope_pipeline(field, alpha, regions);
    const double g1 = res.metric.g(field.value1(10.0));
    const double g2 = res.metric.g(field.value1(100.0));
    const double g3 = res.metric.g(field.value1(1000.0));
    CHECK(std::isfinite(g3));
    CHECK(g1 < g2);
    CHECK(g2 < g3);
    CHECK(g3 > 100.0);  // far beyond any uniform upper bound
}

TEST_CASE("integrable tail metric") {
    // alpha(s) = s^{3/4}: integral of s^-3/2 from 1 is exactly 2.
    const auto alpha = pli::make_power(1.0, 0.75);
    const auto m = metric::build_integrable_tail_metric(alpha, 1.0, 1.0, 0.0,
                                                        1e6, 0.01);
    REQUIRE(m.bounds().has_value());
    CHECK(m.bounds()->log_beta_low == 0.0);
    CHECK(m.bounds()->log_alpha_up == doctest::Approx(4.0).epsilon(1e-6));
    CHECK(m.bounds()->alpha_up() == doctest::Approx(std::exp(4.0)).epsilon(1e-5));
    CHECK(m.bounds()->beta_low() == doctest::Approx(1.0));
    CHECK(m.g(0.5) == 0.0);
    CHECK(m.g(1e6) <= 2.0);
    CHECK(m.g(1e6) > 1.95);
    // Constant extrapolation beyond the table: the profile has saturated.
    CHECK(m.g(1e9) == m.g(1e6));
    CHECK(m.g_prime(1e9) == 0.0);

    // Non-integrable comparison functions are rejected.
    CHECK_THROWS_AS(metric::build_integrable_tail_metric(pli::make_sqrt_mu(1.0), 1.0,
                                                         1.0, 0.0, 1e6, 0.01),
                    std::invalid_argument);
}

TEST_CASE("band patch") {
    const auto base = linear_metric(1.0, 0.0, 12.0);  // g(y) = y
    const double a = 2.0, b = 5.0, eps = 0.5;
    const auto patched = metric::patch_metric_outside_band(base, a, b, eps, 1.0);

    // Identity on the band.
    for (double y : {2.0, 3.3, 4.7, 5.0})
        CHECK(patched.g(y) == doctest::Approx(y).epsilon(1e-7));
    // Plateaus at a - eps/2 and b + eps/2, continuous at the joins.
    CHECK(patched.g(0.5) == doctest::Approx(a - 0.5 * eps).epsilon(1e-7));
    CHECK(patched.g(1.4999) == doctest::Approx(a - 0.5 * eps).epsilon(1e-7));
    CHECK(patched.g(5.5001) == doctest::Approx(b + 0.5 * eps).epsilon(1e-7));
    CHECK(patched.g(11.0) == doctest::Approx(b + 0.5 * eps).epsilon(1e-7));
    CHECK(patched.g_prime(1.2) == 0.0);
    CHECK(patched.g_prime(8.0) == 0.0);

    // Nondecreasing everywhere.
    double prev = -1e300;
    for (int i = 0; i <= 2000; ++i) {
        const double y = 12.0 * i / 2000.0;
        const double val = patched.g(y);
        CHECK(val >= prev - 1e-12);
        prev = val;
    }
    REQUIRE(patched.bounds().has_value());
    CHECK(patched.bounds()->log_beta_low == doctest::Approx(2 * (a - 0.5 * eps)));
    CHECK(patched.bounds()->log_alpha_up ==
          doctest::Approx(2 * (b + 0.5 * eps)).epsilon(1e-7));

    // One-sided branch: identity above a, plateau below.
    const auto one_sided = metric::patch_metric_outside_band(
        base, a, std::numeric_limits<double>::infinity(), eps, 1.0);
    CHECK(one_sided.g(9.0) == doctest::Approx(9.0).epsilon(1e-7));
    CHECK(one_sided.g(0.3) == doctest::Approx(a - 0.5 * eps).epsilon(1e-7));

    CHECK_THROWS_AS(metric::patch_metric_outside_band(base, a, b, -0.1, 1.0),
                    std::invalid_argument);
    // Ramp would start below the profile's constant region.
    CHECK_THROWS_AS(metric::patch_metric_outside_band(base, 0.1, b, 0.5, 1.0),
                    std::invalid_argument);
    // Upper ramp would run past the tabulated profile.
    CHECK_THROWS_AS(metric::patch_metric_outside_band(base, a, 12.0, 0.5, 1.0),
                    std::invalid_argument);
}

TEST_CASE("sublevel patch metric") {
    // Quadratic: no concavity anywhere, the smallest coefficient works and
    // the bounds ratio stays near one.
    const auto quad = fields::catalog_get("quadratic", {{"dim", 2}});
    auto qbox = fields::Region::box_symmetric(2, 6.0, fields::SamplePlan::lowdisc(2048, 3));
    const auto qres = metric::build_sublevel_patch_metric(quad, 0.5, qbox);
    CHECK(qres.c_star == doctest::Approx(1e-4));
    REQUIRE(qres.metric.bounds().has_value());
    CHECK(qres.metric.bounds()->ratio_sqrt() < 1.01);

    // Dimpled: finite bounds; the sublevel boundary clears the annulus.
    const auto dimpled = fields::catalog_get("dimpled_quadratic", {{"dim", 2}});
    auto dbox = fields::Region::box_symmetric(2, 10.0,
                                              fields::SamplePlan::lowdisc(8192, 3));
    const auto dres = metric::build_sublevel_patch_metric(dimpled, 0.5, dbox);
    CHECK(dres.level_b > 8.0);
    CHECK(dres.c_used > dres.c_star);
    CHECK(std::isfinite(dres.metric.bounds()->ratio_sqrt()));

    // cos field: concavity recurs forever, the classification rejects it.
    const auto cosf = fields::catalog_get("cos_example");
    auto cbox = fields::Region::box_symmetric(1, 100.0, fields::SamplePlan::grid({4001}));
    CHECK_THROWS_AS(metric::build_sublevel_patch_metric(cosf, 0.5, cbox),
                    std::invalid_argument);
}

TEST_CASE("conformal weight identity against explicit matrix assembly") {
    // Independent route: assemble W = M J + J^T M + Mdot with Eigen and
    // compare its extreme eigenvalue against the scalar formula.
    const auto field = fields::catalog_get("dimpled_quadratic", {{"dim", 2}});
    const auto base = linear_metric(0.3, field.f_star, 400.0);
    detail::Rng rng(5);
    for (int k = 0; k < 1000; ++k) {
        VectorXd x(2);
        x << rng.uniform(-6.0, 6.0), rng.uniform(-6.0, 6.0);
        const double level = field.value(x);
        const double g = base.g(level), gp = base.g_prime(level);
        const MatrixXd H = field.hessian(x);
        const MatrixXd M = std::exp(2.0 * g) * MatrixXd::Identity(2, 2);
        const MatrixXd J = -H;
        const MatrixXd Mdot = 2.0 * gp * (-field.gradient(x).squaredNorm()) * M;
        const MatrixXd W = M * J + J.transpose() * M + Mdot;
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(W, Eigen::EigenvaluesOnly);
        Eigen::SelfAdjointEigenSolver<MatrixXd> eh(H, Eigen::EigenvaluesOnly);
        const double matrix_route =
            es.eigenvalues().maxCoeff() / (2.0 * std::exp(2.0 * g));
        const double scalar_route = -eh.eigenvalues().minCoeff() -
                                    gp * field.gradient(x).squaredNorm();
        CHECK(std::abs(matrix_route - scalar_route) < 1e-8);
    }
}

TEST_CASE("metric serialization round trip") {
    const double margin = 0.2, delta = 0.5;
    const auto profile = constant_profile(margin, 0.5 * delta, 50.0);
    const auto m = metric::build_envelope_metric(profile, pli::make_sqrt_mu(1.0),
                                                 0.0, delta, 50.0);
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "conflow_metric_rt";
    fs::create_directories(dir);
    const std::string csv = (dir / "m.csv").string();
    const std::string hdr = (dir / "m.json").string();
    m.save(csv, hdr);
    const auto loaded = ConformalMetric::load(csv, hdr);

    CHECK(loaded.domain_start() == m.domain_start());
    CHECK(loaded.table_end() == m.table_end());
    for (double s : {0.3, 1.0, 7.0, 49.0}) {
        CHECK(loaded.g(s) == doctest::Approx(m.g(s)).epsilon(1e-10));
        CHECK(loaded.g_prime(s) == doctest::Approx(m.g_prime(s)).epsilon(1e-6));
    }
    fs::remove_all(dir);
}
