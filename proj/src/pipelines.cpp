#include "conflow/pipelines.hpp"

#include <algorithm>
#include <cmath>

namespace conflow::pipelines {

using Eigen::VectorXd;

namespace {

double max_level_over(const fields::ScalarField& field,
                      const std::vector<fields::Region>& regions) {
    double top = field.f_star;
    for (const auto& r : regions)
        for (const auto& x : r.samples(&field)) top = std::max(top, field.value(x));
    return top;
}

}  // namespace

metric::ConformalMetric with_bounds_on(const metric::ConformalMetric& m,
                                       const fields::ScalarField& field,
                                       const fields::Region& region) {
    metric::ConformalMetric copy = m;
    copy.set_bounds(m.bounds_on(field, region));
    copy.set_bounds_region(region.descriptor());
    return copy;
}

EnvelopeMetricResult run_envelope_pipeline(const fields::ScalarField& field,
                                           const pli::ComparisonFunction& alpha,
                                           const std::vector<fields::Region>& regions,
                                           const Options& opts) {
    EnvelopeMetricResult out;
    out.nu = curvature::lambda_min_hessian(field, field.x_star);
    if (!(out.nu > 0))
        throw std::invalid_argument(
            "envelope pipeline: field not strongly convex at the minimizer");
    out.eps = opts.eps_fraction * out.nu;
    out.rate = out.nu - out.eps;
    const double s_top = max_level_over(field, regions);
    // Globally strongly convex fields report a level radius at the search
    // cap; the construction only needs it below the working level range.
    out.delta = std::min(metric::strong_convexity_level(field, out.rate, opts.seed),
                         0.45 * (s_top - field.f_star));
    const double y_top = field.f_star + 1.02 * (s_top - field.f_star) +
                         0.01 * out.delta;
    const double table_end = field.f_star + 1.05 * (y_top - field.f_star) + 1.0;

    // Envelope search region: a ball that strictly brackets the top sublevel.
    const double r_top = fields::bracket_sublevel_radius(field, y_top);
    auto search = fields::Region::ball(field.x_star, 2.0 * r_top,
                                       fields::SamplePlan::lowdisc(4096, opts.seed));

    // Constant extension beyond the grid only when the far field is at least
    // nu-strongly convex (deficit <= 0 out there).
    const auto cls = curvature::classify_concavity(
        field, out.nu,
        fields::Region::ball(field.x_star, 2.0 * r_top,
                             fields::SamplePlan::lowdisc(4096, opts.seed + 1)));

    std::vector<double> y_grid;
    for (double s : curvature::geometric_levels(0.5 * out.delta,
                                                y_top - field.f_star,
                                                opts.levels_per_decade))
        y_grid.push_back(field.f_star + s);
    out.profile = curvature::build_upper_envelope(field, out.nu, y_grid,
                                                  opts.envelope_margin, search,
                                                  cls.state_bounded_pass());

    metric::ConformalMetric raw = metric::build_envelope_metric(
        out.profile, alpha, field.f_star, out.delta, table_end);

    const double a = raw.g(field.f_star + out.delta);
    const double eps_band = 0.1 * a;
    out.metric = metric::patch_metric_outside_band(
        raw, a, std::numeric_limits<double>::infinity(), eps_band, out.rate);

    for (const auto& region : regions) {
        const auto bounded = with_bounds_on(out.metric, field, region);
        auto cert = verify::certify_region(field, &bounded, region, out.rate,
                                           opts.certify_tol);
        cert.provenance["delta"] = out.delta;
        cert.provenance["eps"] = out.eps;
        cert.provenance["band_eps"] = eps_band;
        cert.provenance["envelope_margin"] = opts.envelope_margin;
        out.region_certs.push_back(std::move(cert));
    }
    return out;
}

SublevelPatchPipelineResult run_sublevel_patch_pipeline(
    const fields::ScalarField& field, double m, const fields::Region& search_box,
    const std::vector<fields::Region>& regions, const Options& opts) {
    SublevelPatchPipelineResult out;
    auto built = metric::build_sublevel_patch_metric(field, m, search_box, opts.seed);
    out.metric = std::move(built.metric);
    out.rate = built.rate;
    out.c_used = built.c_used;
    out.level_b = built.level_b;
    for (const auto& region : regions) {
        auto cert = verify::certify_region(field, &out.metric, region, out.rate,
                                           opts.certify_tol);
        cert.provenance["c_star"] = built.c_star;
        cert.provenance["c"] = built.c_used;
        cert.provenance["level_b"] = built.level_b;
        cert.provenance["delta"] = built.delta_in;
        cert.provenance["m"] = m;
        out.region_certs.push_back(std::move(cert));
    }
    return out;
}

BoundedMetricPipelineResult run_bounded_metric_pipeline(
    const fields::ScalarField& field, std::optional<pli::ComparisonFunction> alpha,
    const fields::Region& fit_region, const std::vector<fields::Region>& regions,
    const Options& opts) {
    BoundedMetricPipelineResult out;
    out.nu = curvature::lambda_min_hessian(field, field.x_star);
    if (!(out.nu > 0))
        throw std::invalid_argument(
            "bounded-metric pipeline: field not strongly convex at the minimizer");
    const double target = (1.0 - opts.eps_fraction) * out.nu;
    const double s_top_pre = max_level_over(field, regions);
    out.delta = std::min(metric::strong_convexity_level(field, target, opts.seed),
                         0.45 * (s_top_pre - field.f_star));

    // Magnitude bound from the sampled spectrum, with headroom so the strict
    // inequality lambda_min > -m holds.
    double min_lambda = std::numeric_limits<double>::infinity();
    for (const auto& x : fit_region.samples(&field))
        min_lambda = std::min(min_lambda, curvature::lambda_min_hessian(field, x));
    out.m = std::max(1e-6, -min_lambda) * 1.01;
    const auto cls = curvature::classify_concavity(field, out.m, fit_region);
    if (!cls.magnitude_bounded_pass())
        throw std::invalid_argument(
            "bounded-metric pipeline: magnitude_bounded classification failed");

    out.alpha = alpha ? *alpha : pli::fit_power_alpha(field, fit_region);

    const double l = 0.1 * std::min(out.m, out.nu);
    const double c = 1.1 * (l + out.m);
    const double s0 = field.f_star + 0.5 * out.delta;
    const double s_top = max_level_over(field, regions);
    const double table_end = field.f_star + 1.05 * (s_top - field.f_star) + 1.0;

    metric::ConformalMetric raw = metric::build_integrable_tail_metric(
        out.alpha, s0, c, field.f_star, table_end, 0.25 * out.delta);
    out.integrability = pli::strong_pli_check(out.alpha, 0.5 * out.delta);

    const double a = raw.g(field.f_star + out.delta);
    const double eps_band = 0.1 * a;
    out.metric = metric::patch_metric_outside_band(
        raw, a, std::numeric_limits<double>::infinity(), eps_band, target);
    out.metric.set_bounds(verify::Bounds{2.0 * (a - 0.5 * eps_band),
                                         raw.bounds()->log_alpha_up});

    out.rate = std::min(l, target);
    for (const auto& region : regions) {
        auto cert = verify::certify_region(field, &out.metric, region, out.rate,
                                           opts.certify_tol);
        cert.provenance["delta"] = out.delta;
        cert.provenance["c"] = c;
        cert.provenance["m"] = out.m;
        cert.provenance["l"] = l;
        cert.provenance["tail_exponent"] = out.integrability.tail_exponent;
        out.region_certs.push_back(std::move(cert));
    }
    return out;
}

}  // namespace conflow::pipelines
