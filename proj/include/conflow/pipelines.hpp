#pragma once

#include <optional>
#include <vector>

#include "conflow/certificate.hpp"
#include "conflow/curvature.hpp"
#include "conflow/fields.hpp"
#include "conflow/metric.hpp"
#include "conflow/pli.hpp"
#include "conflow/verify.hpp"

namespace conflow::pipelines {

struct Options {
    double eps_fraction = 0.1;     // epsilon = fraction * nu
    double envelope_margin = 0.1;  // strict headroom of the deficit envelope
    int levels_per_decade = 12;
    double certify_tol = 1e-6;
    std::uint64_t seed = 1;
};

struct EnvelopeMetricResult {
    metric::ConformalMetric metric;
    curvature::ConcavityProfile profile;
    double nu = 0.0;
    double eps = 0.0;
    double delta = 0.0;
    double rate = 0.0;  // certified target nu - eps
    std::vector<verify::Certificate> region_certs;
};

/// Construct the envelope metric for a field with a locally strongly convex
/// minimizer and certify it at rate nu - eps on every supplied region.
EnvelopeMetricResult run_envelope_pipeline(const fields::ScalarField& field,
                                           const pli::ComparisonFunction& alpha,
                                           const std::vector<fields::Region>& regions,
                                           const Options& opts = {});

struct SublevelPatchPipelineResult {
    metric::ConformalMetric metric;
    double rate = 0.0;
    double c_used = 0.0;
    double level_b = 0.0;
    std::vector<verify::Certificate> region_certs;
};

/// Constant-outside-a-sublevel metric for state-bounded concavity, certified
/// on the supplied proxy regions at the patched rate.
SublevelPatchPipelineResult run_sublevel_patch_pipeline(
    const fields::ScalarField& field, double m, const fields::Region& search_box,
    const std::vector<fields::Region>& regions, const Options& opts = {});

struct BoundedMetricPipelineResult {
    metric::ConformalMetric metric;
    pli::ComparisonFunction alpha;
    pli::StrongPliResult integrability;
    double nu = 0.0;
    double m = 0.0;
    double rate = 0.0;
    double delta = 0.0;
    std::vector<verify::Certificate> region_certs;
};

/// Uniformly bounded metric for magnitude-bounded concavity under an
/// integrable comparison function (fitted from samples when none is given).
BoundedMetricPipelineResult run_bounded_metric_pipeline(
    const fields::ScalarField& field, std::optional<pli::ComparisonFunction> alpha,
    const fields::Region& fit_region, const std::vector<fields::Region>& regions,
    const Options& opts = {});

/// Per-region bounds of a metric attached to a fresh copy.
metric::ConformalMetric with_bounds_on(const metric::ConformalMetric& m,
                                       const fields::ScalarField& field,
                                       const fields::Region& region);

}  // namespace conflow::pipelines
