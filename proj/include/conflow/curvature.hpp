#pragma once

#include <vector>

#include "conflow/certificate.hpp"
#include "conflow/fields.hpp"

namespace conflow::curvature {

/// Smallest eigenvalue of the Hessian at x.
double lambda_min_hessian(const fields::ScalarField& field, const Eigen::VectorXd& x);

/// Curvature deficit m(x) = nu - lambda_min(H(x)); positive where the field
/// fails to be nu-strongly convex.
double curvature_deficit(const fields::ScalarField& field, double nu,
                         const Eigen::VectorXd& x);

struct ConcavityClassification {
    verify::Certificate state_bounded;      // {lambda_min < m} bounded in the box
    verify::Certificate magnitude_bounded;  // lambda_min > -m everywhere sampled
    bool state_bounded_pass() const;
    bool magnitude_bounded_pass() const;
};

/// Sampled verdicts for the two concavity classes. State-boundedness demands
/// an empty outer shell: every sampled violation of lambda_min >= m must sit
/// strictly inside the search region.
ConcavityClassification classify_concavity(const fields::ScalarField& field,
                                           double m, const fields::Region& search_box,
                                           double shell_fraction = 0.2);

/// Fraction of region samples with negative smallest Hessian eigenvalue
/// (Lebesgue estimate under the region's sampling plan).
double negative_curvature_measure(const fields::ScalarField& field,
                                  const fields::Region& region);

/// Maximum curvature deficit over the level set {f = y}, estimated from
/// level-band samples (|f - y| <= level_tol) plus bisected ray hits, then
/// improved by projected ascent constrained to the band.
double level_deficit_max(const fields::ScalarField& field, double nu, double y,
                         double level_tol, const fields::Region& search_region);

/// Piecewise-linear upper envelope of the level-set curvature deficit.
/// The envelope dominates the sampled deficit by `margin` at every
/// breakpoint, is nondecreasing, and extends beyond the grid by a constant
/// (state-bounded fields) or its final slope.
struct ConcavityProfile {
    double nu = 0.0;
    double margin = 0.0;
    std::vector<double> y_grid;
    std::vector<double> m_star_samples;
    std::vector<double> envelope_values;  // at y_grid breakpoints
    double tail_slope = 0.0;

    double eval(double y) const;
    void validate() const;  // strict domination + monotonicity at breakpoints
    nlohmann::ordered_json to_json() const;
    static ConcavityProfile from_json(const nlohmann::json& j);
};

ConcavityProfile build_upper_envelope(const fields::ScalarField& field, double nu,
                                      const std::vector<double>& y_grid,
                                      double margin,
                                      const fields::Region& search_region,
                                      bool constant_extension);

/// Geometric level grid from y_lo to y_hi (both above f_star).
std::vector<double> geometric_levels(double y_lo, double y_hi, int per_decade = 12);

}  // namespace conflow::curvature
