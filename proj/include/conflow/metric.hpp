#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "conflow/certificate.hpp"
#include "conflow/curvature.hpp"
#include "conflow/detail/interp.hpp"
#include "conflow/fields.hpp"
#include "conflow/pli.hpp"

namespace conflow::metric {

/// C-infinity transition: 0 for t <= 0, 1 for t >= 1, built from
/// phi(t) = exp(-1/t) as phi(t) / (phi(t) + phi(1-t)).
double smooth_transition(double t);

/// Integral of the transition from 0 to u (0 for u <= 0; u - 1/2 for u >= 1).
double smooth_transition_integral(double u);

/// Conformal metric e^{2 g(f(x))} I represented by the scalar profile g over
/// level values. g is nondecreasing, constant below domain_start, and held as
/// a cumulative quadrature table with exact node derivatives (cubic Hermite
/// in between). Immutable after construction; safe for concurrent evaluation.
class ConformalMetric {
  public:
    ConformalMetric() = default;

    /// Log-scale profile at an absolute level value.
    double g(double level) const;
    /// d g / d level, evaluated from the analytic profile when available.
    double g_prime(double level) const;
    /// Conformal weight e^{2 g}; may overflow to +inf for extreme profiles.
    double weight(double level) const;

    double domain_start() const { return domain_start_; }
    double table_end() const { return table_.back_x(); }
    const std::vector<double>& table_nodes() const { return table_.nodes(); }
    detail::Extrapolation extrapolation() const { return extrap_; }
    bool covers(double level) const;

    const std::optional<verify::Bounds>& bounds() const { return bounds_; }
    void set_bounds(verify::Bounds b) { bounds_ = std::move(b); }
    /// Region the stored bounds refer to (recorded in the saved header).
    void set_bounds_region(nlohmann::ordered_json region) {
        bounds_region_ = std::move(region);
    }
    /// 2*inf g / 2*sup g of the profile over [domain levels in `region`].
    verify::Bounds bounds_on(const fields::ScalarField& field,
                             const fields::Region& region) const;

    const nlohmann::ordered_json& header() const { return header_; }

    static ConformalMetric from_profile(std::function<double(double)> g_prime,
                                        double domain_start, double table_end,
                                        std::vector<double> knots,
                                        detail::Extrapolation extrapolation,
                                        nlohmann::ordered_json header,
                                        double g_at_start = 0.0,
                                        int nodes_per_decade = 48);

    /// Columnar CSV (level, g, g_prime) plus a JSON header.
    void save(const std::string& csv_path, const std::string& json_path) const;
    static ConformalMetric load(const std::string& csv_path,
                                const std::string& json_path);

  private:
    std::function<double(double)> g_prime_;  // empty for metrics loaded from disk
    detail::HermiteTable table_;
    double domain_start_ = 0.0;
    detail::Extrapolation extrap_ = detail::Extrapolation::Error;
    std::optional<verify::Bounds> bounds_;
    nlohmann::ordered_json bounds_region_;
    nlohmann::ordered_json header_;
};

/// Metric from a curvature-deficit envelope and a comparison function:
/// g'(s) = envelope(s) / alpha(s - f_star)^2 above f_star + delta/2, zero
/// below, with the jump at the lower limit smoothed over a delta/10 window so
/// the profile is C^1.
ConformalMetric build_envelope_metric(const curvature::ConcavityProfile& profile,
                                      const pli::ComparisonFunction& alpha,
                                      double f_star, double delta, double table_end,
                                      double smoothing_fraction = 0.1);

/// Metric with uniformly bounded profile g = c * psi, where
/// psi(s) = integral of alpha(tau - f_star)^-2 from s0 to s. Requires the
/// comparison function to pass the integrability check; throws otherwise.
/// The onset at s0 is smoothed over `smoothing_width`.
ConformalMetric build_integrable_tail_metric(const pli::ComparisonFunction& alpha,
                                             double s0, double c, double f_star,
                                             double table_end,
                                             double smoothing_width);

/// Blend a metric to constants outside the band of profile values (a, b):
/// the returned profile equals the input where g is in [a, b], plateaus below
/// a - eps and (for finite b) above b + eps, and ramps smoothly in between.
/// Pass b = +infinity for the one-sided branch. Contractivity outside the
/// band is the caller's responsibility (strong convexity at rate nu there),
/// recorded in the header.
ConformalMetric patch_metric_outside_band(const ConformalMetric& input, double a,
                                          double b, double eps, double nu);

struct SublevelPatchResult {
    ConformalMetric metric;
    double c_star = 0.0;   // minimal coefficient found by bisection
    double c_used = 0.0;   // deployed coefficient (c_star plus headroom)
    double level_b = 0.0;  // sublevel boundary enclosing the concave set
    double delta_in = 0.0; // strong-convexity level radius at the minimizer
    double rate = 0.0;     // certified target -min(m, l)
};

/// Metric e^{2 c (f - f_star)} I patched constant outside the compact
/// sublevel set that contains all sampled concavity, for fields whose
/// non-convexity is state-bounded. Rejects fields failing that
/// classification.
SublevelPatchResult build_sublevel_patch_metric(const fields::ScalarField& field,
                                                double m,
                                                const fields::Region& search_box,
                                                std::uint64_t seed = 1);

/// Largest level offset delta such that sampled lambda_min stays above
/// `lambda_target` on {f < f_star + delta}.
double strong_convexity_level(const fields::ScalarField& field,
                              double lambda_target, std::uint64_t seed = 1);

}  // namespace conflow::metric
