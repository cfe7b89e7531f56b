#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "conflow/certificate.hpp"
#include "conflow/fields.hpp"

namespace conflow::pli {

/// Comparison function alpha for gradient-dominance inequalities
/// |grad f(x)| >= alpha(f(x) - f_star). All families are continuous,
/// vanish exactly at zero and increase without bound.
struct ComparisonFunction {
    enum class Family { SqrtMu, Power, Log, Custom };
    Family family = Family::Custom;
    std::map<std::string, double> params;
    std::function<double(double)> eval;
    std::optional<double> tail_exponent;  // q with alpha(s) ~ c s^q, if known
    std::string label;

    double operator()(double s) const { return eval(s); }
};

ComparisonFunction make_sqrt_mu(double mu);           // sqrt(mu s)
ComparisonFunction make_power(double c, double q);    // c s^q
ComparisonFunction make_log(double scale);            // scale * log(1 + s)
ComparisonFunction make_custom(std::function<double(double)> fn, std::string label,
                               std::optional<double> tail_exponent = std::nullopt);

/// Sampled class-K-infinity probe: zero at zero, strictly increasing on a
/// geometric grid, growth that does not saturate. Throws on violation.
void validate_kinf(const ComparisonFunction& alpha);

/// Construct a ComparisonFunction from a specification tag + parameters, the
/// form used by the run-configuration file.
ComparisonFunction comparison_from_spec(const std::string& family,
                                        const std::map<std::string, double>& params);

/// Pointwise check of |grad f| >= alpha(f - f_star) over the region samples.
/// Margin is the worst slack after the relative roundoff allowance.
verify::Certificate check_kinf_pli(const fields::ScalarField& field,
                                   const ComparisonFunction& alpha,
                                   const fields::Region& region);

/// Best sampled gradient-dominance constant: inf |grad f|^2 / (f - f_star)
/// over the region, excluding a tiny ball around the minimizer.
double fit_gpli_mu(const fields::ScalarField& field, const fields::Region& region,
                   double exclusion_radius = 1e-8);

/// Ratios |grad f(x)|^p / (f(x) - f_star) along a 1-D ray; exhibits the decay
/// that rules out any global power-law inequality.
std::vector<double> lojasiewicz_exponent_probe(const fields::ScalarField& field,
                                               double p,
                                               const std::vector<double>& ray_points);

enum class TailVerdict { Convergent, Divergent, Inconclusive };

std::string to_string(TailVerdict v);

struct StrongPliResult {
    TailVerdict verdict = TailVerdict::Inconclusive;
    double finite_part = 0.0;    // integral of alpha(s)^-2 over [s0, horizon]
    double tail_exponent = 0.0;  // declared or fitted q
    double tail_bound = 0.0;     // closed-form remainder bound when convergent
    double total() const { return finite_part + tail_bound; }
};

/// Integrability classification of 1/alpha(s)^2 on [s0, infinity): adaptive
/// quadrature of the finite part plus a power-law tail test with margin 0.05
/// around the critical exponent 1/2.
StrongPliResult strong_pli_check(const ComparisonFunction& alpha, double s0,
                                 double tail_horizon = 1e8);

/// Empirical power-law comparison function fitted from field samples: the
/// exponent comes from a log-log fit of the gradient-norm lower envelope over
/// the top decade of levels; the constant is deflated by `safety` so the
/// inequality holds with margin at every sample.
ComparisonFunction fit_power_alpha(const fields::ScalarField& field,
                                   const fields::Region& region,
                                   double safety = 0.9);

}  // namespace conflow::pli
