#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "conflow/certificate.hpp"
#include "conflow/fields.hpp"
#include "conflow/flow.hpp"
#include "conflow/metric.hpp"

namespace conflow::verify {

/// Contraction measure of the conformal metric along the gradient flow at x:
/// -lambda_min(H(x)) - g'(f(x)) |grad f(x)|^2. A null metric means the
/// identity metric (g = 0).
double contraction_measure(const fields::ScalarField& field,
                           const metric::ConformalMetric* m, const Eigen::VectorXd& x);

/// Grid certificate for the differential condition `contraction measure
/// <= -nu` over the region, with a matrix-form cross-check at a few samples
/// (the quadratic form assembled explicitly from M, the flow Jacobian and the
/// orbital derivative of M).
Certificate certify_region(const fields::ScalarField& field,
                           const metric::ConformalMetric* m,
                           const fields::Region& region, double nu,
                           double tol = 1e-6);

/// Exact 1-D Riemannian length: integral of e^{g(f(s))} between the points
/// (the unique path up to reparametrization).
double riemann_distance_1d(const metric::ConformalMetric& m,
                           const fields::ScalarField& field, double x0, double x1,
                           double rel_tol = 1e-11);

/// (lower, upper) bracket of the metric distance: sqrt(beta)|dx| from the
/// stored lower bound, and the smaller of sqrt(alpha)|dx| and the
/// straight-segment energy for the upper side.
std::pair<double, double> riemann_distance_bounds(const metric::ConformalMetric& m,
                                                  const fields::ScalarField& field,
                                                  const Eigen::VectorXd& x0,
                                                  const Eigen::VectorXd& x1);

/// Trajectory-decay experiment: seeded pairs (incremental claim) or points
/// against the minimizer (equilibrium claim).
struct DecaySpec {
    std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> pairs;
    std::vector<Eigen::VectorXd> points;  // compared against x_star
    double horizon = 20.0;
    double expected_rate = 0.0;
    double rate_tolerance = 0.05;                // relative, on fitted rates
    std::optional<double> overshoot_bound;       // c-hat <= bound * 1.05
    double transient_fraction = 0.2;             // dropped from the fit window
    double distance_floor = 1e-10;               // dropped from the fit window
    // Tight tolerances and a step cap: pair separations live many orders of
    // magnitude below the states, and the cubic-Hermite dense output must
    // stay well inside the fitted-rate tolerance.
    flow::StepControls controls{1e-10, 1e-14, 1e-12, 0.0, 0.1, 1200, false};
};

/// Fit exponential decay per pair/point, aggregate the worst fitted rate and
/// overshoot, and check them against the expectation. With a 1-D metric the
/// sampled step-to-step contraction of the exact metric distance is also
/// enforced at rate `expected_rate`.
Certificate empirical_decay(const fields::ScalarField& field,
                            const metric::ConformalMetric* m, const DecaySpec& spec);

/// Ball invariance: all trajectories from sphere starts must stay inside.
/// The contraction hypothesis on the ball is certified first; when it fails
/// the verdict is inconclusive rather than fail.
Certificate forward_invariance_check(const fields::ScalarField& field,
                                     const Eigen::VectorXd& center, double radius,
                                     double nu, int boundary_samples, double horizon,
                                     std::uint64_t seed = 1);

struct AnnulusOptions {
    double ball_fraction = 0.5;  // epsilon = fraction * inner radius of K
    int n_starts = 16;           // settle-time probes from K
    int n_pairs = 24;            // incremental-decay probes from K
    double pair_tol = 0.05;      // slack on the predicted overshoot bound
    std::uint64_t seed = 1;
    double shell_factor = 3.0;   // complement proxy reaches this multiple of K
};

/// Incremental stability through a non-contracting compact shell K: verifies
/// contraction outside K (sampled complement proxy), bounds the measure
/// inside K and the settle time into a ball around the minimizer, and checks
/// every seeded pair against the predicted overshoot e^{(M+nu)T}.
Certificate annulus_ies_check(const fields::ScalarField& field,
                              const fields::Region& compact_k, double nu,
                              double horizon, const AnnulusOptions& opts = {});

}  // namespace conflow::verify
