#include "conflow/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "conflow/curvature.hpp"
#include "conflow/detail/quadrature.hpp"
#include "conflow/detail/sampling.hpp"
#include "conflow/lognorm.hpp"

namespace conflow::verify {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double contraction_measure(const fields::ScalarField& field,
                           const metric::ConformalMetric* m, const VectorXd& x) {
    const double lmin = curvature::lambda_min_hessian(field, x);
    if (!m) return -lmin;
    return -lmin - m->g_prime(field.value(x)) * field.gradient(x).squaredNorm();
}

namespace {

/// The matrix route to the contraction measure: assemble
/// W = M J + J^T M + Mdot with J = -H and Mdot = -2 g' |grad f|^2 M, then
/// return lambda_max(W) / (2 lambda_min(M)). The conformal weight is shifted
/// by a constant factor when e^{2g} would overflow; the measure is invariant
/// under constant rescaling of M.
double contraction_measure_matrix(const fields::ScalarField& field,
                                  const metric::ConformalMetric* m,
                                  const VectorXd& x) {
    const MatrixXd H = field.hessian(x);
    const int n = static_cast<int>(H.rows());
    double g = 0.0, gp = 0.0;
    if (m) {
        const double level = field.value(x);
        g = m->g(level);
        gp = m->g_prime(level);
    }
    const double log_w = 2.0 * g;
    const double w = std::abs(log_w) < 300.0 ? std::exp(log_w) : 1.0;
    const MatrixXd M = w * MatrixXd::Identity(n, n);
    const MatrixXd J = -H;
    const double fdot = -field.gradient(x).squaredNorm();
    const MatrixXd Mdot = 2.0 * gp * fdot * M;
    const MatrixXd W = M * J + J.transpose() * M + Mdot;
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(W, Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<MatrixXd> esM(M, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff() / (2.0 * esM.eigenvalues().minCoeff());
}

struct FitResult {
    double kappa = 0.0;      // fitted decay rate
    double overshoot = 1.0;  // max_t d(t) e^{kappa t} / d(0)
    bool enough_decay = false;
    double metric_step_violation = 0.0;  // worst one-step excess (1-D metric)
};

FitResult fit_decay(const std::vector<double>& t, const std::vector<double>& d,
                    const std::vector<double>& d_metric, double expected_rate,
                    double transient_fraction, double floor) {
    FitResult r;
    if (t.size() < 8 || d.front() <= floor) return r;
    // Effective window ends where the distance first reaches the floor.
    std::size_t end = t.size();
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (d[i] <= floor) {
            end = i;
            break;
        }
    }
    if (end < 8) return r;
    const double t_end = t[end - 1];
    const double t_start = transient_fraction * t_end;

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    long n = 0;
    for (std::size_t i = 0; i < end; ++i) {
        if (t[i] < t_start || !(d[i] > floor)) continue;
        const double x = t[i], y = std::log(d[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 4) return r;
    r.kappa = -(n * sxy - sx * sy) / (n * sxx - sx * sx);
    r.enough_decay = d[end - 1] <= 1e-3 * d[0] || d[end - 1] <= 1e-12;

    double c = 0.0;
    for (std::size_t i = 0; i < end; ++i)
        c = std::max(c, d[i] * std::exp(r.kappa * t[i]) / d[0]);
    r.overshoot = c;

    if (!d_metric.empty()) {
        // Step-to-step contraction of the exact metric distance.
        for (std::size_t i = 0; i + 1 < end; ++i) {
            if (!(d_metric[i] > 1e-280)) break;
            const double dt = t[i + 1] - t[i];
            const double allowed =
                std::exp(-expected_rate * dt) * d_metric[i] * (1.0 + 1e-6);
            r.metric_step_violation = std::max(
                r.metric_step_violation, (d_metric[i + 1] - allowed) / d_metric[i]);
        }
    }
    return r;
}

}  // namespace

Certificate certify_region(const fields::ScalarField& field,
                           const metric::ConformalMetric* m,
                           const fields::Region& region, double nu, double tol) {
    const auto pts = region.samples(&field);
    if (pts.empty()) throw std::invalid_argument("certify_region: empty region");

    Certificate cert;
    cert.claim = "contraction_region";
    cert.field_name = field.name;
    cert.field_params = field.params;
    cert.region = region.descriptor();
    cert.provenance["nu"] = nu;
    cert.provenance["tol"] = tol;

    double worst = -std::numeric_limits<double>::infinity();
    VectorXd worst_x;
    for (const auto& x : pts) {
        if (m && !m->covers(field.value(x)))
            throw std::domain_error("certify_region: metric domain does not cover the region");
        const double L = contraction_measure(field, m, x);
        if (L > worst) {
            worst = L;
            worst_x = x;
        }
    }

    // Matrix-form cross-check on a deterministic subsample.
    double max_dev = 0.0;
    detail::Rng rng(region.plan().seed + 101);
    for (int k = 0; k < 10; ++k) {
        const auto& x = pts[rng.next_u64() % pts.size()];
        const double scalar_route = contraction_measure(field, m, x);
        const double matrix_route = contraction_measure_matrix(field, m, x);
        max_dev = std::max(max_dev,
                           std::abs(scalar_route - matrix_route) /
                               (1.0 + std::abs(scalar_route)));
    }
    cert.provenance["matrix_form_max_dev"] = max_dev;
    if (max_dev > 1e-6)
        cert.notes.push_back("matrix-form cross-check deviation above 1e-6");

    cert.margin = (-nu + tol) - worst;
    cert.verdict = (cert.margin >= 0 && max_dev <= 1e-6) ? Verdict::Pass
                                                         : Verdict::Fail;
    if (cert.verdict == Verdict::Fail)
        cert.witnesses.push_back({worst_x, worst, "largest contraction measure"});
    if (m && m->bounds()) cert.bounds = *m->bounds();
    return cert;
}

double riemann_distance_1d(const metric::ConformalMetric& m,
                           const fields::ScalarField& field, double x0, double x1,
                           double rel_tol) {
    if (field.dim != 1)
        throw std::invalid_argument("riemann_distance_1d: field is not 1-D");
    if (x0 > x1) std::swap(x0, x1);
    if (x0 == x1) return 0.0;
    auto weight = [&](double s) {
        return std::exp(m.g(field.value(VectorXd::Constant(1, s))));
    };
    return detail::integrate_adaptive(weight, x0, x1, 1e-300, rel_tol).value;
}

std::pair<double, double> riemann_distance_bounds(const metric::ConformalMetric& m,
                                                  const fields::ScalarField& field,
                                                  const VectorXd& x0,
                                                  const VectorXd& x1) {
    if (!m.bounds())
        throw std::invalid_argument("riemann_distance_bounds: metric has no bounds");
    const double dx = (x1 - x0).norm();
    if (dx == 0.0) return {0.0, 0.0};
    const double lower = std::exp(0.5 * m.bounds()->log_beta_low) * dx;
    // Straight-segment energy refines the constant upper bound.
    auto weight = [&](double t) {
        const VectorXd x = x0 + t * (x1 - x0);
        const double level = field.value(x);
        if (!m.covers(level))
            throw std::domain_error("riemann_distance_bounds: segment exits the "
                                    "metric's stated region");
        return std::exp(m.g(level));
    };
    const double path = detail::integrate_adaptive(weight, 0.0, 1.0, 1e-300, 1e-11)
                            .value * dx;
    const double upper = std::min(std::exp(0.5 * m.bounds()->log_alpha_up) * dx, path);
    return {lower, std::max(lower, upper)};
}

Certificate empirical_decay(const fields::ScalarField& field,
                            const metric::ConformalMetric* m,
                            const DecaySpec& spec) {
    if (spec.pairs.empty() && spec.points.empty())
        throw std::invalid_argument("empirical_decay: no experiments");

    Certificate cert;
    cert.claim = spec.pairs.empty() ? "sges" : "ies";
    cert.field_name = field.name;
    cert.field_params = field.params;
    nlohmann::ordered_json rj;
    rj["kind"] = "trajectory_experiment";
    rj["horizon"] = spec.horizon;
    rj["pairs"] = spec.pairs.size();
    rj["points"] = spec.points.size();
    cert.region = rj;
    cert.provenance["horizon"] = spec.horizon;
    cert.provenance["expected_rate"] = spec.expected_rate;
    cert.provenance["rtol"] = spec.controls.rtol;
    cert.provenance["atol"] = spec.controls.atol;

    double kappa_min = std::numeric_limits<double>::infinity();
    double overshoot_max = 0.0;
    double worst_metric_violation = 0.0;
    bool all_enough = true;
    VectorXd worst_start;

    auto run_experiment = [&](const VectorXd& a, const std::optional<VectorXd>& b) {
        const auto ta = flow::integrate(field, a, spec.horizon, spec.controls);
        std::vector<double> times, dist, dist_metric;
        if (b) {
            const auto tb = flow::integrate(field, *b, spec.horizon, spec.controls);
            const auto series = flow::pair_distance_series(
                ta, tb, field.dim == 1 && m ? &field : nullptr,
                field.dim == 1 ? m : nullptr);
            times = series.times;
            dist = series.euclidean;
            dist_metric = series.metric_exact;
        } else {
            for (std::size_t i = 0; i < ta.times.size(); ++i) {
                times.push_back(ta.times[i]);
                dist.push_back((ta.states[i] - field.x_star).norm());
                if (m && field.dim == 1)
                    dist_metric.push_back(riemann_distance_1d(
                        *m, field, ta.states[i](0), field.x_star(0)));
            }
        }
        if (dist.front() <= 1e-12)
            throw std::invalid_argument(
                "empirical_decay: initial distance already at the floor");
        const auto fit =
            fit_decay(times, dist, dist_metric, spec.expected_rate,
                      spec.transient_fraction, spec.distance_floor);
        if (fit.kappa < kappa_min) {
            kappa_min = fit.kappa;
            worst_start = a;
        }
        overshoot_max = std::max(overshoot_max, fit.overshoot);
        worst_metric_violation =
            std::max(worst_metric_violation, fit.metric_step_violation);
        all_enough = all_enough && fit.enough_decay;
    };

    for (const auto& [a, b] : spec.pairs) run_experiment(a, std::optional<VectorXd>(b));
    for (const auto& p : spec.points) run_experiment(p, std::nullopt);

    Rates rates;
    rates.nu = spec.expected_rate;
    rates.kappa_fit = kappa_min;
    rates.overshoot_fit = overshoot_max;
    cert.rates = rates;
    if (m && m->bounds()) cert.bounds = *m->bounds();

    if (!all_enough) {
        cert.verdict = Verdict::Inconclusive;
        cert.notes.push_back(
            "horizon too short: distances fell less than three orders of magnitude");
        cert.margin = 0.0;
        return cert;
    }

    const double rate_floor = spec.expected_rate * (1.0 - spec.rate_tolerance);
    cert.margin = kappa_min - rate_floor;
    bool pass = kappa_min >= rate_floor;
    if (spec.overshoot_bound) {
        cert.provenance["overshoot_bound"] = *spec.overshoot_bound;
        pass = pass && overshoot_max <= *spec.overshoot_bound * 1.05;
    }
    if (m && field.dim == 1) {
        cert.provenance["metric_step_violation"] = worst_metric_violation;
        pass = pass && worst_metric_violation <= 0.0;
    }
    cert.verdict = pass ? Verdict::Pass : Verdict::Fail;
    if (!pass && worst_start.size() > 0)
        cert.witnesses.push_back({worst_start, kappa_min, "slowest fitted decay"});
    return cert;
}

Certificate forward_invariance_check(const fields::ScalarField& field,
                                     const VectorXd& center, double radius,
                                     double nu, int boundary_samples,
                                     double horizon, std::uint64_t seed) {
    if (!(radius > 0))
        throw std::invalid_argument("forward_invariance_check: radius <= 0");

    Certificate cert;
    cert.claim = "forward_invariance";
    cert.field_name = field.name;
    cert.field_params = field.params;
    auto ball = fields::Region::ball(center, radius,
                                     fields::SamplePlan::lowdisc(512, seed));
    cert.region = ball.descriptor();
    cert.provenance["nu"] = nu;
    cert.provenance["boundary_samples"] = boundary_samples;
    cert.provenance["horizon"] = horizon;

    // Hypothesis: identity-metric contraction at rate nu on the ball.
    const Certificate hypo = certify_region(field, nullptr, ball, nu);
    if (hypo.verdict != Verdict::Pass) {
        cert.verdict = Verdict::Inconclusive;
        cert.notes.push_back("hypothesis failed: ball is not contracting at rate nu "
                             "in the Euclidean measure");
        cert.margin = hypo.margin;
        cert.witnesses = hypo.witnesses;
        return cert;
    }

    const double allowed = radius * (1.0 + 1e-6);
    double max_excursion = 0.0;
    long exits = 0;
    VectorXd worst;
    for (const auto& x0 :
         detail::sphere_points(center, radius, boundary_samples, seed)) {
        const auto traj = flow::integrate(field, x0, horizon);
        double peak = 0.0;
        for (const auto& x : traj.states) peak = std::max(peak, (x - center).norm());
        if (peak > allowed) {
            ++exits;
            if (exits == 1) worst = x0;
        }
        max_excursion = std::max(max_excursion, peak);
    }
    cert.provenance["exits"] = static_cast<double>(exits);
    cert.provenance["max_excursion"] = max_excursion;
    cert.margin = (allowed - max_excursion) / radius;
    cert.verdict = exits == 0 ? Verdict::Pass : Verdict::Fail;
    if (exits > 0)
        cert.witnesses.push_back({worst, max_excursion, "trajectory left the ball"});
    return cert;
}

Certificate annulus_ies_check(const fields::ScalarField& field,
                              const fields::Region& compact_k, double nu,
                              double horizon, const AnnulusOptions& opts) {
    if (compact_k.kind() != fields::Region::Kind::Shell)
        throw std::invalid_argument("annulus_ies_check: K must be a shell region");
    const double r_in = compact_k.inner_radius();
    const double r_out = compact_k.radius();
    if (compact_k.contains(field.x_star))
        throw std::invalid_argument("annulus_ies_check: minimizer lies inside K");

    Certificate cert;
    cert.claim = "annulus_ies";
    cert.field_name = field.name;
    cert.field_params = field.params;
    cert.region = compact_k.descriptor();
    cert.provenance["nu"] = nu;
    cert.provenance["horizon"] = horizon;

    // Unique-equilibrium probe: any refined critical point away from x_star
    // makes the global-attractivity hypothesis unverifiable here.
    for (const auto& x : detail::lowdisc_ball(field.x_star, 1.5 * r_out, 4096,
                                              opts.seed + 23)) {
        if (field.gradient(x).norm() > 1e-3 * (1.0 + x.norm())) continue;
        const VectorXd z = fields::refine_minimizer(field, x);
        if (field.gradient(z).norm() < 1e-8 &&
            (z - field.x_star).norm() > 1e-4 * r_out) {
            cert.verdict = Verdict::Inconclusive;
            cert.notes.push_back("critical point away from the minimizer; unique "
                                 "globally attracting equilibrium not evidenced");
            cert.witnesses.push_back({z, field.gradient(z).norm(), "critical point"});
            return cert;
        }
    }

    // Contraction outside K on the sampled complement proxy: the inner ball
    // and a bounded shell out to shell_factor times K.
    auto inner = fields::Region::ball(compact_k.center(), r_in * (1.0 - 1e-9),
                                      fields::SamplePlan::lowdisc(1024, opts.seed));
    auto outer = fields::Region::shell(compact_k.center(), r_out * (1.0 + 1e-9),
                                       opts.shell_factor * r_out,
                                       fields::SamplePlan::lowdisc(2048, opts.seed));
    for (const auto* proxy : {&inner, &outer}) {
        const Certificate hypo = certify_region(field, nullptr, *proxy, nu);
        if (hypo.verdict != Verdict::Pass) {
            cert.verdict = Verdict::Inconclusive;
            cert.notes.push_back("hypothesis failed: complement proxy not "
                                 "contracting at rate nu");
            cert.witnesses = hypo.witnesses;
            return cert;
        }
    }
    cert.notes.push_back("complement proxied by a bounded shell; sampled, not proven");

    // Forward-invariant target ball strictly inside the hole of K.
    const double eps_ball = opts.ball_fraction * r_in;
    const Certificate ball_cert = forward_invariance_check(
        field, field.x_star, eps_ball, nu, 16, horizon, opts.seed + 5);
    if (ball_cert.verdict != Verdict::Pass) {
        cert.verdict = Verdict::Inconclusive;
        cert.notes.push_back("hypothesis failed: target ball not forward invariant");
        return cert;
    }

    // Measure bound on K and worst settle time into the ball.
    double m_hat = -std::numeric_limits<double>::infinity();
    const auto k_samples = compact_k.samples(&field);
    for (const auto& x : k_samples)
        m_hat = std::max(m_hat, lognorm::mu2(-field.hessian(x)));

    double t_hat = 0.0;
    detail::Rng rng(opts.seed + 7);
    std::vector<VectorXd> starts;
    for (int i = 0; i < opts.n_starts && i < static_cast<int>(k_samples.size()); ++i)
        starts.push_back(k_samples[rng.next_u64() % k_samples.size()]);
    for (const auto& x0 : starts) {
        const auto traj = flow::integrate(field, x0, horizon);
        const double ts = flow::settle_time(traj, field.x_star, eps_ball);
        if (!std::isfinite(ts))
            throw std::runtime_error("annulus_ies_check: settle time exceeds horizon");
        t_hat = std::max(t_hat, ts);
    }
    // When K itself contracts at rate nu the envelope needs no overshoot.
    const double c_hat = std::exp(std::max(0.0, m_hat + nu) * t_hat);
    cert.provenance["M_hat"] = m_hat;
    cert.provenance["T_hat"] = t_hat;
    cert.provenance["overshoot_predicted"] = c_hat;
    cert.provenance["ball_radius"] = eps_ball;

    // Every seeded pair must decay under the predicted envelope.
    double worst_excess = -std::numeric_limits<double>::infinity();
    VectorXd worst_pair_start;
    for (int p = 0; p < opts.n_pairs; ++p) {
        const auto& a = k_samples[rng.next_u64() % k_samples.size()];
        const auto& b = k_samples[rng.next_u64() % k_samples.size()];
        if ((a - b).norm() < 1e-9) continue;
        const auto ta = flow::integrate(field, a, horizon);
        const auto tb = flow::integrate(field, b, horizon);
        const auto series = flow::pair_distance_series(ta, tb);
        const double d0 = series.euclidean.front();
        for (std::size_t i = 0; i < series.times.size(); ++i) {
            const double envelope = c_hat * std::exp(-nu * series.times[i]) * d0 *
                                    (1.0 + opts.pair_tol);
            const double excess = series.euclidean[i] / envelope - 1.0;
            if (excess > worst_excess) {
                worst_excess = excess;
                worst_pair_start = a;
            }
        }
    }
    cert.margin = -worst_excess;
    cert.verdict = worst_excess <= 0.0 ? Verdict::Pass : Verdict::Fail;
    if (cert.verdict == Verdict::Fail)
        cert.witnesses.push_back(
            {worst_pair_start, worst_excess, "pair exceeded predicted envelope"});
    Rates rates;
    rates.nu = nu;
    rates.kappa_fit = nu;
    rates.overshoot_fit = c_hat;
    cert.rates = rates;
    return cert;
}

}  // namespace conflow::verify
