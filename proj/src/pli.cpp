#include "conflow/pli.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "conflow/detail/quadrature.hpp"

namespace conflow::pli {
namespace {

/// Integrate f over [a, b] decade by decade; suited to slowly varying
/// integrands over ranges spanning many orders of magnitude.
double integrate_decades(const std::function<double(double)>& f, double a, double b,
                         double abs_tol = 1e-12) {
    double total = 0.0;
    double left = a;
    while (left < b) {
        const double right = std::min(b, left * 10.0);
        total += conflow::detail::integrate_adaptive(f, left, right, abs_tol, 1e-12)
                     .value;
        left = right;
    }
    return total;
}

/// Least-squares slope of log(alpha) against log(s) over [s_lo, s_hi].
double log_log_slope(const std::function<double(double)>& alpha, double s_lo,
                     double s_hi, int n = 33) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (int i = 0; i < n; ++i) {
        const double s =
            std::exp(std::log(s_lo) + (std::log(s_hi) - std::log(s_lo)) * i / (n - 1));
        const double a = alpha(s);
        if (!(a > 0)) throw std::invalid_argument("alpha not positive on the interval");
        const double x = std::log(s), y = std::log(a);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace

ComparisonFunction make_sqrt_mu(double mu) {
    if (!(mu > 0)) throw std::invalid_argument("make_sqrt_mu: mu <= 0");
    ComparisonFunction a;
    a.family = ComparisonFunction::Family::SqrtMu;
    a.params = {{"mu", mu}};
    a.eval = [mu](double s) { return std::sqrt(mu * std::max(0.0, s)); };
    a.tail_exponent = 0.5;
    a.label = "sqrt_mu";
    return a;
}

ComparisonFunction make_power(double c, double q) {
    if (!(c > 0) || !(q > 0)) throw std::invalid_argument("make_power: c, q > 0");
    ComparisonFunction a;
    a.family = ComparisonFunction::Family::Power;
    a.params = {{"c", c}, {"q", q}};
    a.eval = [c, q](double s) { return c * std::pow(std::max(0.0, s), q); };
    a.tail_exponent = q;
    a.label = "power";
    return a;
}

ComparisonFunction make_log(double scale) {
    if (!(scale > 0)) throw std::invalid_argument("make_log: scale <= 0");
    ComparisonFunction a;
    a.family = ComparisonFunction::Family::Log;
    a.params = {{"scale", scale}};
    a.eval = [scale](double s) { return scale * std::log1p(std::max(0.0, s)); };
    // No power-law tail; classification falls back to the numeric fit.
    a.label = "log";
    return a;
}

ComparisonFunction make_custom(std::function<double(double)> fn, std::string label,
                               std::optional<double> tail_exponent) {
    ComparisonFunction a;
    a.family = ComparisonFunction::Family::Custom;
    a.eval = std::move(fn);
    a.tail_exponent = tail_exponent;
    a.label = std::move(label);
    validate_kinf(a);
    return a;
}

void validate_kinf(const ComparisonFunction& alpha) {
    if (std::abs(alpha(0.0)) > 1e-15)
        throw std::invalid_argument("comparison function: alpha(0) != 0");
    double prev = 0.0;
    for (int k = -6; k <= 12; ++k) {
        const double v = alpha(std::pow(10.0, k));
        if (!(v > prev))
            throw std::invalid_argument(
                "comparison function: not strictly increasing on probe grid");
        prev = v;
    }
    // Unbounded-growth probe: saturating functions flatten across the last
    // six decades of the grid.
    if (!(alpha(1e12) > 1.05 * alpha(1e6)))
        throw std::invalid_argument("comparison function: growth saturates (not K-infinity)");
}

ComparisonFunction comparison_from_spec(const std::string& family,
                                        const std::map<std::string, double>& params) {
    auto get = [&params](const std::string& k, double fallback) {
        const auto it = params.find(k);
        return it == params.end() ? fallback : it->second;
    };
    if (family == "sqrt_mu") return make_sqrt_mu(get("mu", 1.0));
    if (family == "power") return make_power(get("c", 1.0), get("q", 0.75));
    if (family == "log") return make_log(get("scale", 0.5));
    throw std::invalid_argument("comparison_from_spec: unknown family '" + family +
                                "' (use sqrt_mu | power | log | fit_power | fit_gpli)");
}

verify::Certificate check_kinf_pli(const fields::ScalarField& field,
                                   const ComparisonFunction& alpha,
                                   const fields::Region& region) {
    if (!std::isfinite(field.f_star))
        throw std::invalid_argument("check_kinf_pli: field has no finite f_star");
    const auto pts = region.samples(&field);
    if (pts.empty()) throw std::invalid_argument("check_kinf_pli: empty sample plan");

    verify::Certificate cert;
    cert.claim = "pli";
    cert.field_name = field.name;
    cert.field_params = field.params;
    cert.region = region.descriptor();

    double worst = std::numeric_limits<double>::infinity();
    Eigen::VectorXd worst_x;
    for (const auto& x : pts) {
        const double s = field.level(x);
        const double a = alpha(s);
        const double tol = 1e-9 * (1.0 + a);  // roundoff allowance only
        const double slack = field.gradient(x).norm() - a + tol;
        if (slack < worst) {
            worst = slack;
            worst_x = x;
        }
    }
    cert.margin = worst;
    cert.verdict = worst >= 0 ? verify::Verdict::Pass : verify::Verdict::Fail;
    if (cert.verdict == verify::Verdict::Fail)
        cert.witnesses.push_back(
            {worst_x, worst, "gradient norm falls below alpha(f - f_star)"});
    cert.notes.push_back("alpha: " + alpha.label);
    for (const auto& [k, v] : alpha.params) cert.provenance["alpha_" + k] = v;
    return cert;
}

double fit_gpli_mu(const fields::ScalarField& field, const fields::Region& region,
                   double exclusion_radius) {
    const auto pts = region.samples(&field);
    double mu = std::numeric_limits<double>::infinity();
    long used = 0;
    for (const auto& x : pts) {
        if ((x - field.x_star).norm() <= exclusion_radius) continue;  // 0/0 guard
        const double s = field.level(x);
        if (s <= 0.0) continue;
        mu = std::min(mu, field.gradient(x).squaredNorm() / s);
        ++used;
    }
    if (used == 0)
        throw std::invalid_argument("fit_gpli_mu: region contains only the minimizer");
    return mu;
}

std::vector<double> lojasiewicz_exponent_probe(const fields::ScalarField& field,
                                               double p,
                                               const std::vector<double>& ray_points) {
    if (!(p > 0)) throw std::invalid_argument("probe: p <= 0");
    for (std::size_t i = 1; i < ray_points.size(); ++i)
        if (!(ray_points[i] > ray_points[i - 1]) || !(ray_points[0] > 0))
            throw std::invalid_argument("probe: ray points must be positive increasing");
    std::vector<double> out;
    out.reserve(ray_points.size());
    Eigen::VectorXd dir = Eigen::VectorXd::Zero(field.dim);
    dir(0) = 1.0;
    for (const double t : ray_points) {
        const Eigen::VectorXd x = field.x_star + t * dir;
        out.push_back(std::pow(field.gradient(x).norm(), p) / field.level(x));
    }
    return out;
}

std::string to_string(TailVerdict v) {
    switch (v) {
        case TailVerdict::Convergent: return "convergent";
        case TailVerdict::Divergent: return "divergent";
        case TailVerdict::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

StrongPliResult strong_pli_check(const ComparisonFunction& alpha, double s0,
                                 double tail_horizon) {
    if (!(s0 > 0)) throw std::invalid_argument("strong_pli_check: s0 <= 0");
    if (!(tail_horizon > s0))
        throw std::invalid_argument("strong_pli_check: horizon <= s0");

    auto integrand = [&alpha](double s) {
        const double a = alpha(s);
        if (!(a > 0)) throw std::invalid_argument("alpha not positive on the interval");
        return 1.0 / (a * a);
    };

    StrongPliResult r;
    r.finite_part = integrate_decades(integrand, s0, tail_horizon);
    r.tail_exponent = alpha.tail_exponent
                          ? *alpha.tail_exponent
                          : log_log_slope(alpha.eval, tail_horizon / 10.0, tail_horizon);

    constexpr double kMargin = 0.05;
    const double q = r.tail_exponent;
    if (q > 0.5 + kMargin) {
        r.verdict = TailVerdict::Convergent;
        // Remainder of integral of (c s^q)^-2 past the horizon, anchoring the
        // constant at the horizon value.
        const double c = alpha(tail_horizon) / std::pow(tail_horizon, q);
        r.tail_bound =
            std::pow(tail_horizon, 1.0 - 2.0 * q) / (c * c * (2.0 * q - 1.0));
    } else if (q <= 0.5) {
        r.verdict = TailVerdict::Divergent;
    } else {
        r.verdict = TailVerdict::Inconclusive;
    }
    return r;
}

ComparisonFunction fit_power_alpha(const fields::ScalarField& field,
                                   const fields::Region& region, double safety) {
    const auto pts = region.samples(&field);
    std::vector<std::pair<double, double>> data;  // (level, grad norm)
    double s_max = 0.0;
    for (const auto& x : pts) {
        const double s = field.level(x);
        if (s <= 1e-12) continue;
        data.push_back({s, field.gradient(x).norm()});
        s_max = std::max(s_max, s);
    }
    if (data.size() < 8)
        throw std::invalid_argument("fit_power_alpha: too few usable samples");

    // Exponent: log-log least squares over the top decade of levels.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    long m = 0;
    for (const auto& [s, g] : data) {
        if (s < s_max / 10.0 || !(g > 0)) continue;
        const double x = std::log(s), y = std::log(g);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    if (m < 4) throw std::invalid_argument("fit_power_alpha: top decade too sparse");
    const double q = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    if (!(q > 0)) throw std::invalid_argument("fit_power_alpha: non-increasing fit");

    // Constant: largest c with c s^q <= |grad f| at every usable sample,
    // deflated so fresh samples keep positive margin.
    double c = std::numeric_limits<double>::infinity();
    for (const auto& [s, g] : data) c = std::min(c, g / std::pow(s, q));
    return make_power(safety * c, q);
}

}  // namespace conflow::pli
