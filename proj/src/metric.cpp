#include "conflow/metric.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "conflow/detail/quadrature.hpp"
#include "conflow/detail/sampling.hpp"

namespace conflow::metric {

using Eigen::VectorXd;

double smooth_transition(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / t);
    const double b = std::exp(-1.0 / (1.0 - t));
    return a / (a + b);
}

double smooth_transition_integral(double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 0.5 + (u - 1.0);  // symmetric blend integrates to 1/2
    static const detail::HermiteTable table = [] {
        const int n = 257;
        std::vector<double> x(n), y(n), d(n);
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            x[i] = double(i) / (n - 1);
            if (i > 0)
                acc += detail::integrate_adaptive(smooth_transition, x[i - 1], x[i],
                                                  1e-14, 1e-14)
                           .value;
            y[i] = acc;
            d[i] = smooth_transition(x[i]);
        }
        return detail::HermiteTable(std::move(x), std::move(y), std::move(d),
                                    detail::Extrapolation::Error);
    }();
    return table.eval(u);
}

// ---------------------------------------------------------------------------
// ConformalMetric
// ---------------------------------------------------------------------------

double ConformalMetric::g(double level) const {
    if (level <= domain_start_) return table_.front_y();
    if (level <= table_.back_x()) return table_.eval(level);
    if (extrap_ == detail::Extrapolation::ConstantValue) return table_.back_y();
    throw std::out_of_range("ConformalMetric: level beyond the tabulated range");
}

double ConformalMetric::g_prime(double level) const {
    if (level <= domain_start_) return 0.0;
    if (level <= table_.back_x())
        return g_prime_ ? g_prime_(level) : table_.deriv(level);
    if (extrap_ == detail::Extrapolation::ConstantValue) return 0.0;
    throw std::out_of_range("ConformalMetric: level beyond the tabulated range");
}

double ConformalMetric::weight(double level) const { return std::exp(2.0 * g(level)); }

bool ConformalMetric::covers(double level) const {
    return level <= table_.back_x() ||
           extrap_ == detail::Extrapolation::ConstantValue;
}

verify::Bounds ConformalMetric::bounds_on(const fields::ScalarField& field,
                                          const fields::Region& region) const {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& x : region.samples(&field)) {
        const double v = field.value(x);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    // g is nondecreasing, so the extremes of the level range give the bounds.
    return verify::Bounds{2.0 * g(lo), 2.0 * g(hi)};
}

ConformalMetric ConformalMetric::from_profile(std::function<double(double)> g_prime,
                                              double domain_start, double table_end,
                                              std::vector<double> knots,
                                              detail::Extrapolation extrapolation,
                                              nlohmann::ordered_json header,
                                              double g_at_start,
                                              int nodes_per_decade) {
    if (!(table_end > domain_start))
        throw std::invalid_argument("from_profile: table_end <= domain_start");

    const double span = table_end - domain_start;
    std::vector<double> nodes;
    nodes.push_back(domain_start);
    const double t1 = span * 1e-10;
    const int n = nodes_per_decade * 10;
    for (int i = 0; i <= n; ++i)
        nodes.push_back(domain_start + t1 * std::pow(span / t1, double(i) / n));
    for (double k : knots)
        if (k > domain_start && k < table_end) nodes.push_back(k);
    nodes.push_back(table_end);

    auto dedupe = [&](std::vector<double>& xs) {
        std::sort(xs.begin(), xs.end());
        xs.erase(std::unique(xs.begin(), xs.end(),
                             [&](double a, double b) {
                                 return b - a <= 1e-13 * (std::abs(a) + span * 1e-3);
                             }),
                 xs.end());
    };
    dedupe(nodes);

    std::vector<double> values, slopes;
    auto tabulate = [&] {
        values.assign(nodes.size(), 0.0);
        slopes.assign(nodes.size(), 0.0);
        values[0] = g_at_start;
        slopes[0] = std::max(0.0, g_prime(nodes[0]));
        for (std::size_t i = 1; i < nodes.size(); ++i) {
            const auto panel = detail::integrate_adaptive(
                g_prime, nodes[i - 1], nodes[i], 1e-10, 1e-12);
            values[i] = values[i - 1] + panel.value;
            slopes[i] = g_prime(nodes[i]);
            if (slopes[i] < -1e-12)
                throw std::invalid_argument(
                    "from_profile: profile derivative negative");
            slopes[i] = std::max(0.0, slopes[i]);
        }
    };
    tabulate();

    // Refine panels where the endpoint slopes exceed three times the secant:
    // there the cubic would overshoot and break monotonicity of g.
    for (int round = 0; round < 10; ++round) {
        std::vector<double> inserts;
        for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
            const double h = nodes[i + 1] - nodes[i];
            if (h <= 64.0 * std::numeric_limits<double>::epsilon() *
                         (std::abs(nodes[i]) + 1.0))
                continue;
            const double secant = (values[i + 1] - values[i]) / h;
            const double cap = 3.0 * secant + 1e-14 * (1.0 + std::abs(secant));
            if (slopes[i] > cap || slopes[i + 1] > cap)
                inserts.push_back(nodes[i] + 0.5 * h);
        }
        if (inserts.empty()) break;
        nodes.insert(nodes.end(), inserts.begin(), inserts.end());
        dedupe(nodes);
        tabulate();
    }

    ConformalMetric m;
    m.g_prime_ = std::move(g_prime);
    m.table_ = detail::HermiteTable(std::move(nodes), std::move(values),
                                    std::move(slopes), extrapolation);
    m.domain_start_ = domain_start;
    m.extrap_ = extrapolation;
    m.header_ = std::move(header);
    return m;
}

void ConformalMetric::save(const std::string& csv_path,
                           const std::string& json_path) const {
    std::ofstream csv(csv_path);
    if (!csv) throw std::runtime_error("cannot write " + csv_path);
    csv << "level,g,g_prime\n";
    char buf[128];
    const auto& xs = table_.nodes();
    for (std::size_t i = 0; i < xs.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", xs[i],
                      table_.values()[i], table_.slopes()[i]);
        csv << buf;
    }
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["domain_start"] = domain_start_;
    j["extrapolation"] =
        extrap_ == detail::Extrapolation::ConstantValue ? "constant" : "error";
    if (bounds_) {
        j["bounds"] = {{"log_beta_low", bounds_->log_beta_low},
                       {"log_alpha_up", bounds_->log_alpha_up}};
        if (!bounds_region_.is_null()) j["bounds_region"] = bounds_region_;
    }
    j["profile"] = header_;
    std::ofstream js(json_path);
    if (!js) throw std::runtime_error("cannot write " + json_path);
    js << verify::dump_json(j);
}

ConformalMetric ConformalMetric::load(const std::string& csv_path,
                                      const std::string& json_path) {
    std::ifstream csv(csv_path);
    if (!csv) throw std::runtime_error("cannot read " + csv_path);
    std::string line;
    std::getline(csv, line);  // header row
    std::vector<double> xs, ys, ds;
    while (std::getline(csv, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        double a, b, c;
        char comma;
        ss >> a >> comma >> b >> comma >> c;
        xs.push_back(a);
        ys.push_back(b);
        ds.push_back(c);
    }
    std::ifstream js(json_path);
    if (!js) throw std::runtime_error("cannot read " + json_path);
    nlohmann::json j = nlohmann::json::parse(js);

    ConformalMetric m;
    m.domain_start_ = j.at("domain_start").get<double>();
    m.extrap_ = j.at("extrapolation").get<std::string>() == "constant"
                    ? detail::Extrapolation::ConstantValue
                    : detail::Extrapolation::Error;
    m.table_ = detail::HermiteTable(std::move(xs), std::move(ys), std::move(ds),
                                    m.extrap_);
    if (j.contains("bounds")) {
        verify::Bounds b;
        b.log_beta_low = j.at("bounds").at("log_beta_low").get<double>();
        b.log_alpha_up = j.at("bounds").at("log_alpha_up").get<double>();
        m.bounds_ = b;
        if (j.contains("bounds_region")) m.bounds_region_ = j.at("bounds_region");
    }
    if (j.contains("profile")) m.header_ = j.at("profile");
    return m;
}

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

ConformalMetric build_envelope_metric(const curvature::ConcavityProfile& profile,
                                      const pli::ComparisonFunction& alpha,
                                      double f_star, double delta, double table_end,
                                      double smoothing_fraction) {
    if (!(delta > 0)) throw std::invalid_argument("build_envelope_metric: delta <= 0");
    if (!(smoothing_fraction > 0 && smoothing_fraction < 1))
        throw std::invalid_argument("build_envelope_metric: smoothing_fraction");
    profile.validate();

    const double domain_start = f_star + 0.5 * delta;
    const double w = smoothing_fraction * delta;
    auto prof = profile;    // value copies keep the closure self-contained
    auto comp = alpha.eval;
    auto gp = [prof, comp, f_star, domain_start, w](double y) {
        if (y <= domain_start) return 0.0;
        const double sig = smooth_transition((y - domain_start) / w);
        if (sig == 0.0) return 0.0;
        const double a = comp(y - f_star);
        if (!(a > 0))
            throw std::runtime_error("envelope metric: alpha vanished above f_star");
        return sig * std::max(0.0, prof.eval(y)) / (a * a);
    };

    std::vector<double> knots = profile.y_grid;
    knots.push_back(domain_start + w);
    knots.push_back(f_star + delta);

    nlohmann::ordered_json header;
    header["family"] = "envelope_integral";
    header["f_star"] = f_star;
    header["delta"] = delta;
    header["smoothing_window"] = w;
    header["alpha"] = alpha.label;
    for (const auto& [k, v] : alpha.params) header["alpha_" + k] = v;
    header["envelope"] = profile.to_json();

    return ConformalMetric::from_profile(gp, domain_start, table_end,
                                         std::move(knots),
                                         detail::Extrapolation::Error,
                                         std::move(header));
}

ConformalMetric build_integrable_tail_metric(const pli::ComparisonFunction& alpha,
                                             double s0, double c, double f_star,
                                             double table_end,
                                             double smoothing_width) {
    if (!(c > 0)) throw std::invalid_argument("integrable_tail_metric: c <= 0");
    if (!(s0 > f_star))
        throw std::invalid_argument("integrable_tail_metric: s0 <= f_star");
    if (!(smoothing_width > 0))
        throw std::invalid_argument("integrable_tail_metric: smoothing_width <= 0");

    const auto check = pli::strong_pli_check(alpha, s0 - f_star);
    if (check.verdict != pli::TailVerdict::Convergent)
        throw std::invalid_argument(
            "integrable_tail_metric: comparison function fails the "
            "integrability check (" + pli::to_string(check.verdict) + ")");

    auto comp = alpha.eval;
    auto gp = [comp, s0, c, f_star, smoothing_width](double y) {
        if (y <= s0) return 0.0;
        const double sig = smooth_transition((y - s0) / smoothing_width);
        if (sig == 0.0) return 0.0;
        const double a = comp(y - f_star);
        return c * sig / (a * a);
    };

    nlohmann::ordered_json header;
    header["family"] = "integrable_tail";
    header["f_star"] = f_star;
    header["s0"] = s0;
    header["c"] = c;
    header["smoothing_width"] = smoothing_width;
    header["alpha"] = alpha.label;
    for (const auto& [k, v] : alpha.params) header["alpha_" + k] = v;
    header["tail_exponent"] = check.tail_exponent;

    ConformalMetric m = ConformalMetric::from_profile(
        gp, s0, table_end, {s0 + smoothing_width},
        detail::Extrapolation::ConstantValue, std::move(header));
    // Uniform bounds: 0 <= g <= c * integral of alpha^-2 over the whole tail.
    m.set_bounds(verify::Bounds{0.0, 2.0 * c * check.total()});
    return m;
}

ConformalMetric patch_metric_outside_band(const ConformalMetric& input, double a,
                                          double b, double eps, double nu) {
    if (!(eps > 0)) throw std::invalid_argument("patch: eps <= 0");
    const double v_min = input.g(input.domain_start());
    const double v_max = input.g(input.table_end());
    if (a - eps < v_min - 1e-12)
        throw std::invalid_argument("patch: a - eps below the input profile start");
    const bool finite_b = std::isfinite(b);
    if (finite_b && !(b > a)) throw std::invalid_argument("patch: b <= a");
    if (finite_b && b + eps > v_max + 1e-9)
        throw std::invalid_argument("patch: b + eps beyond the input profile range");

    auto inner = std::make_shared<ConformalMetric>(input);
    auto ramp = [a, b, eps, finite_b](double v) {
        if (v <= a - eps) return 0.0;
        if (v < a) return smooth_transition((v - (a - eps)) / eps);
        if (!finite_b || v <= b) return 1.0;
        if (v < b + eps) return 1.0 - smooth_transition((v - b) / eps);
        return 0.0;
    };
    auto gp = [inner, ramp](double y) { return ramp(inner->g(y)) * inner->g_prime(y); };

    // Invert the monotone inner profile to place knots at the band edges.
    auto v_inverse = [&](double target) {
        double lo = input.domain_start(), hi = input.table_end();
        if (target <= v_min) return lo;
        if (target >= v_max) return hi;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (input.g(mid) >= target ? hi : lo) = mid;
        }
        return 0.5 * (lo + hi);
    };

    const double start_level = v_inverse(a - eps);
    std::vector<double> knots{v_inverse(a)};
    if (finite_b) {
        knots.push_back(v_inverse(b));
        knots.push_back(v_inverse(b + eps));
    }
    for (double s : input.table_nodes()) knots.push_back(s);

    nlohmann::ordered_json header;
    header["family"] = "band_patch";
    header["a"] = a;
    header["b"] = finite_b ? nlohmann::ordered_json(b) : nlohmann::ordered_json("inf");
    header["eps"] = eps;
    header["nu_outside"] = nu;
    header["inner"] = input.header();

    ConformalMetric out = ConformalMetric::from_profile(
        gp, start_level, input.table_end(), std::move(knots),
        finite_b ? detail::Extrapolation::ConstantValue : input.extrapolation(),
        std::move(header), a - 0.5 * eps);
    if (finite_b)
        out.set_bounds(verify::Bounds{2.0 * (a - 0.5 * eps),
                                      2.0 * out.g(out.table_end())});
    return out;
}

double strong_convexity_level(const fields::ScalarField& field,
                              double lambda_target, std::uint64_t seed) {
    auto sampled_min_lambda = [&](double delta) {
        const double level = field.f_star + delta;
        double R;
        try {
            R = fields::bracket_sublevel_radius(field, level);
        } catch (const std::exception&) {
            return -std::numeric_limits<double>::infinity();
        }
        double lmin = std::numeric_limits<double>::infinity();
        for (const auto& x : detail::lowdisc_ball(field.x_star, R, 1024, seed)) {
            if (field.value(x) >= level) continue;
            lmin = std::min(lmin, curvature::lambda_min_hessian(field, x));
        }
        // Boundary hits along shell rays: the level surface is where the
        // constraint binds first for the catalog geometries.
        for (const auto& dir : detail::sphere_points(field.x_star, 1.0, 64, seed + 3)) {
            VectorXd lo = field.x_star, hi = field.x_star + R * (dir - field.x_star);
            if (!(field.value(hi) > level)) continue;
            for (int it = 0; it < 60; ++it) {
                const VectorXd mid = 0.5 * (lo + hi);
                (field.value(mid) > level ? hi : lo) = mid;
            }
            lmin = std::min(lmin, curvature::lambda_min_hessian(field, lo));
        }
        return lmin;
    };
    auto ok = [&](double delta) { return sampled_min_lambda(delta) > lambda_target; };

    double scale = std::max(1.0, std::abs(field.f_star));
    double lo = 1e-9 * scale;
    if (!ok(lo)) throw std::runtime_error(
        "strong_convexity_level: no neighborhood of the minimizer meets the "
        "target curvature");
    double hi = lo;
    while (ok(hi) && hi < 1e12 * scale) {
        lo = hi;
        hi *= 2.0;
    }
    if (hi >= 1e12 * scale) return lo;  // target curvature holds out to the cap
    for (int it = 0; it < 50; ++it) {
        const double mid = 0.5 * (lo + hi);
        (ok(mid) ? lo : hi) = mid;
    }
    return lo;
}

SublevelPatchResult build_sublevel_patch_metric(const fields::ScalarField& field,
                                                double m,
                                                const fields::Region& search_box,
                                                std::uint64_t seed) {
    const double nu_star = curvature::lambda_min_hessian(field, field.x_star);
    if (!(nu_star > 0))
        throw std::invalid_argument(
            "sublevel_patch_metric: field not strongly convex at the minimizer");

    const auto cls = curvature::classify_concavity(field, m, search_box);
    if (!cls.state_bounded_pass())
        throw std::invalid_argument(
            "sublevel_patch_metric: state_bounded classification failed");

    // Smallest sublevel set enclosing every sampled concavity violation.
    double y_S = field.f_star;
    for (const auto& x : search_box.samples(&field))
        if (curvature::lambda_min_hessian(field, x) < m)
            y_S = std::max(y_S, field.value(x));

    // Nothing concave sampled: any small sublevel set works.
    if (y_S <= field.f_star) y_S = field.f_star + 1.0;
    const double y_b = field.f_star + 1.3 * (y_S - field.f_star) + 0.1;
    // The inner strong-convexity level can extend arbitrarily far for benign
    // fields; keep it strictly inside the sublevel band.
    const double delta_in = std::min(strong_convexity_level(field, 0.9 * nu_star, seed),
                                     0.4 * (y_b - field.f_star));
    const double l = 0.1 * std::min(m, nu_star);

    // Cache the sampled sublevel data once; the bisection predicate is then a
    // linear scan.
    fields::Region X = fields::Region::sublevel(
        y_b, fields::SamplePlan::lowdisc(4096, seed + 11));
    std::vector<std::pair<double, double>> cache;  // (lambda_min, |grad|^2)
    for (const auto& x : X.samples(&field))
        cache.push_back({curvature::lambda_min_hessian(field, x),
                         field.gradient(x).squaredNorm()});
    auto worst_L = [&cache](double c) {
        double worst = -std::numeric_limits<double>::infinity();
        for (const auto& [lmin, g2] : cache) worst = std::max(worst, -lmin - c * g2);
        return worst;
    };

    double c_lo = 1e-4, c_hi = 1e4;
    if (worst_L(c_hi) > -l) {
        std::ostringstream msg;
        msg << "sublevel_patch_metric: bisection exhausted the coefficient range; "
               "worst contraction value " << worst_L(c_hi) << " at c = " << c_hi;
        throw std::runtime_error(msg.str());
    }
    double c_star;
    if (worst_L(c_lo) <= -l) {
        c_star = c_lo;
    } else {
        for (int it = 0; it < 60; ++it) {
            const double mid = std::sqrt(c_lo * c_hi);  // geometric bisection
            (worst_L(mid) <= -l ? c_hi : c_lo) = mid;
        }
        c_star = c_hi;
    }
    const double c_used = 1.25 * c_star;  // headroom for off-grid points

    const double a = c_used * delta_in;
    const double b = c_used * (y_b - field.f_star);
    const double eps_v = std::min(0.5 * a, 0.25 * (b - a));
    if (!(eps_v > 0))
        throw std::runtime_error("sublevel_patch_metric: degenerate band");

    nlohmann::ordered_json header;
    header["family"] = "linear_level";
    header["f_star"] = field.f_star;
    header["c"] = c_used;

    const double table_end =
        field.f_star + (y_b - field.f_star) + 2.0 * eps_v / c_used + 1.0;
    ConformalMetric base = ConformalMetric::from_profile(
        [c_used](double) { return c_used; }, field.f_star, table_end, {},
        detail::Extrapolation::Error, std::move(header));

    SublevelPatchResult out;
    out.metric = patch_metric_outside_band(base, a, b, eps_v, std::min(m, 0.9 * nu_star));
    out.c_star = c_star;
    out.c_used = c_used;
    out.level_b = y_b;
    out.delta_in = delta_in;
    out.rate = std::min({l, m, 0.9 * nu_star});
    return out;
}

}  // namespace conflow::metric
