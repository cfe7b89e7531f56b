#include "conflow/fields.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "conflow/detail/piecewise.hpp"
#include "conflow/detail/sampling.hpp"

namespace conflow::fields {
namespace {

using detail::PiecewisePoly;
using detail::Poly;

double get_param(const std::map<std::string, double>& p, const std::string& key,
                 double fallback) {
    const auto it = p.find(key);
    return it == p.end() ? fallback : it->second;
}

int get_dim(const std::map<std::string, double>& p, int fallback = 1) {
    const double d = get_param(p, "dim", fallback);
    const int dim = static_cast<int>(d);
    if (dim < 1 || dim > 8 || dim != d)
        throw std::invalid_argument("catalog_get: dim must be an integer in [1,8]");
    return dim;
}

/// Radially symmetric field f(x) = h(|x|) from scalar profile callables.
/// Requires h'(0) = 0 so that gradient and Hessian are well defined at 0.
ScalarField radial_field(int dim, std::function<double(double)> h,
                         std::function<double(double)> dh,
                         std::function<double(double)> d2h) {
    ScalarField f;
    f.dim = dim;
    f.value = [h](const VectorXd& x) { return h(x.norm()); };
    f.gradient = [dh](const VectorXd& x) {
        const double r = x.norm();
        if (r < 1e-12) return VectorXd(VectorXd::Zero(x.size()));
        return VectorXd((dh(r) / r) * x);
    };
    f.hessian = [dh, d2h](const VectorXd& x) {
        const int n = static_cast<int>(x.size());
        const double r = x.norm();
        if (r < 1e-9) return MatrixXd(d2h(0.0) * MatrixXd::Identity(n, n));
        const VectorXd u = x / r;
        const double radial = d2h(r);
        const double tangential = dh(r) / r;
        // Each off-diagonal pair is assigned from one computed value so the
        // matrix is symmetric to the last bit, not just up to roundoff.
        MatrixXd H(n, n);
        for (int i = 0; i < n; ++i) {
            H(i, i) = tangential + (radial - tangential) * u(i) * u(i);
            for (int j = i + 1; j < n; ++j) {
                const double w = (radial - tangential) * u(i) * u(j);
                H(i, j) = w;
                H(j, i) = w;
            }
        }
        return H;
    };
    return f;
}

ScalarField make_quadratic(const std::map<std::string, double>& params) {
    const int dim = get_dim(params);
    ScalarField f;
    f.name = "quadratic";
    f.params = {{"dim", double(dim)}};
    f.dim = dim;
    f.value = [](const VectorXd& x) { return 0.5 * x.squaredNorm(); };
    f.gradient = [](const VectorXd& x) { return x; };
    f.hessian = [](const VectorXd& x) {
        return MatrixXd(MatrixXd::Identity(x.size(), x.size()));
    };
    f.f_star = 0.0;
    f.x_star = VectorXd::Zero(dim);
    f.smoothness = Smoothness::CInfinity;
    return f;
}

ScalarField make_cos_example(const std::map<std::string, double>&) {
    ScalarField f;
    f.name = "cos_example";
    f.dim = 1;
    f.value = [](const VectorXd& x) {
        return 0.5 * x(0) * x(0) - 2.0 * std::cos(x(0));
    };
    f.gradient = [](const VectorXd& x) {
        return VectorXd(VectorXd::Constant(1, x(0) + 2.0 * std::sin(x(0))));
    };
    f.hessian = [](const VectorXd& x) {
        return MatrixXd(MatrixXd::Constant(1, 1, 1.0 + 2.0 * std::cos(x(0))));
    };
    f.f_star = -2.0;
    f.x_star = VectorXd::Zero(1);
    f.smoothness = Smoothness::CInfinity;
    return f;
}

ScalarField make_asinh_example(const std::map<std::string, double>&) {
    ScalarField f;
    f.name = "asinh_example";
    f.dim = 1;
    // f(x) = x*asinh(x) - sqrt(1+x^2) + 1, written as
    // x*asinh(x) - x^2/(1 + sqrt(1+x^2)) to avoid cancellation near 0.
    f.value = [](const VectorXd& v) {
        const double x = v(0);
        const double s = std::sqrt(1.0 + x * x);
        return x * std::asinh(x) - x * x / (1.0 + s);
    };
    f.gradient = [](const VectorXd& v) {
        return VectorXd(VectorXd::Constant(1, std::asinh(v(0))));
    };
    f.hessian = [](const VectorXd& v) {
        return MatrixXd(
            MatrixXd::Constant(1, 1, 1.0 / std::sqrt(1.0 + v(0) * v(0))));
    };
    f.f_star = 0.0;
    f.x_star = VectorXd::Zero(1);
    f.smoothness = Smoothness::CInfinity;
    return f;
}

// ---------------------------------------------------------------------------
// dimpled_quadratic: f(x) = |x|^2/2 - A w(|x|) cos(omega |x|^2) with w a C^2
// polynomial bump supported on [r1, r2], peak value 1/16. A radial profile
// with a single critical point at 0 provided the amplitude respects the
// validity bound checked below.
// ---------------------------------------------------------------------------

struct DimpleBump {
    double r1, r2;
    double peak = 1.0 / 16.0;

    double u(double r) const { return (r - r1) / (r2 - r1); }
    double value(double r) const {
        if (r <= r1 || r >= r2) return 0.0;
        const double t = u(r);
        const double p = t * (1.0 - t);
        return 4.0 * p * p * p;  // 4 u^3 (1-u)^3, peak 1/16 at u = 1/2
    }
    double deriv(double r) const {
        if (r <= r1 || r >= r2) return 0.0;
        const double t = u(r);
        const double du = 1.0 / (r2 - r1);
        return 12.0 * t * t * (1 - t) * (1 - t) * (1 - 2 * t) * du;
    }
    double deriv2(double r) const {
        if (r <= r1 || r >= r2) return 0.0;
        const double t = u(r);
        const double du = 1.0 / (r2 - r1);
        return 24.0 * t * (1 - t) * (5 * t * t - 5 * t + 1) * du * du;
    }
    /// max |w'| over the support (attained at u = (5 -+ sqrt(5))/10).
    double max_abs_deriv() const {
        const double t = (5.0 - std::sqrt(5.0)) / 10.0;
        return std::abs(12.0 * t * t * (1 - t) * (1 - t) * (1 - 2 * t)) /
               (r2 - r1);
    }
};

ScalarField make_dimpled_quadratic(const std::map<std::string, double>& params) {
    const int dim = get_dim(params);
    const double A = get_param(params, "amplitude", 2.0);
    const double omega = get_param(params, "omega", 1.0);
    const double r1 = get_param(params, "r1", 1.0);
    const double r2 = get_param(params, "r2", 4.0);
    if (!(0 < r1 && r1 < r2))
        throw std::invalid_argument("dimpled_quadratic: need 0 < r1 < r2");
    if (!(A > 0) || !(omega > 0))
        throw std::invalid_argument("dimpled_quadratic: amplitude, omega > 0");

    DimpleBump w{r1, r2};
    // Validity: h'(r) = r (1 + 2 A omega r... ) stays positive on (0, inf).
    // Sufficient condition: 2 A omega sup(w) < 1 and
    // A max|w'| < r1 (1 - 2 A omega sup w). Outside this range the family
    // can acquire spurious critical spheres, so reject the parameters.
    const double shrink = 1.0 - 2.0 * A * omega * w.peak;
    if (!(shrink > 0.0) || !(A * w.max_abs_deriv() < r1 * shrink))
        throw std::invalid_argument(
            "dimpled_quadratic: amplitude outside the validity range "
            "(minimizer uniqueness not guaranteed)");

    auto h = [A, omega, w](double r) {
        return 0.5 * r * r - A * w.value(r) * std::cos(omega * r * r);
    };
    auto dh = [A, omega, w](double r) {
        const double c = std::cos(omega * r * r), s = std::sin(omega * r * r);
        return r - A * (w.deriv(r) * c - 2.0 * omega * r * w.value(r) * s);
    };
    auto d2h = [A, omega, w](double r) {
        const double c = std::cos(omega * r * r), s = std::sin(omega * r * r);
        const double wv = w.value(r), w1 = w.deriv(r), w2 = w.deriv2(r);
        return 1.0 - A * (w2 * c - 4.0 * omega * r * w1 * s -
                          2.0 * omega * wv * s -
                          4.0 * omega * omega * r * r * wv * c);
    };

    ScalarField f = radial_field(dim, h, dh, d2h);
    f.name = "dimpled_quadratic";
    f.params = {{"dim", double(dim)}, {"amplitude", A}, {"omega", omega},
                {"r1", r1},           {"r2", r2}};
    f.f_star = 0.0;
    f.x_star = VectorXd::Zero(dim);
    f.smoothness = Smoothness::C2;
    return f;
}

// ---------------------------------------------------------------------------
// staircase_radial: h''(r) = 1 + r^2 away from dip windows of width 0.2
// centered at integer radii k >= 2, where it blends down to -1 through a
// C^1 smoothstep bump. h' and h are exact piecewise-polynomial
// antiderivatives with h'(0) = h(0) = 0.
// ---------------------------------------------------------------------------

PiecewisePoly staircase_second_derivative(double max_radius) {
    const double half = 0.1;
    const int k_max = std::max(2, static_cast<int>(std::floor(max_radius)) + 1);

    std::vector<double> breaks;
    std::vector<Poly> pieces;
    Eigen::VectorXd amb(3);
    amb << 1.0, 0.0, 1.0;  // 1 + r^2 in global coordinates
    const Poly ambient_global(amb);
    // Smoothstep s(t) = 3t^2 - 2t^3.
    Eigen::VectorXd sc(4);
    sc << 0.0, 0.0, 3.0, -2.0;
    const Poly smoothstep(sc);

    // Each entry adds the left break of a piece; the closing break is added last.
    auto push_piece = [&](double left, Poly p) {
        breaks.push_back(left);
        pieces.push_back(std::move(p));
    };
    auto local_quadratic = [](double shift, double c0) {
        Eigen::VectorXd v(3);
        v << c0 + shift * shift, 2.0 * shift, 1.0;  // (c0 + r^2) local at `shift`
        return Poly(v);
    };

    double cursor = 0.0;
    for (int k = 2; k <= k_max; ++k) {
        const double a = k - half, m = double(k), b = k + half;
        push_piece(cursor, ambient_global.compose_affine(cursor, 1.0));
        // Rising half: blend b(t) = s((r-a)/half); h'' = (1+r^2) - b (2+r^2).
        push_piece(a, local_quadratic(a, 1.0) -
                          smoothstep.compose_affine(0.0, 1.0 / half) *
                              local_quadratic(a, 2.0));
        // Falling half: blend b(t) = s((b-r)/half), local coordinate from m.
        push_piece(m, local_quadratic(m, 1.0) -
                          smoothstep.compose_affine(1.0, -1.0 / half) *
                              local_quadratic(m, 2.0));
        cursor = b;
    }
    // Trailing ambient piece; evaluation beyond the last break extends it
    // exactly since the piece is the ambient polynomial itself.
    push_piece(cursor, ambient_global.compose_affine(cursor, 1.0));
    breaks.push_back(cursor + 1.0);
    return PiecewisePoly(breaks, pieces);
}

ScalarField make_staircase_radial(const std::map<std::string, double>& params) {
    const int dim = get_dim(params);
    const double max_radius = get_param(params, "max_radius", 64.0);
    if (!(max_radius >= 4.0))
        throw std::invalid_argument("staircase_radial: max_radius >= 4 required");

    auto d2h_pp = std::make_shared<PiecewisePoly>(
        staircase_second_derivative(max_radius));
    auto dh_pp = std::make_shared<PiecewisePoly>(d2h_pp->antiderivative(0.0));
    auto h_pp = std::make_shared<PiecewisePoly>(dh_pp->antiderivative(0.0));

    auto h = [h_pp](double r) { return (*h_pp)(r); };
    auto dh = [dh_pp](double r) { return (*dh_pp)(r); };
    auto d2h = [d2h_pp](double r) { return (*d2h_pp)(r); };

    ScalarField f = radial_field(dim, h, dh, d2h);
    f.name = "staircase_radial";
    f.params = {{"dim", double(dim)}, {"max_radius", max_radius}};
    f.f_star = 0.0;
    f.x_star = VectorXd::Zero(dim);
    f.smoothness = Smoothness::C2;
    return f;
}

}  // namespace

SamplePlan SamplePlan::grid(std::vector<int> counts) {
    SamplePlan p;
    p.kind = Kind::PerAxisGrid;
    p.counts = std::move(counts);
    return p;
}

SamplePlan SamplePlan::lowdisc(int count, std::uint64_t seed) {
    SamplePlan p;
    p.kind = Kind::LowDiscrepancy;
    p.count = count;
    p.seed = seed;
    return p;
}

SamplePlan SamplePlan::log_axis(int per_side, double min_abs, bool two_sided,
                                bool include_zero) {
    SamplePlan p;
    p.kind = Kind::LogAxis;
    p.count = per_side;
    p.log_min_abs = min_abs;
    p.log_two_sided = two_sided;
    p.log_include_zero = include_zero;
    return p;
}

Region Region::box(VectorXd lo, VectorXd hi, SamplePlan plan) {
    if (lo.size() != hi.size() || lo.size() == 0 || ((hi - lo).array() <= 0).any())
        throw std::invalid_argument("Region::box: empty or inverted box");
    Region r;
    r.kind_ = Kind::Box;
    r.lo_ = std::move(lo);
    r.hi_ = std::move(hi);
    r.center_ = 0.5 * (r.lo_ + r.hi_);
    r.plan_ = std::move(plan);
    return r;
}

Region Region::box_symmetric(int dim, double half_width, SamplePlan plan) {
    return box(VectorXd::Constant(dim, -half_width),
               VectorXd::Constant(dim, half_width), std::move(plan));
}

Region Region::ball(VectorXd center, double radius, SamplePlan plan) {
    if (!(radius > 0)) throw std::invalid_argument("Region::ball: radius <= 0");
    Region r;
    r.kind_ = Kind::Ball;
    r.center_ = std::move(center);
    r.radius_ = radius;
    r.plan_ = std::move(plan);
    return r;
}

Region Region::shell(VectorXd center, double r_inner, double r_outer,
                     SamplePlan plan) {
    if (!(0 <= r_inner && r_inner < r_outer))
        throw std::invalid_argument("Region::shell: need 0 <= r_inner < r_outer");
    Region r;
    r.kind_ = Kind::Shell;
    r.center_ = std::move(center);
    r.inner_radius_ = r_inner;
    r.radius_ = r_outer;
    r.plan_ = std::move(plan);
    return r;
}

Region Region::sublevel(double level, SamplePlan plan) {
    Region r;
    r.kind_ = Kind::Sublevel;
    r.level_ = level;
    r.plan_ = std::move(plan);
    return r;
}

int Region::dim() const {
    switch (kind_) {
        case Kind::Box: return static_cast<int>(lo_.size());
        case Kind::Ball:
        case Kind::Shell: return static_cast<int>(center_.size());
        case Kind::Sublevel: return 0;  // determined by the field
    }
    return 0;
}

bool Region::contains(const VectorXd& x, const ScalarField* field) const {
    switch (kind_) {
        case Kind::Box:
            return (x.array() >= lo_.array()).all() &&
                   (x.array() <= hi_.array()).all();
        case Kind::Ball: return (x - center_).norm() <= radius_;
        case Kind::Shell: {
            const double r = (x - center_).norm();
            return r >= inner_radius_ && r <= radius_;
        }
        case Kind::Sublevel:
            if (!field) throw std::invalid_argument("sublevel contains: field required");
            return field->value(x) <= level_;
    }
    return false;
}

std::vector<VectorXd> Region::samples(const ScalarField* field) const {
    switch (kind_) {
        case Kind::Box: {
            if (plan_.kind == SamplePlan::Kind::PerAxisGrid)
                return detail::grid_box(lo_, hi_, plan_.counts);
            if (plan_.kind == SamplePlan::Kind::LowDiscrepancy)
                return detail::lowdisc_box(lo_, hi_, plan_.count, plan_.seed);
            if (lo_.size() != 1)
                throw std::invalid_argument("log-axis plan requires a 1-D box");
            return detail::log_axis_points(plan_.log_min_abs, hi_(0), plan_.count,
                                           plan_.log_two_sided,
                                           plan_.log_include_zero);
        }
        case Kind::Ball: {
            const int n = plan_.kind == SamplePlan::Kind::PerAxisGrid
                              ? [&] {
                                    long t = 1;
                                    for (int c : plan_.counts) t *= c;
                                    return static_cast<int>(t);
                                }()
                              : plan_.count;
            return detail::lowdisc_ball(center_, radius_, n, plan_.seed);
        }
        case Kind::Shell: {
            // Rejection from the outer ball; deterministic.
            std::vector<VectorXd> out;
            const int want = plan_.count > 0 ? plan_.count : 4096;
            int grow = want * 2;
            while (static_cast<int>(out.size()) < want && grow < 64 * want + 4096) {
                out.clear();
                for (auto& x : detail::lowdisc_ball(center_, radius_, grow, plan_.seed))
                    if ((x - center_).norm() >= inner_radius_) out.push_back(x);
                grow *= 2;
            }
            if (static_cast<int>(out.size()) > want) out.resize(want);
            return out;
        }
        case Kind::Sublevel: {
            if (!field) throw std::invalid_argument("sublevel samples: field required");
            const double R = bracket_sublevel_radius(*field, level_);
            const int want = plan_.count > 0 ? plan_.count : 4096;
            std::vector<VectorXd> out;
            int grow = want * 2;
            while (static_cast<int>(out.size()) < want && grow < 256 * want + 4096) {
                out.clear();
                for (auto& x :
                     detail::lowdisc_ball(field->x_star, R, grow, plan_.seed))
                    if (field->value(x) <= level_) out.push_back(x);
                grow *= 2;
            }
            if (out.empty())
                throw std::runtime_error("sublevel sampling found no points");
            if (static_cast<int>(out.size()) > want) out.resize(want);
            return out;
        }
    }
    return {};
}

std::vector<VectorXd> Region::boundary_shell_samples(double fraction,
                                                     const ScalarField* field) const {
    std::vector<VectorXd> out;
    switch (kind_) {
        case Kind::Box: {
            // Keep samples whose max normalized coordinate lies in the outer band.
            for (auto& x : samples(field)) {
                const VectorXd t =
                    ((x - center_).array() / (0.5 * (hi_ - lo_).array())).cwiseAbs();
                if (t.maxCoeff() >= 1.0 - fraction) out.push_back(x);
            }
            return out;
        }
        case Kind::Ball:
        case Kind::Shell:
            return detail::sphere_points(center_, radius_ * (1.0 - 1e-9),
                                         plan_.count > 0 ? std::max(plan_.count / 4, 8)
                                                         : 256,
                                         plan_.seed + 17);
        case Kind::Sublevel: {
            if (!field) throw std::invalid_argument("sublevel shell: field required");
            const double R = bracket_sublevel_radius(*field, level_);
            return detail::sphere_points(field->x_star, R, 256, plan_.seed + 17);
        }
    }
    return out;
}

nlohmann::json Region::descriptor() const {
    nlohmann::ordered_json j;
    switch (kind_) {
        case Kind::Box:
            j["kind"] = "box";
            j["lo"] = std::vector<double>(lo_.data(), lo_.data() + lo_.size());
            j["hi"] = std::vector<double>(hi_.data(), hi_.data() + hi_.size());
            break;
        case Kind::Ball:
            j["kind"] = "ball";
            j["center"] =
                std::vector<double>(center_.data(), center_.data() + center_.size());
            j["radius"] = radius_;
            break;
        case Kind::Shell:
            j["kind"] = "shell";
            j["center"] =
                std::vector<double>(center_.data(), center_.data() + center_.size());
            j["r_inner"] = inner_radius_;
            j["r_outer"] = radius_;
            break;
        case Kind::Sublevel:
            j["kind"] = "sublevel";
            j["level"] = level_;
            break;
    }
    nlohmann::ordered_json g;
    switch (plan_.kind) {
        case SamplePlan::Kind::PerAxisGrid:
            g["kind"] = "per_axis";
            g["counts"] = plan_.counts;
            break;
        case SamplePlan::Kind::LowDiscrepancy:
            g["kind"] = "lowdisc";
            g["count"] = plan_.count;
            break;
        case SamplePlan::Kind::LogAxis:
            g["kind"] = "log_axis";
            g["per_side"] = plan_.count;
            g["min_abs"] = plan_.log_min_abs;
            g["two_sided"] = plan_.log_two_sided;
            g["include_zero"] = plan_.log_include_zero;
            break;
    }
    g["seed"] = plan_.seed;
    j["grid"] = g;
    return j;
}

ScalarField catalog_get(const std::string& name,
                        const std::map<std::string, double>& params) {
    ScalarField f;
    if (name == "quadratic")
        f = make_quadratic(params);
    else if (name == "cos_example")
        f = make_cos_example(params);
    else if (name == "asinh_example")
        f = make_asinh_example(params);
    else if (name == "dimpled_quadratic")
        f = make_dimpled_quadratic(params);
    else if (name == "staircase_radial")
        f = make_staircase_radial(params);
    else
        throw std::invalid_argument("catalog_get: unknown field '" + name + "'");

    // Minimizer metadata is refined from the nominal point and stored.
    f.x_star = refine_minimizer(f, f.x_star);
    f.f_star = f.value(f.x_star);
    return f;
}

std::vector<std::string> catalog_names() {
    return {"quadratic", "cos_example", "asinh_example", "dimpled_quadratic",
            "staircase_radial"};
}

VectorXd fd_gradient(const ScalarField& field, const VectorXd& x, double h) {
    if (!(h > 0)) throw std::invalid_argument("fd_gradient: h <= 0");
    const double step = h * std::max(1.0, x.norm());
    VectorXd g(x.size());
    VectorXd e = x;
    for (int i = 0; i < x.size(); ++i) {
        e(i) = x(i) + step;
        const double fp = field.value(e);
        e(i) = x(i) - step;
        const double fm = field.value(e);
        e(i) = x(i);
        g(i) = (fp - fm) / (2.0 * step);
    }
    return g;
}

MatrixXd fd_hessian(const ScalarField& field, const VectorXd& x, double h) {
    if (!(h > 0)) throw std::invalid_argument("fd_hessian: h <= 0");
    const double step = h * std::max(1.0, x.norm());
    const int n = static_cast<int>(x.size());
    MatrixXd H(n, n);
    VectorXd e = x;
    const double f0 = field.value(x);
    for (int i = 0; i < n; ++i) {
        e(i) = x(i) + step;
        const double fp = field.value(e);
        e(i) = x(i) - step;
        const double fm = field.value(e);
        e(i) = x(i);
        H(i, i) = (fp - 2.0 * f0 + fm) / (step * step);
        for (int j = i + 1; j < n; ++j) {
            e(i) = x(i) + step;
            e(j) = x(j) + step;
            const double fpp = field.value(e);
            e(j) = x(j) - step;
            const double fpm = field.value(e);
            e(i) = x(i) - step;
            const double fmm = field.value(e);
            e(j) = x(j) + step;
            const double fmp = field.value(e);
            e(i) = x(i);
            e(j) = x(j);
            H(i, j) = H(j, i) = (fpp - fpm - fmp + fmm) / (4.0 * step * step);
        }
    }
    return 0.5 * (H + H.transpose());
}

VectorXd refine_minimizer(const ScalarField& field, const VectorXd& nominal,
                          int max_iter, double grad_tol) {
    VectorXd x = nominal;
    for (int it = 0; it < max_iter; ++it) {
        const VectorXd g = field.gradient(x);
        if (g.norm() <= grad_tol) break;
        const MatrixXd H = field.hessian(x);
        VectorXd step = H.ldlt().solve(-g);
        if (!step.allFinite() || step.norm() > 1e6) step = -g;
        double t = 1.0;
        const double fx = field.value(x);
        while (t > 1e-12 && field.value(x + t * step) > fx) t *= 0.5;
        x += t * step;
    }
    return x;
}

double bracket_sublevel_radius(const ScalarField& field, double level,
                               double max_radius) {
    if (!(level > field.f_star))
        throw std::invalid_argument("bracket_sublevel_radius: level <= f_star");
    auto shell_clears = [&](double R) {
        const auto shell = detail::sphere_points(field.x_star, R, 128, 5);
        double fmin = std::numeric_limits<double>::infinity();
        for (const auto& x : shell) fmin = std::min(fmin, field.value(x));
        return fmin > level;
    };
    double R = 1e-6;
    while (R <= max_radius) {
        // Also probe 2R and 4R: evidence against a detached sublevel component
        // just beyond the first clearing shell (sampled, not proven).
        if (shell_clears(R) && shell_clears(2 * R) && shell_clears(4 * R)) return R;
        R *= 2.0;
    }
    throw std::runtime_error("bracket_sublevel_radius: properness probe failed");
}

}  // namespace conflow::fields
