#include "conflow/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "conflow/detail/sampling.hpp"

namespace conflow::curvature {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double lambda_min_hessian(const fields::ScalarField& field, const VectorXd& x) {
    const MatrixXd H = field.hessian(x);
    if (H.rows() == 1) return H(0, 0);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(H, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

double curvature_deficit(const fields::ScalarField& field, double nu,
                         const VectorXd& x) {
    return nu - lambda_min_hessian(field, x);
}

bool ConcavityClassification::state_bounded_pass() const {
    return state_bounded.verdict == verify::Verdict::Pass;
}
bool ConcavityClassification::magnitude_bounded_pass() const {
    return magnitude_bounded.verdict == verify::Verdict::Pass;
}

ConcavityClassification classify_concavity(const fields::ScalarField& field,
                                           double m, const fields::Region& search_box,
                                           double shell_fraction) {
    if (!(m > 0)) throw std::invalid_argument("classify_concavity: m <= 0");
    const auto pts = search_box.samples(&field);
    if (pts.empty()) throw std::invalid_argument("classify_concavity: degenerate box");

    // Normalized radial extent of a sample within the region (1 = boundary).
    auto extent = [&](const VectorXd& x) {
        switch (search_box.kind()) {
            case fields::Region::Kind::Box: {
                const VectorXd half = 0.5 * (search_box.hi() - search_box.lo());
                return ((x - search_box.center()).array() / half.array())
                    .cwiseAbs()
                    .maxCoeff();
            }
            default:
                return (x - search_box.center()).norm() / search_box.radius();
        }
    };

    ConcavityClassification out;
    for (auto* cert : {&out.state_bounded, &out.magnitude_bounded}) {
        cert->claim = "concavity";
        cert->field_name = field.name;
        cert->field_params = field.params;
        cert->region = search_box.descriptor();
        cert->provenance["m"] = m;
        cert->provenance["shell_fraction"] = shell_fraction;
    }

    double min_lambda = std::numeric_limits<double>::infinity();
    VectorXd argmin_lambda;
    double max_violation_extent = -1.0;
    std::vector<verify::Witness> shell_violations;
    long violations = 0;
    for (const auto& x : pts) {
        const double lmin = lambda_min_hessian(field, x);
        if (lmin < min_lambda) {
            min_lambda = lmin;
            argmin_lambda = x;
        }
        if (lmin < m) {
            ++violations;
            const double e = extent(x);
            max_violation_extent = std::max(max_violation_extent, e);
            if (e >= 1.0 - shell_fraction && shell_violations.size() < 8)
                shell_violations.push_back({x, lmin, "lambda_min < m in outer shell"});
        }
    }

    // State-bounded: all sampled violations confined to the interior; an
    // outer-shell hit is evidence the set {lambda_min < m} keeps going.
    out.state_bounded.notes.push_back(
        violations == 0 ? "no sampled violations of lambda_min >= m"
                        : "violations confined to normalized extent " +
                              std::to_string(max_violation_extent));
    out.state_bounded.margin =
        violations == 0 ? shell_fraction
                        : (1.0 - shell_fraction) - max_violation_extent;
    if (shell_violations.empty()) {
        out.state_bounded.verdict = verify::Verdict::Pass;
    } else {
        out.state_bounded.verdict = verify::Verdict::Fail;
        out.state_bounded.witnesses = shell_violations;
    }

    out.magnitude_bounded.margin = min_lambda + m;
    if (min_lambda > -m) {
        out.magnitude_bounded.verdict = verify::Verdict::Pass;
    } else {
        out.magnitude_bounded.verdict = verify::Verdict::Fail;
        out.magnitude_bounded.witnesses.push_back(
            {argmin_lambda, min_lambda, "lambda_min <= -m"});
    }
    out.magnitude_bounded.provenance["min_lambda_sampled"] = min_lambda;
    return out;
}

double negative_curvature_measure(const fields::ScalarField& field,
                                  const fields::Region& region) {
    const auto pts = region.samples(&field);
    if (pts.empty()) throw std::invalid_argument("negative_curvature_measure: empty");
    long neg = 0;
    for (const auto& x : pts)
        if (lambda_min_hessian(field, x) < 0.0) ++neg;
    return static_cast<double>(neg) / static_cast<double>(pts.size());
}

namespace {

/// Project x back onto the band |f - y| <= tol by Newton steps along the
/// gradient direction; returns false when the correction stalls.
bool project_to_level(const fields::ScalarField& field, double y, double tol,
                      VectorXd& x, int max_iter = 12) {
    for (int it = 0; it < max_iter; ++it) {
        const double r = field.value(x) - y;
        if (std::abs(r) <= tol) return true;
        const VectorXd g = field.gradient(x);
        const double gg = g.squaredNorm();
        if (gg < 1e-30) return false;
        x -= (r / gg) * g;
    }
    return std::abs(field.value(x) - y) <= tol;
}

}  // namespace

double level_deficit_max(const fields::ScalarField& field, double nu, double y,
                         double level_tol, const fields::Region& search_region) {
    if (!(y > field.f_star))
        throw std::invalid_argument("level_deficit_max: y <= f_star");
    if (!(level_tol > 0))
        throw std::invalid_argument("level_deficit_max: level_tol <= 0");

    // Properness probe: the sublevel set must be strictly inside the region.
    double shell_min = std::numeric_limits<double>::infinity();
    const auto shell = search_region.boundary_shell_samples(0.05, &field);
    for (const auto& x : shell) shell_min = std::min(shell_min, field.value(x));
    if (!(shell_min > y))
        throw std::invalid_argument(
            "level_deficit_max: boundary shell does not clear the level "
            "(search region too small)");

    std::vector<VectorXd> band;
    for (const auto& x : search_region.samples(&field))
        if (std::abs(field.value(x) - y) <= level_tol) band.push_back(x);

    // Ray hits: f(x_star) < y < f(shell point), so every shell direction
    // crosses the level; bisect each crossing into the band.
    for (const auto& target : shell) {
        if (band.size() >= 512) break;
        VectorXd lo = field.x_star, hi = target;
        if (!(field.value(hi) > y)) continue;
        for (int it = 0; it < 80; ++it) {
            const VectorXd mid = 0.5 * (lo + hi);
            (field.value(mid) > y ? hi : lo) = mid;
        }
        VectorXd hit = 0.5 * (lo + hi);
        if (std::abs(field.value(hit) - y) <= level_tol) band.push_back(hit);
    }
    if (band.empty())
        throw std::runtime_error(
            "level_deficit_max: no samples hit the level band (level_tol too "
            "small for the grid)");

    double best = -std::numeric_limits<double>::infinity();
    VectorXd best_x;
    for (const auto& x : band) {
        const double v = curvature_deficit(field, nu, x);
        if (v > best) {
            best = v;
            best_x = x;
        }
    }

    // Local refinement: projected ascent on the deficit constrained to the
    // band, gradients of lambda_min by central differences.
    VectorXd x = best_x;
    const int n = field.dim;
    double step = 0.05 * (1.0 + x.norm());
    for (int it = 0; it < 40 && step > 1e-9; ++it) {
        const double fd_h = 1e-5 * (1.0 + x.norm());
        VectorXd grad_m(n);
        for (int i = 0; i < n; ++i) {
            VectorXd e = x;
            e(i) += fd_h;
            const double up = curvature_deficit(field, nu, e);
            e(i) = x(i) - fd_h;
            const double dn = curvature_deficit(field, nu, e);
            grad_m(i) = (up - dn) / (2.0 * fd_h);
        }
        const double gn = grad_m.norm();
        if (gn < 1e-12) break;
        VectorXd cand = x + (step / gn) * grad_m;
        if (!project_to_level(field, y, level_tol, cand) ||
            !search_region.contains(cand, &field)) {
            step *= 0.5;
            continue;
        }
        const double v = curvature_deficit(field, nu, cand);
        if (v > best) {
            best = v;
            x = cand;
        } else {
            step *= 0.5;
        }
    }
    return best;
}

double ConcavityProfile::eval(double y) const {
    if (y_grid.empty()) throw std::logic_error("ConcavityProfile: empty");
    if (y <= y_grid.front()) return envelope_values.front();
    if (y >= y_grid.back())
        return envelope_values.back() + tail_slope * (y - y_grid.back());
    const auto it = std::upper_bound(y_grid.begin(), y_grid.end(), y);
    const std::size_t i = static_cast<std::size_t>(it - y_grid.begin()) - 1;
    const double t = (y - y_grid[i]) / (y_grid[i + 1] - y_grid[i]);
    return (1.0 - t) * envelope_values[i] + t * envelope_values[i + 1];
}

void ConcavityProfile::validate() const {
    if (y_grid.size() != m_star_samples.size() ||
        y_grid.size() != envelope_values.size() || y_grid.empty())
        throw std::logic_error("ConcavityProfile: inconsistent sizes");
    for (std::size_t i = 0; i < y_grid.size(); ++i) {
        if (!(envelope_values[i] > std::max(m_star_samples[i], 0.0) +
                                       0.5 * margin))
            throw std::logic_error(
                "ConcavityProfile: envelope fails strict domination at breakpoint");
        if (i > 0 && envelope_values[i] < envelope_values[i - 1] - 1e-12)
            throw std::logic_error("ConcavityProfile: envelope not nondecreasing");
    }
    if (tail_slope < 0) throw std::logic_error("ConcavityProfile: negative tail slope");
}

nlohmann::ordered_json ConcavityProfile::to_json() const {
    nlohmann::ordered_json j;
    j["nu"] = nu;
    j["margin"] = margin;
    j["y_grid"] = y_grid;
    j["m_star_samples"] = m_star_samples;
    j["envelope_values"] = envelope_values;
    j["tail_slope"] = tail_slope;
    return j;
}

ConcavityProfile ConcavityProfile::from_json(const nlohmann::json& j) {
    ConcavityProfile p;
    p.nu = j.at("nu").get<double>();
    p.margin = j.at("margin").get<double>();
    p.y_grid = j.at("y_grid").get<std::vector<double>>();
    p.m_star_samples = j.at("m_star_samples").get<std::vector<double>>();
    p.envelope_values = j.at("envelope_values").get<std::vector<double>>();
    p.tail_slope = j.at("tail_slope").get<double>();
    p.validate();
    return p;
}

ConcavityProfile build_upper_envelope(const fields::ScalarField& field, double nu,
                                      const std::vector<double>& y_grid,
                                      double margin,
                                      const fields::Region& search_region,
                                      bool constant_extension) {
    if (y_grid.size() < 2)
        throw std::invalid_argument("build_upper_envelope: need >= 2 levels");
    for (std::size_t i = 0; i < y_grid.size(); ++i)
        if (!(y_grid[i] > field.f_star) ||
            (i > 0 && !(y_grid[i] > y_grid[i - 1])))
            throw std::invalid_argument(
                "build_upper_envelope: levels must increase and start above f_star");
    if (!(margin > 0)) throw std::invalid_argument("build_upper_envelope: margin <= 0");

    ConcavityProfile p;
    p.nu = nu;
    p.margin = margin;
    p.y_grid = y_grid;
    double running = margin;
    for (const double y : y_grid) {
        const double level_tol = 1e-3 * (y - field.f_star);
        const double ms = level_deficit_max(field, nu, y, level_tol, search_region);
        p.m_star_samples.push_back(ms);
        running = std::max(running, std::max(ms + margin, margin));
        p.envelope_values.push_back(running);
    }
    if (constant_extension) {
        p.tail_slope = 0.0;
    } else {
        const std::size_t n = p.envelope_values.size();
        p.tail_slope = std::max(0.0, (p.envelope_values[n - 1] -
                                      p.envelope_values[n - 2]) /
                                         (y_grid[n - 1] - y_grid[n - 2]));
    }
    p.validate();
    return p;
}

std::vector<double> geometric_levels(double y_lo, double y_hi, int per_decade) {
    if (!(0 < y_lo && y_lo < y_hi))
        throw std::invalid_argument("geometric_levels: need 0 < y_lo < y_hi");
    const int n = std::max(
        2, static_cast<int>(std::ceil(per_decade * std::log10(y_hi / y_lo))) + 1);
    std::vector<double> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i)
        out.push_back(y_lo * std::pow(y_hi / y_lo, double(i) / (n - 1)));
    return out;
}

}  // namespace conflow::curvature
