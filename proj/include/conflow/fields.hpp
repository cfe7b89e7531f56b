#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace conflow::fields {

using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class Smoothness { C2, CInfinity };

/// A twice continuously differentiable objective with closed-form
/// differentials and minimizer metadata. Evaluation is pure and reentrant;
/// instances are safe to share across threads.
struct ScalarField {
    std::string name;
    std::map<std::string, double> params;
    int dim = 1;
    std::function<double(const VectorXd&)> value;
    std::function<VectorXd(const VectorXd&)> gradient;
    std::function<MatrixXd(const VectorXd&)> hessian;
    double f_star = 0.0;
    VectorXd x_star;
    Smoothness smoothness = Smoothness::CInfinity;

    double value1(double x) const { return value(VectorXd::Constant(1, x)); }
    double grad1(double x) const { return gradient(VectorXd::Constant(1, x))(0); }
    double hess1(double x) const { return hessian(VectorXd::Constant(1, x))(0, 0); }
    /// Level of x above the minimum, clamped at zero roundoff.
    double level(const VectorXd& x) const {
        const double s = value(x) - f_star;
        return s < 0.0 && s > -1e-12 ? 0.0 : s;
    }
};

/// Sampling plan attached to a region. All plans are deterministic given
/// their parameters and seed.
struct SamplePlan {
    enum class Kind { PerAxisGrid, LowDiscrepancy, LogAxis };
    Kind kind = Kind::PerAxisGrid;
    std::vector<int> counts;       // PerAxisGrid: points per axis
    int count = 0;                 // LowDiscrepancy / LogAxis per-side count
    std::uint64_t seed = 1;
    double log_min_abs = 1e-6;     // LogAxis
    bool log_two_sided = true;     // LogAxis
    bool log_include_zero = false; // LogAxis

    static SamplePlan grid(std::vector<int> counts);
    static SamplePlan lowdisc(int count, std::uint64_t seed);
    static SamplePlan log_axis(int per_side, double min_abs, bool two_sided,
                               bool include_zero = false);
};

/// Box, ball, shell (annulus) or sublevel region together with its plan.
class Region {
  public:
    enum class Kind { Box, Ball, Shell, Sublevel };

    static Region box(VectorXd lo, VectorXd hi, SamplePlan plan);
    static Region box_symmetric(int dim, double half_width, SamplePlan plan);
    static Region ball(VectorXd center, double radius, SamplePlan plan);
    static Region shell(VectorXd center, double r_inner, double r_outer,
                        SamplePlan plan);
    /// Sublevel {f <= level}; sampling brackets the set by an expanding ball
    /// whose boundary shell is probed to lie above the level.
    static Region sublevel(double level, SamplePlan plan);

    Kind kind() const { return kind_; }
    const SamplePlan& plan() const { return plan_; }
    SamplePlan& plan() { return plan_; }
    const VectorXd& lo() const { return lo_; }
    const VectorXd& hi() const { return hi_; }
    const VectorXd& center() const { return center_; }
    double radius() const { return radius_; }
    double inner_radius() const { return inner_radius_; }
    double level() const { return level_; }
    int dim() const;

    bool contains(const VectorXd& x, const ScalarField* field = nullptr) const;

    /// Deterministic sample set. Sublevel regions require the field.
    std::vector<VectorXd> samples(const ScalarField* field = nullptr) const;

    /// Points in the outer shell of the region (outermost `fraction` band);
    /// used for containment evidence and properness probes.
    std::vector<VectorXd> boundary_shell_samples(double fraction = 0.2,
                                                 const ScalarField* field = nullptr) const;

    nlohmann::json descriptor() const;

  private:
    Kind kind_ = Kind::Box;
    SamplePlan plan_;
    VectorXd lo_, hi_, center_;
    double radius_ = 0.0, inner_radius_ = 0.0, level_ = 0.0;
};

/// Catalog families: quadratic, cos_example, asinh_example,
/// dimpled_quadratic, staircase_radial. Unknown names or parameters outside
/// a family's documented validity range throw std::invalid_argument.
ScalarField catalog_get(const std::string& name,
                        const std::map<std::string, double>& params = {});

std::vector<std::string> catalog_names();

/// Central-difference gradient, h scaled by max(1, |x|). Test oracle.
VectorXd fd_gradient(const ScalarField& field, const VectorXd& x, double h = 1e-5);

/// Central-difference Hessian (symmetrized). Test oracle.
MatrixXd fd_hessian(const ScalarField& field, const VectorXd& x, double h = 1e-4);

/// Damped Newton refinement of a minimizer from a nominal starting point.
VectorXd refine_minimizer(const ScalarField& field, const VectorXd& nominal,
                          int max_iter = 50, double grad_tol = 1e-12);

/// Bracket the sublevel set {f <= level} by growing a ball about x_star until
/// the boundary-shell minimum of f exceeds the level. Throws if the probe
/// fails to bracket within max_radius.
double bracket_sublevel_radius(const ScalarField& field, double level,
                               double max_radius = 1e12);

}  // namespace conflow::fields
