#pragma once

#include <Eigen/Dense>
#include <vector>

#include "conflow/fields.hpp"
#include "conflow/metric.hpp"

namespace conflow::flow {

using Eigen::VectorXd;

struct StepControls {
    double rtol = 1e-8;
    double atol = 1e-10;
    double grad_tol = 1e-10;   // stop once |grad f| falls below
    double h_init = 0.0;       // 0: choose automatically
    double h_max = 0.0;        // 0: horizon / 10
    int n_samples = 1000;      // dense-output sample count over the horizon
    bool fixed_step = false;   // integrate with h_init exactly, no adaptivity
};

enum class Termination { Horizon, GradTol, StepFloor };

/// Sampled solution of the steepest-descent dynamics of a field. f_values
/// and grad_norms are evaluated from the field at the sample states.
struct Trajectory {
    std::vector<double> times;
    std::vector<VectorXd> states;
    std::vector<double> f_values;
    std::vector<double> grad_norms;
    Termination terminated_by = Termination::Horizon;

    double end_time() const { return times.empty() ? 0.0 : times.back(); }
    const VectorXd& end_state() const { return states.back(); }
};

/// Integrate the gradient flow from x0 over [0, horizon] with a fifth-order
/// embedded Runge-Kutta pair (adaptive steps, cubic Hermite dense output on
/// state and right-hand side).
Trajectory integrate(const fields::ScalarField& field, const VectorXd& x0,
                     double horizon, const StepControls& controls = {});

/// Distances between two trajectories on their common sample times. With a
/// metric: the exact 1-D path integral, or lower/upper bounds from the stored
/// metric bounds and the straight-segment energy in higher dimension.
struct PairDistanceSeries {
    std::vector<double> times;
    std::vector<double> euclidean;
    std::vector<double> metric_exact;  // 1-D metrics only
    std::vector<double> lower, upper;  // n-D metric bounds
};

PairDistanceSeries pair_distance_series(const Trajectory& t1, const Trajectory& t2,
                                        const fields::ScalarField* field = nullptr,
                                        const metric::ConformalMetric* m = nullptr);

/// First sample time after which the trajectory stays inside the ball for
/// the rest of the recorded horizon; +infinity if it never settles.
double settle_time(const Trajectory& traj, const VectorXd& center, double radius);

/// Trajectory CSV: t, x_1..x_n, f, grad_norm.
void save_trajectory_csv(const Trajectory& traj, const std::string& path);

}  // namespace conflow::flow
