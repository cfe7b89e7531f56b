#include "conflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "conflow/detail/quadrature.hpp"
#include "conflow/verify.hpp"

namespace conflow::flow {
namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

VectorXd hermite(double t0, const VectorXd& y0, const VectorXd& f0, double t1,
                 const VectorXd& y1, const VectorXd& f1, double t) {
    const double h = t1 - t0;
    const double s = (t - t0) / h;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
    const double h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s);
    const double h11 = s * s * (s - 1);
    return h00 * y0 + (h * h10) * f0 + h01 * y1 + (h * h11) * f1;
}

}  // namespace

Trajectory integrate(const fields::ScalarField& field, const VectorXd& x0,
                     double horizon, const StepControls& controls) {
    if (!(horizon > 0)) throw std::invalid_argument("integrate: horizon <= 0");
    if (x0.size() != field.dim)
        throw std::invalid_argument("integrate: dimension mismatch");

    auto rhs = [&field](const VectorXd& y) { return VectorXd(-field.gradient(y)); };

    const int n_samples = std::max(2, controls.n_samples);
    const double dt_sample = horizon / (n_samples - 1);
    const double h_max =
        controls.h_max > 0 ? controls.h_max : std::max(horizon / 10.0, 1e-6);

    Trajectory traj;
    auto emit = [&](double t, const VectorXd& y) {
        const VectorXd g = field.gradient(y);
        if (!y.allFinite() || !g.allFinite())
            throw std::runtime_error("integrate: non-finite field values");
        traj.times.push_back(t);
        traj.states.push_back(y);
        traj.f_values.push_back(field.value(y));
        traj.grad_norms.push_back(g.norm());
    };

    double t = 0.0;
    VectorXd y = x0;
    VectorXd k1 = rhs(y);
    emit(0.0, y);
    if (k1.norm() < controls.grad_tol) {
        traj.terminated_by = Termination::GradTol;
        return traj;
    }

    double h = controls.h_init;
    if (h <= 0) h = std::min(h_max, 0.01 * (1.0 + y.norm()) / (1.0 + k1.norm()));
    if (controls.fixed_step) {
        if (!(controls.h_init > 0))
            throw std::invalid_argument("integrate: fixed_step requires h_init");
        h = controls.h_init;
    }

    long next_sample = 1;
    const long step_cap = 50'000'000;
    for (long steps = 0; steps < step_cap && t < horizon; ++steps) {
        h = std::min(h, horizon - t);
        if (!controls.fixed_step && h < 1e-14 * std::max(1.0, std::abs(t))) {
            traj.terminated_by = Termination::StepFloor;
            emit(t, y);
            return traj;
        }

        const VectorXd k2 = rhs(y + h * (a21 * k1));
        const VectorXd k3 = rhs(y + h * (a31 * k1 + a32 * k2));
        const VectorXd k4 = rhs(y + h * (a41 * k1 + a42 * k2 + a43 * k3));
        const VectorXd k5 = rhs(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const VectorXd k6 =
            rhs(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        const VectorXd y_new =
            y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const VectorXd k7 = rhs(y_new);  // FSAL stage

        const VectorXd err_vec =
            h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        double err = 0.0;
        for (int i = 0; i < y.size(); ++i) {
            const double scale =
                controls.atol +
                controls.rtol * std::max(std::abs(y(i)), std::abs(y_new(i)));
            err += std::pow(err_vec(i) / scale, 2);
        }
        err = std::sqrt(err / y.size());

        if (controls.fixed_step || err <= 1.0) {
            const double t_new = t + h;
            // Dense output: cubic Hermite on (state, rhs) at the step ends.
            while (next_sample < n_samples &&
                   next_sample * dt_sample <= t_new + 1e-14) {
                const double ts = next_sample * dt_sample;
                emit(ts, ts >= t_new ? y_new : hermite(t, y, k1, t_new, y_new, k7, ts));
                ++next_sample;
            }
            t = t_new;
            y = y_new;
            k1 = k7;
            if (k1.norm() < controls.grad_tol) {
                if (traj.times.back() < t) emit(t, y);
                traj.terminated_by = Termination::GradTol;
                return traj;
            }
        }
        if (!controls.fixed_step) {
            const double factor =
                err > 0 ? 0.9 * std::pow(err, -0.2) : 5.0;
            h = std::min(h_max, h * std::clamp(factor, 0.2, 5.0));
        }
    }
    if (traj.times.back() < t) emit(t, y);
    traj.terminated_by = Termination::Horizon;
    return traj;
}

PairDistanceSeries pair_distance_series(const Trajectory& t1, const Trajectory& t2,
                                        const fields::ScalarField* field,
                                        const metric::ConformalMetric* m) {
    PairDistanceSeries out;
    const std::size_t n = std::min(t1.times.size(), t2.times.size());
    for (std::size_t i = 0; i < n; ++i) {
        // Early termination of one trajectory ends its uniform grid with an
        // off-grid terminal point; the series covers the common prefix.
        if (std::abs(t1.times[i] - t2.times[i]) > 1e-12) {
            if (i < 2)
                throw std::invalid_argument("pair_distance_series: time grids differ");
            break;
        }
        if (t1.states[i].size() != t2.states[i].size())
            throw std::invalid_argument("pair_distance_series: dimension mismatch");
        out.times.push_back(t1.times[i]);
        out.euclidean.push_back((t1.states[i] - t2.states[i]).norm());
        if (m && field) {
            if (field->dim == 1) {
                out.metric_exact.push_back(verify::riemann_distance_1d(
                    *m, *field, t1.states[i](0), t2.states[i](0)));
            } else {
                const auto [lo, hi] =
                    verify::riemann_distance_bounds(*m, *field, t1.states[i],
                                                    t2.states[i]);
                out.lower.push_back(lo);
                out.upper.push_back(hi);
            }
        }
    }
    return out;
}

double settle_time(const Trajectory& traj, const VectorXd& center, double radius) {
    if (!(radius > 0)) throw std::invalid_argument("settle_time: radius <= 0");
    // Walk backwards: find the suffix that stays inside the ball.
    long first_outside_from_end = -1;
    for (long i = static_cast<long>(traj.states.size()) - 1; i >= 0; --i) {
        if ((traj.states[i] - center).norm() > radius) {
            first_outside_from_end = i;
            break;
        }
    }
    const long settle_idx = first_outside_from_end + 1;
    if (settle_idx >= static_cast<long>(traj.states.size()))
        return std::numeric_limits<double>::infinity();
    return traj.times[settle_idx];
}

void save_trajectory_csv(const Trajectory& traj, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    const int dim = traj.states.empty() ? 0 : static_cast<int>(traj.states[0].size());
    out << "t";
    for (int i = 1; i <= dim; ++i) out << ",x_" << i;
    out << ",f,grad_norm\n";
    char buf[64];
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        std::snprintf(buf, sizeof(buf), "%.17g", traj.times[k]);
        out << buf;
        for (int i = 0; i < dim; ++i) {
            std::snprintf(buf, sizeof(buf), ",%.17g", traj.states[k](i));
            out << buf;
        }
        std::snprintf(buf, sizeof(buf), ",%.17g,%.17g\n", traj.f_values[k],
                      traj.grad_norms[k]);
        out << buf;
    }
}

}  // namespace conflow::flow
