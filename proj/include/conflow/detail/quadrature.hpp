#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace conflow::detail {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    long evals = 0;
};

/// Gauss(7)/Kronrod(15) panel rule on [a,b].
template <class F>
QuadResult gk15(F&& f, double a, double b) {
    // Kronrod abscissae (positive half), Gauss-7 and Kronrod-15 weights.
    static const double xk[8] = {
        0.991455371120813, 0.949107912342759, 0.864864423359769,
        0.741531185599394, 0.586087235467691, 0.405845151377397,
        0.207784955007898, 0.000000000000000};
    static const double wk[8] = {
        0.022935322010529, 0.063092092629979, 0.104790010322250,
        0.140653259715525, 0.169004726639267, 0.190350578064785,
        0.204432940075298, 0.209482141084728};
    static const double wg[4] = {
        0.129484966168870, 0.279705391489277, 0.381830050505119,
        0.417959183673469};

    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);

    const double fc = f(c);
    double kron = wk[7] * fc;
    double gauss = wg[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = h * xk[i];
        const double fs = f(c - dx) + f(c + dx);
        kron += wk[i] * fs;
        if (i % 2 == 1) gauss += wg[i / 2] * fs;
    }
    kron *= h;
    gauss *= h;

    QuadResult r;
    r.value = kron;
    r.error = std::pow(200.0 * std::abs(kron - gauss), 1.5);
    r.evals = 15;
    return r;
}

/// Adaptive bisection on GK15 panels. Stops when every panel meets
/// abs_tol or rel_tol against the running total.
template <class F>
QuadResult integrate_adaptive(F&& f, double a, double b, double abs_tol = 1e-10,
                              double rel_tol = 1e-12, int max_panels = 20000) {
    if (!(a <= b)) throw std::invalid_argument("integrate_adaptive: a > b");
    if (a == b) return {};

    struct Panel {
        double a, b, value, error;
    };
    std::vector<Panel> todo;
    QuadResult first = gk15(f, a, b);
    todo.push_back({a, b, first.value, first.error});
    long evals = first.evals;

    double total = 0.0, total_err = 0.0;
    int panels = 0;
    while (!todo.empty()) {
        Panel p = todo.back();
        todo.pop_back();
        const double scale = std::abs(total) + std::abs(p.value);
        if (p.error < abs_tol || p.error < rel_tol * scale ||
            ++panels > max_panels || (p.b - p.a) < 1e-15 * (std::abs(p.a) + 1.0)) {
            total += p.value;
            total_err += p.error;
            continue;
        }
        const double m = 0.5 * (p.a + p.b);
        QuadResult left = gk15(f, p.a, m);
        QuadResult right = gk15(f, m, p.b);
        evals += left.evals + right.evals;
        todo.push_back({p.a, m, left.value, left.error});
        todo.push_back({m, p.b, right.value, right.error});
    }
    return {total, total_err, evals};
}

}  // namespace conflow::detail
