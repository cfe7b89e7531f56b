#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "conflow/certificate.hpp"
#include "conflow/fields.hpp"

namespace conflow::lognorm {

using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class NormP { One, Two, Inf };

/// Induced matrix p-norm for p in {1, 2, inf}.
template <typename Derived>
double matrix_norm_p(const Eigen::MatrixBase<Derived>& A, NormP p) {
    switch (p) {
        case NormP::One:
            return A.cwiseAbs().colwise().sum().maxCoeff();
        case NormP::Inf:
            return A.cwiseAbs().rowwise().sum().maxCoeff();
        case NormP::Two: {
            Eigen::JacobiSVD<MatrixXd> svd(A.eval());
            return svd.singularValues()(0);
        }
    }
    throw std::invalid_argument("matrix_norm_p: unsupported p");
}

/// Logarithmic norm induced by the Euclidean norm: largest eigenvalue of
/// the symmetric part. For symmetric A this is lambda_max(A).
template <typename Derived>
double mu2(const Eigen::MatrixBase<Derived>& A) {
    if (A.rows() != A.cols()) throw std::invalid_argument("mu2: non-square");
    const MatrixXd S = 0.5 * (A + A.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(S, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

/// Logarithmic norms induced by the 1- and inf-norms (standard column/row
/// closed forms: diagonal entry plus off-diagonal absolute sums).
template <typename Derived>
double mu_p(const Eigen::MatrixBase<Derived>& A, NormP p) {
    if (A.rows() != A.cols()) throw std::invalid_argument("mu_p: non-square");
    if (p == NormP::Two) return mu2(A);
    const MatrixXd M = A.eval();
    const int n = static_cast<int>(M.rows());
    double best = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
        double s = M(j, j);
        for (int i = 0; i < n; ++i) {
            if (i == j) continue;
            s += std::abs(p == NormP::One ? M(i, j) : M(j, i));
        }
        best = std::max(best, s);
    }
    return best;
}

/// Symmetric positive-definite square root.
inline MatrixXd spd_sqrt(const MatrixXd& Q) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(Q);
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw std::invalid_argument("spd_sqrt: matrix not positive definite");
    return es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() *
           es.eigenvectors().transpose();
}

/// Euclidean logarithmic norm weighted by Q > 0: mu2(P A P^-1), P^2 = Q.
inline double mu2_weighted(const MatrixXd& A, const MatrixXd& Q) {
    const MatrixXd P = spd_sqrt(Q);
    return mu2(P * A * P.inverse());
}

/// Spectral abscissa: largest real part over the eigenvalues.
inline double spectral_abscissa(const MatrixXd& A) {
    if (A.rows() != A.cols())
        throw std::invalid_argument("spectral_abscissa: non-square");
    Eigen::EigenSolver<MatrixXd> es(A, false);
    return es.eigenvalues().real().maxCoeff();
}

inline std::vector<double> default_limit_steps() {
    std::vector<double> h;
    for (int k = 0; k < 12; ++k) h.push_back(0.2 * std::pow(0.5, k));
    return h;
}

/// Difference-quotient limit (|I + hA| - 1)/h extrapolated to h -> 0+ by
/// Neville's scheme over the given decreasing step sequence. Test oracle for
/// the closed-form logarithmic norms.
inline double mu_limit(const MatrixXd& A, NormP p,
                       std::vector<double> h_sequence = default_limit_steps()) {
    if (h_sequence.size() < 2)
        throw std::invalid_argument("mu_limit: need at least two steps");
    for (std::size_t i = 0; i < h_sequence.size(); ++i) {
        if (!(h_sequence[i] > 0) ||
            (i > 0 && !(h_sequence[i] < h_sequence[i - 1])))
            throw std::invalid_argument(
                "mu_limit: steps must be strictly decreasing and positive");
    }
    const MatrixXd I = MatrixXd::Identity(A.rows(), A.cols());
    const int n = static_cast<int>(h_sequence.size());
    std::vector<double> t(n);
    for (int i = 0; i < n; ++i)
        t[i] = (matrix_norm_p(I + h_sequence[i] * A, p) - 1.0) / h_sequence[i];
    // Neville extrapolation to h = 0.
    for (int j = 1; j < n; ++j)
        for (int i = n - 1; i >= j; --i)
            t[i] = (h_sequence[i - j] * t[i] - h_sequence[i] * t[i - 1]) /
                   (h_sequence[i - j] - h_sequence[i]);
    return t[n - 1];
}

/// One-line summary of the measure inequalities for a single matrix.
struct MatrixMeasureReport {
    double matrix_norm = 0.0;
    double mu = 0.0;
    double spectral_abscissa = 0.0;
    double minus_mu_neg = 0.0;  // -mu(-A)
    double minus_norm = 0.0;    // -|A|

    /// -|A| <= -mu(-A) <= alpha(A) <= mu(A) <= |A|, with slack for roundoff.
    bool chain_holds(double slack = 1e-8) const {
        return minus_norm <= minus_mu_neg + slack &&
               minus_mu_neg <= spectral_abscissa + slack &&
               spectral_abscissa <= mu + slack && mu <= matrix_norm + slack;
    }
};

inline MatrixMeasureReport measure_report(const MatrixXd& A, NormP p) {
    MatrixMeasureReport r;
    r.matrix_norm = matrix_norm_p(A, p);
    r.mu = mu_p(A, p);
    r.spectral_abscissa = spectral_abscissa(A);
    r.minus_mu_neg = -mu_p(-A, p);
    r.minus_norm = -r.matrix_norm;
    return r;
}

/// Pointwise equivalence on a sampled region: the gradient flow of `field`
/// is contracting at rate nu in the Euclidean measure iff lambda_min of the
/// Hessian is at least nu. Records both quantities and their agreement.
verify::Certificate strong_convexity_contraction_check(
    const fields::ScalarField& field, const fields::Region& region, double nu);

}  // namespace conflow::lognorm
