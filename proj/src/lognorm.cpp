#include "conflow/lognorm.hpp"

namespace conflow::lognorm {

verify::Certificate strong_convexity_contraction_check(
    const fields::ScalarField& field, const fields::Region& region, double nu) {
    if (!(nu > 0))
        throw std::invalid_argument("strong_convexity_contraction_check: nu <= 0");
    const auto pts = region.samples(&field);
    if (pts.empty()) throw std::invalid_argument("empty region");

    verify::Certificate cert;
    cert.claim = "contraction_region";
    cert.field_name = field.name;
    cert.field_params = field.params;
    cert.region = region.descriptor();
    cert.provenance["nu"] = nu;

    const double tol = 1e-9 * (1.0 + std::abs(nu));
    double worst = std::numeric_limits<double>::infinity();
    Eigen::VectorXd worst_x;
    double max_identity_dev = 0.0;
    for (const auto& x : pts) {
        const MatrixXd H = field.hessian(x);
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(H, Eigen::EigenvaluesOnly);
        const double lmin = es.eigenvalues().minCoeff();
        // Symmetric case: mu2(-H) must equal -lambda_min(H).
        max_identity_dev = std::max(max_identity_dev, std::abs(mu2(-H) + lmin));
        if (lmin < worst) {
            worst = lmin;
            worst_x = x;
        }
    }
    cert.provenance["mu2_identity_max_dev"] = max_identity_dev;
    cert.margin = worst - nu + tol;
    cert.verdict = cert.margin >= 0 ? verify::Verdict::Pass : verify::Verdict::Fail;
    if (cert.verdict == verify::Verdict::Fail)
        cert.witnesses.push_back({worst_x, worst, "smallest Hessian eigenvalue"});
    cert.notes.push_back("lambda_min(H) >= nu checked pointwise; equivalent to "
                         "mu2(-H) <= -nu by the symmetric measure identity");
    return cert;
}

}  // namespace conflow::lognorm
