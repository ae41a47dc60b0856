#include "declqg/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <complex>
#include <limits>

namespace declqg {

double rel_asym(const Mat& X) {
    return (X - X.transpose()).norm() / (1.0 + X.norm());
}

double min_eig_sym(const Mat& X) {
    Eigen::SelfAdjointEigenSolver<Mat> es(sym(X), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

bool is_psd(const Mat& X, double floor_scale) {
    return min_eig_sym(X) >= -floor_scale * (1.0 + X.norm());
}

bool is_pd(const Mat& X, double floor_scale) {
    return min_eig_sym(X) > floor_scale * (1.0 + X.norm());
}

double sym_condition(const Mat& X) {
    Eigen::SelfAdjointEigenSolver<Mat> es(sym(X), Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (lo <= 0.0) return std::numeric_limits<double>::infinity();
    return hi / lo;
}

Mat solve_spd(const Mat& S, const Mat& B, const std::string& what,
              double cond_limit) {
    const double cond = sym_condition(S);
    if (!(cond < cond_limit)) {
        throw NumericalError(what + " is singular or ill-conditioned (condition estimate " +
                             std::to_string(cond) + ")");
    }
    Eigen::LLT<Mat> llt(sym(S));
    if (llt.info() != Eigen::Success) {
        throw NumericalError(what + " is not positive definite");
    }
    return llt.solve(B);
}

double spectral_radius(const Mat& X) {
    Eigen::EigenSolver<Mat> es(X, /*computeEigenvectors=*/false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

Mat psd_sqrt_lower(const Mat& X) {
    Eigen::SelfAdjointEigenSolver<Mat> es(sym(X));
    Vec d = es.eigenvalues();
    for (int i = 0; i < d.size(); ++i) d(i) = d(i) > 0.0 ? std::sqrt(d(i)) : 0.0;
    return es.eigenvectors() * d.asDiagonal();
}

bool detectable(const Mat& A, const Mat& H, double tol) {
    using CMat = Eigen::MatrixXcd;
    const Eigen::Index m = A.rows();
    Eigen::EigenSolver<Mat> es(A, /*computeEigenvectors=*/false);
    for (Eigen::Index i = 0; i < m; ++i) {
        const std::complex<double> lam = es.eigenvalues()(i);
        if (std::abs(lam) < 1.0 - 1e-10) continue;  // stable modes need no test
        CMat stack(m + H.rows(), m);
        stack.topRows(m) = A.cast<std::complex<double>>() - lam * CMat::Identity(m, m);
        stack.bottomRows(H.rows()) = H.cast<std::complex<double>>();
        Eigen::JacobiSVD<CMat> svd(stack);
        const auto& sv = svd.singularValues();
        if (sv(sv.size() - 1) <= tol * sv(0)) return false;
    }
    return true;
}

}  // namespace declqg
