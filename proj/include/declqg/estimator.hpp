#pragma once

#include <vector>

#include "declqg/types.hpp"

namespace declqg {

// Kalman state of controller 1's filter, which sees the stacked observation
// y = [y1; y2]. Covariances stay symmetric PSD; the measurement update is
// Joseph form.
struct FilterState1 {
    Vec x_pred;    // xhat1_{k|k-1}
    Vec x_filt;    // xhat1_{k|k}
    Mat Sig_pred;  // Sigma1_{k|k-1}
    Mat Sig_filt;  // Sigma1_{k|k}
    Mat gain;      // G_{k|k-1}, m x (p+q)
    int k = 0;
};

// Kalman state of controller 2's filter (y2 only). Its covariance
// prediction needs the control gain Gamma and therefore lives in
// c2_cov_predict, not in the step itself.
struct FilterState2 {
    Vec x_pred;    // xhat2_{k|k-1}
    Vec x_filt;    // xhat2_{k|k}
    Mat Sig_pred;  // Sigma2_{k|k-1}
    Mat Sig_filt;  // Sigma2_{k|k}
    Mat gain;      // G2_{k|k-1}, m x q
    int k = 0;
};

// k = 0 measurement update from the prior (mu, Sigma0).
FilterState1 c1_start(const ProblemDef& def, const AugmentedDef& aug, const Vec& y0);
FilterState2 c2_start(const ProblemDef& def, const Vec& y2_0);

// Advances controller 1's filter from the filtered state at k-1: predicted
// mean A xhat1 + B u + B1 utilde1 (the full input is visible to C1), then
// gain, mean and Joseph covariance updates. Throws NumericalError when the
// innovation covariance is singular.
FilterState1 c1_step(const FilterState1& prev, const Vec& y, const Vec& u_prev,
                     const Vec& utilde_prev, const ProblemDef& def, const AugmentedDef& aug);

// Advances controller 2's filter from the filtered state at k-1. The
// predicted mean uses A xhat2 + B u only (utilde1 is invisible to C2); the
// predicted covariance must be supplied by the covariance pipeline because it
// depends on the control gain.
FilterState2 c2_step(const FilterState2& prev, const Vec& y2, const Vec& u_prev,
                     const Mat& Sig_pred_supplied, const ProblemDef& def);

// Control-decoupled covariance prediction for controller 2:
//   (A - B1 Gamma)(Sig2_filt - Sig1_filt)(A - B1 Gamma)' + A Sig1_filt A' + Qw
// symmetrized. Gamma is the gain applied to (xhat1 - xhat2) at this step.
Mat c2_cov_predict(const Mat& Sig2_filt, const Mat& Sig1_filt, const Mat& Gamma,
                   const ProblemDef& def);

// Control-independent covariance/gain sequences for controller 1's filter,
// k = 0..N, starting from Sigma1_{0|-1} = Sigma0.
struct CovChain1 {
    std::vector<Mat> Sig_pred;  // Sigma1_{k|k-1}
    std::vector<Mat> Sig_filt;  // Sigma1_{k|k}
    std::vector<Mat> gain;      // G_{k|k-1}
};
CovChain1 c1_cov_rollforward(const Mat& Sigma0, const ProblemDef& def,
                             const AugmentedDef& aug, int N);

// Controller 2's covariance/gain chain under the supplied per-step gains
// Gamma_k (gammas[k] applies to the k -> k+1 prediction); chain1 must cover
// k = 0..N.
struct CovChain2 {
    std::vector<Mat> Sig_pred;
    std::vector<Mat> Sig_filt;
    std::vector<Mat> gain;  // G2_{k|k-1}
};
CovChain2 c2_cov_chain(const Mat& Sigma0, const CovChain1& chain1,
                       const std::vector<Mat>& gammas, const ProblemDef& def, int N);
CovChain2 c2_cov_chain(const Mat& Sigma0, const CovChain1& chain1, const Mat& gamma_const,
                       const ProblemDef& def, int N);

// Fixed points of the two filters: controller 1's standard recursion, then
// controller 2's recursion under the supplied steady Gamma. Residuals are
// Frobenius norms of the defining equations at the returned points.
struct SteadyFilters {
    Mat Sig1_pred, Sig1_filt, G;
    Mat Sig2_pred, Sig2_filt, G2;
    double residual1 = 0.0, residual2 = 0.0;
    int iterations = 0;
    bool converged = false;
};
SteadyFilters steady_filters(const ProblemDef& def, const AugmentedDef& aug, const Mat& Gamma,
                             double tol = 1e-12, int max_iter = 100000);

}  // namespace declqg
