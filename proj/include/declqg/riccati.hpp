#pragma once

#include <map>
#include <string>
#include <vector>

#include "declqg/estimator.hpp"
#include "declqg/types.hpp"

namespace declqg {

// Finite-horizon coupled Riccati quantities. P, S, Phi run k = 0..N+1 with
// P_{N+1} = S_{N+1} = Theta; the gain-building blocks M, Ups, L0, L, Lam run
// k = 0..N. Phi is genuinely non-symmetric when P != S and is kept exactly
// as computed; so is S. The filter chains are populated by
// finite_horizon_solve (backward_pass leaves them empty).
struct RiccatiTrajectory {
    int N = 0;
    std::vector<Mat> P, S, Phi;           // size N+2
    std::vector<Mat> M, Ups, L0, L, Lam;  // size N+1
    std::vector<Mat> g2;                  // G2_{k|k-1} used to build Phi, size N+1
    CovChain1 cov1;                       // k = 0..N+1 when populated
    CovChain2 cov2;                       // k = 0..N+1 when populated
    bool has_chains = false;
};

enum class SolveStatus { Converged, MaxIterations, Diverged };

const char* to_string(SolveStatus s);

// Joint fixed point of the control recursions and the filter covariances,
// with residual diagnostics of the defining algebraic equations.
struct SteadyState {
    Mat P, S, Phi;
    Mat M, Ups, L0, L, Lam;
    Mat Sig1, Sig2;  // predicted error covariances
    Mat G, G2;
    std::map<std::string, double> residuals;
    int iterations = 0;
    SolveStatus status = SolveStatus::MaxIterations;
    double last_residual = 0.0;
    std::string diagnostic;
};

struct IterTraceRow {
    int k = 0;
    Mat P, S;
    double dP = 0.0, dS = 0.0, dSig2 = 0.0;
};

struct ForwardResult {
    SteadyState ss;
    std::vector<IterTraceRow> trace;
};

// Backward pass of the coupled Riccati recursions over k = N..0, given the
// filter-gain sequence g2_seq[k] = G2_{k|k-1} for k = 0..N. Terminal values
// P_{N+1} = S_{N+1} = Theta. L0 (built from Phi') is kept distinct from L.
// Throws NumericalError naming k when Ups_k or Lam_k is singular.
RiccatiTrajectory backward_pass(const ProblemDef& def, const AugmentedDef& aug,
                                const std::vector<Mat>& g2_seq, int N);

// Joint forward iteration resolving the forward/backward coupling: advances
// P, S together with the two filter covariance chains (controller 2's chain
// uses Gamma_k = Lam_k^-1 L_k of the same iterate) until
//   max(|dP|, |dS|, |dSig2|)_F / (1 + |.|_F) <= tol.
// Non-convergence returns status MaxIterations with the trace and last
// residual; any iterate norm above 1e12 aborts with status Diverged.
ForwardResult forward_iteration(const ProblemDef& def, const AugmentedDef& aug,
                                const Mat& seed_P, const Mat& seed_S, const Mat& seed_cov,
                                double tol = 1e-9, int max_iter = 10000);

// Frobenius-norm residuals of the algebraic fixed-point equations at ss:
// both Riccati equations, both covariance equations, both gain-consistency
// equations, plus the S-asymmetry diagnostic.
std::map<std::string, double> are_residuals(const SteadyState& ss, const ProblemDef& def,
                                            const AugmentedDef& aug);

// Self-consistent finite-horizon solution: alternates the controller-2
// covariance chain (driven by the current Gamma schedule, starting from the
// belief Sigma0) with backward_pass until the Gamma schedule is a fixed
// point. Returns the trajectory with both filter chains attached
// (k = 0..N+1).
struct FiniteHorizonResult {
    RiccatiTrajectory rt;
    SolveStatus status = SolveStatus::MaxIterations;
    int iterations = 0;
    double last_residual = 0.0;
};
FiniteHorizonResult finite_horizon_solve(const ProblemDef& def, const AugmentedDef& aug, int N,
                                         double tol = 1e-12, int max_iter = 200);

}  // namespace declqg
