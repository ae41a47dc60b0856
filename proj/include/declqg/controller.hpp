#pragma once

#include <vector>

#include "declqg/riccati.hpp"
#include "declqg/types.hpp"

namespace declqg {

// Per-step control gains: u_k = -K_k xhat2, utilde1_k = -Gamma_k (xhat1 - xhat2).
// K_k solves Ups_k K = M_k and Gamma_k solves Lam_k Gamma = L_k.
struct GainSchedule {
    int N = 0;
    std::vector<Mat> K;      // (l+r) x m
    std::vector<Mat> Gamma;  // l x m
};

struct SteadyGains {
    Mat K;
    Mat Gamma;
};

GainSchedule synthesize(const RiccatiTrajectory& rt);
SteadyGains synthesize(const SteadyState& ss);

// The two physical inputs and their building blocks at one step:
//   u = -K xhat2, utilde1 = -Gamma (xhat1 - xhat2),
//   u1 = [I 0] u + utilde1, u2 = [0 I] u.
// u depends on xhat2 only; that is the information-pattern contract.
struct ControlDecision {
    Vec u1, u2, u, utilde1;
};
ControlDecision control_inputs(const Mat& K, const Mat& Gamma, const Vec& x1hat,
                               const Vec& x2hat, int l, int r);

// Closed-form optimal cost of the finite-horizon solution. The k = 0
// expectation term is evaluated from the Gaussian prior (mu, Sigma0) and the
// linearity of the k = 0 filter updates:
//   E[x0' P0 xhat2_00] = mu'P0 mu + tr(P0 G2_0 H2 Sigma0)
//   E[x0' S0 (xhat1_00 - xhat2_00)] = tr(S0 (G_0 H - G2_0 H2) Sigma0).
// cov1 must cover k = 0..N+1; rt must carry the g2 sequence it was built
// with. The predicted-gain indexing G_{k+1|k} is used throughout.
double optimal_cost(const ProblemDef& def, const AugmentedDef& aug,
                    const RiccatiTrajectory& rt, const CovChain1& cov1);

// Costate sample lambda_{k-1} = P_k xhat2 + S_k (xhat1 - xhat2), 0 <= k <= N+1.
Vec costate(const RiccatiTrajectory& rt, const Vec& x1hat, const Vec& x2hat, int k);

}  // namespace declqg
