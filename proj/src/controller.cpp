#include "declqg/controller.hpp"

#include <stdexcept>

#include "declqg/linalg.hpp"

namespace declqg {

GainSchedule synthesize(const RiccatiTrajectory& rt) {
    GainSchedule g;
    g.N = rt.N;
    g.K.reserve(rt.N + 1);
    g.Gamma.reserve(rt.N + 1);
    for (int k = 0; k <= rt.N; ++k) {
        g.K.push_back(solve_spd(rt.Ups[k], rt.M[k], "Ups at k=" + std::to_string(k)));
        g.Gamma.push_back(solve_spd(rt.Lam[k], rt.L[k], "Lam at k=" + std::to_string(k)));
    }
    return g;
}

SteadyGains synthesize(const SteadyState& ss) {
    return {solve_spd(ss.Ups, ss.M, "Ups"), solve_spd(ss.Lam, ss.L, "Lam")};
}

ControlDecision control_inputs(const Mat& K, const Mat& Gamma, const Vec& x1hat,
                               const Vec& x2hat, int l, int r) {
    ControlDecision d;
    d.u = -K * x2hat;
    d.utilde1 = -Gamma * (x1hat - x2hat);
    d.u1 = d.u.head(l) + d.utilde1;
    d.u2 = d.u.tail(r);
    return d;
}

double optimal_cost(const ProblemDef& def, const AugmentedDef& aug,
                    const RiccatiTrajectory& rt, const CovChain1& cov1) {
    const int N = rt.N;
    if (static_cast<int>(cov1.Sig_filt.size()) < N + 2) {
        throw std::invalid_argument("optimal_cost: cov1 must cover k = 0..N+1");
    }
    const Mat& P0 = rt.P[0];
    const Mat& S0 = rt.S[0];
    const Mat& G0 = cov1.gain[0];
    const Mat& G20 = rt.g2.at(0);
    const Mat& Sig = def.Sigma0;

    double J = def.mu.dot(P0 * def.mu);
    J += (P0 * G20 * def.H2 * Sig).trace();
    J += (S0 * (G0 * aug.H - G20 * def.H2) * Sig).trace();
    J += (cov1.Sig_filt[N + 1] * def.Theta).trace();

    for (int k = 0; k <= N; ++k) {
        const Mat& Sk1 = rt.S[k + 1];
        const Mat& Phik1 = rt.Phi[k + 1];
        const Mat& Gk1 = cov1.gain[k + 1];
        const Mat inner = def.Q - def.A.transpose() * (Sk1 - Phik1 - Sk1 * Gk1 * aug.H) * def.A;
        J += (cov1.Sig_filt[k] * inner).trace();
        J += (def.Qw * (Sk1 * Gk1 * aug.H + Phik1 - Sk1)).trace();
    }
    return J;
}

Vec costate(const RiccatiTrajectory& rt, const Vec& x1hat, const Vec& x2hat, int k) {
    if (k < 0 || k > rt.N + 1) {
        throw std::out_of_range("costate: k must be in 0..N+1");
    }
    return rt.P[k] * x2hat + rt.S[k] * (x1hat - x2hat);
}

}  // namespace declqg
