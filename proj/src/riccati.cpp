#include "declqg/riccati.hpp"

#include <algorithm>

#include "declqg/linalg.hpp"

namespace declqg {

namespace {

constexpr double kDivergenceGuard = 1e12;

Mat kalman_gain(const Mat& Sig_pred, const Mat& H, const Mat& Qv, const char* what) {
    const Mat innov = H * Sig_pred * H.transpose() + Qv;
    return solve_spd(innov, H * Sig_pred.transpose(), what).transpose();
}

Mat joseph_update(const Mat& Sig_pred, const Mat& G, const Mat& H, const Mat& Qv) {
    const Mat I = Mat::Identity(Sig_pred.rows(), Sig_pred.cols());
    const Mat IGH = I - G * H;
    return sym(IGH * Sig_pred * IGH.transpose() + G * Qv * G.transpose());
}

// One set of gain-building blocks from (P, S, G2).
struct Blocks {
    Mat M, Ups, Phi, L0, L, Lam;
};

Blocks make_blocks(const Mat& P, const Mat& S, const Mat& G2, const ProblemDef& def,
                   const AugmentedDef& aug) {
    Blocks b;
    b.M = aug.B.transpose() * P * def.A;
    b.Ups = aug.B.transpose() * P * aug.B + aug.R;
    b.Phi = (P - S) * G2 * def.H2 + S;
    b.L0 = def.B1.transpose() * b.Phi.transpose() * def.A;
    b.L = def.B1.transpose() * b.Phi * def.A;
    b.Lam = def.B1.transpose() * b.Phi * def.B1 + def.R1;
    return b;
}

}  // namespace

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Converged: return "converged";
        case SolveStatus::MaxIterations: return "max-iterations";
        case SolveStatus::Diverged: return "diverged";
    }
    return "unknown";
}

RiccatiTrajectory backward_pass(const ProblemDef& def, const AugmentedDef& aug,
                                const std::vector<Mat>& g2_seq, int N) {
    if (static_cast<int>(g2_seq.size()) < N + 1) {
        throw std::invalid_argument("backward_pass: g2_seq must cover k = 0..N");
    }
    RiccatiTrajectory rt;
    rt.N = N;
    rt.P.resize(N + 2);
    rt.S.resize(N + 2);
    rt.Phi.resize(N + 2);
    rt.M.resize(N + 1);
    rt.Ups.resize(N + 1);
    rt.L0.resize(N + 1);
    rt.L.resize(N + 1);
    rt.Lam.resize(N + 1);
    rt.g2.assign(g2_seq.begin(), g2_seq.begin() + N + 1);

    rt.P[N + 1] = sym(def.Theta);
    rt.S[N + 1] = sym(def.Theta);
    // Phi_{N+1} = (P-S) G2 H2 + S collapses to Theta at the terminal index.
    rt.Phi[N + 1] = sym(def.Theta);

    for (int k = N; k >= 0; --k) {
        const Mat& Pk1 = rt.P[k + 1];
        const Mat& Phik1 = rt.Phi[k + 1];
        rt.M[k] = aug.B.transpose() * Pk1 * def.A;
        rt.Ups[k] = aug.B.transpose() * Pk1 * aug.B + aug.R;
        rt.L0[k] = def.B1.transpose() * Phik1.transpose() * def.A;
        rt.L[k] = def.B1.transpose() * Phik1 * def.A;
        rt.Lam[k] = def.B1.transpose() * Phik1 * def.B1 + def.R1;

        const Mat UinvM = solve_spd(rt.Ups[k], rt.M[k],
                                    "Ups at k=" + std::to_string(k));
        const Mat LinvL = solve_spd(rt.Lam[k], rt.L[k],
                                    "Lam at k=" + std::to_string(k));
        rt.P[k] = sym(def.A.transpose() * Pk1 * def.A - rt.M[k].transpose() * UinvM + def.Q);
        rt.S[k] = def.A.transpose() * Phik1 * def.A - rt.L0[k].transpose() * LinvL + def.Q;
        rt.Phi[k] = (rt.P[k] - rt.S[k]) * g2_seq[k] * def.H2 + rt.S[k];
    }
    return rt;
}

ForwardResult forward_iteration(const ProblemDef& def, const AugmentedDef& aug,
                                const Mat& seed_P, const Mat& seed_S, const Mat& seed_cov,
                                double tol, int max_iter) {
    ForwardResult out;
    SteadyState& ss = out.ss;

    Mat P = sym(seed_P);
    Mat S = sym(seed_S);
    Mat S1p = sym(seed_cov);
    Mat S2p = sym(seed_cov);
    Mat S1f, G, G2;
    Blocks b;

    double resid = 0.0;
    int it = 0;
    for (; it < max_iter; ++it) {
        G = kalman_gain(S1p, aug.H, aug.Qv, "C1 innovation covariance");
        S1f = joseph_update(S1p, G, aug.H, aug.Qv);
        G2 = kalman_gain(S2p, def.H2, def.Qv2, "C2 innovation covariance");
        const Mat S2f = joseph_update(S2p, G2, def.H2, def.Qv2);

        b = make_blocks(P, S, G2, def, aug);
        const Mat UinvM = solve_spd(b.Ups, b.M, "Ups at iteration " + std::to_string(it));
        const Mat Gamma = solve_spd(b.Lam, b.L, "Lam at iteration " + std::to_string(it));

        const Mat Pn =
            sym(def.A.transpose() * P * def.A - b.M.transpose() * UinvM + def.Q);
        const Mat Sn =
            def.A.transpose() * b.Phi * def.A - b.L0.transpose() * Gamma + def.Q;
        const Mat Acl = def.A - def.B1 * Gamma;
        const Mat S2pn = sym(Acl * (S2f - S1f) * Acl.transpose() +
                             def.A * S1f * def.A.transpose() + def.Qw);
        const Mat S1pn = sym(def.A * S1f * def.A.transpose() + def.Qw);

        IterTraceRow row;
        row.k = it;
        row.P = P;
        row.S = S;
        row.dP = (Pn - P).norm() / (1.0 + Pn.norm());
        row.dS = (Sn - S).norm() / (1.0 + Sn.norm());
        row.dSig2 = (S2pn - S2p).norm() / (1.0 + S2pn.norm());
        out.trace.push_back(row);

        resid = std::max({row.dP, row.dS, row.dSig2});
        P = Pn;
        S = Sn;
        S1p = S1pn;
        S2p = S2pn;

        const double worst = std::max({P.norm(), S.norm(), S1p.norm(), S2p.norm()});
        if (!(worst < kDivergenceGuard) || !std::isfinite(worst)) {
            ss.status = SolveStatus::Diverged;
            ss.diagnostic = "iterate norm " + std::to_string(worst) +
                            " exceeded the divergence guard at iteration " + std::to_string(it);
            break;
        }
        if (resid <= tol) {
            ss.status = SolveStatus::Converged;
            ++it;
            break;
        }
    }
    if (ss.status == SolveStatus::MaxIterations) {
        ss.diagnostic = "no convergence within " + std::to_string(max_iter) +
                        " iterations (last residual " + std::to_string(resid) + ")";
    }

    G = kalman_gain(S1p, aug.H, aug.Qv, "C1 innovation covariance");
    G2 = kalman_gain(S2p, def.H2, def.Qv2, "C2 innovation covariance");
    b = make_blocks(P, S, G2, def, aug);
    ss.P = P;
    ss.S = S;
    ss.Phi = b.Phi;
    ss.M = b.M;
    ss.Ups = b.Ups;
    ss.L0 = b.L0;
    ss.L = b.L;
    ss.Lam = b.Lam;
    ss.Sig1 = S1p;
    ss.Sig2 = S2p;
    ss.G = G;
    ss.G2 = G2;
    ss.iterations = it;
    ss.last_residual = resid;
    ss.residuals = are_residuals(ss, def, aug);
    return out;
}

std::map<std::string, double> are_residuals(const SteadyState& ss, const ProblemDef& def,
                                            const AugmentedDef& aug) {
    std::map<std::string, double> res;
    const Mat UinvM = solve_spd(ss.Ups, ss.M, "Ups");
    const Mat Gamma = solve_spd(ss.Lam, ss.L, "Lam");

    res["P"] = (ss.P - (def.A.transpose() * ss.P * def.A - ss.M.transpose() * UinvM + def.Q))
                   .norm();
    res["S"] =
        (ss.S - (def.A.transpose() * ss.Phi * def.A - ss.L0.transpose() * Gamma + def.Q)).norm();

    const Mat S1f = joseph_update(ss.Sig1, ss.G, aug.H, aug.Qv);
    res["Sigma1"] = (ss.Sig1 - sym(def.A * S1f * def.A.transpose() + def.Qw)).norm();

    const Mat S2f = joseph_update(ss.Sig2, ss.G2, def.H2, def.Qv2);
    const Mat Acl = def.A - def.B1 * Gamma;
    res["Sigma2"] = (ss.Sig2 - sym(Acl * (S2f - S1f) * Acl.transpose() +
                                   def.A * S1f * def.A.transpose() + def.Qw))
                        .norm();

    res["G"] = (ss.G - kalman_gain(ss.Sig1, aug.H, aug.Qv, "C1 innovation covariance")).norm();
    res["G2"] =
        (ss.G2 - kalman_gain(ss.Sig2, def.H2, def.Qv2, "C2 innovation covariance")).norm();
    res["S_asymmetry"] = (ss.S - ss.S.transpose()).norm();
    return res;
}

FiniteHorizonResult finite_horizon_solve(const ProblemDef& def, const AugmentedDef& aug, int N,
                                         double tol, int max_iter) {
    FiniteHorizonResult out;
    const CovChain1 chain1 = c1_cov_rollforward(def.Sigma0, def, aug, N + 1);

    std::vector<Mat> gammas(N + 2, Mat::Zero(def.dims.l, def.dims.m));
    RiccatiTrajectory rt;
    CovChain2 chain2;
    double resid = 0.0;
    int it = 0;
    for (; it < max_iter; ++it) {
        chain2 = c2_cov_chain(def.Sigma0, chain1, gammas, def, N + 1);
        rt = backward_pass(def, aug, chain2.gain, N);
        resid = 0.0;
        for (int k = 0; k <= N; ++k) {
            const Mat g = solve_spd(rt.Lam[k], rt.L[k], "Lam at k=" + std::to_string(k));
            resid = std::max(resid, (g - gammas[k]).norm() / (1.0 + g.norm()));
            gammas[k] = g;
        }
        gammas[N + 1] = gammas[N];  // only the plant sees k = N+1; value is unused
        if (resid <= tol) {
            out.status = SolveStatus::Converged;
            ++it;
            break;
        }
    }
    // Chains consistent with the final gain schedule.
    chain2 = c2_cov_chain(def.Sigma0, chain1, gammas, def, N + 1);
    rt = backward_pass(def, aug, chain2.gain, N);
    rt.cov1 = chain1;
    rt.cov2 = chain2;
    rt.has_chains = true;
    out.rt = std::move(rt);
    out.iterations = it;
    out.last_residual = resid;
    return out;
}

}  // namespace declqg
