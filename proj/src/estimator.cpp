#include "declqg/estimator.hpp"

#include "declqg/linalg.hpp"

namespace declqg {

namespace {

// G = Sig H' (H Sig H' + Qv)^-1 via a symmetric solve of the innovation
// covariance against H Sig.
Mat kalman_gain(const Mat& Sig_pred, const Mat& H, const Mat& Qv, const char* what) {
    const Mat innov = H * Sig_pred * H.transpose() + Qv;
    return solve_spd(innov, H * Sig_pred.transpose(), what).transpose();
}

Mat joseph_update(const Mat& Sig_pred, const Mat& G, const Mat& H, const Mat& Qv) {
    const Mat I = Mat::Identity(Sig_pred.rows(), Sig_pred.cols());
    const Mat IGH = I - G * H;
    return sym(IGH * Sig_pred * IGH.transpose() + G * Qv * G.transpose());
}

}  // namespace

FilterState1 c1_start(const ProblemDef& def, const AugmentedDef& aug, const Vec& y0) {
    FilterState1 s;
    s.k = 0;
    s.x_pred = def.mu;
    s.Sig_pred = sym(def.Sigma0);
    s.gain = kalman_gain(s.Sig_pred, aug.H, aug.Qv, "C1 innovation covariance");
    s.x_filt = s.x_pred + s.gain * (y0 - aug.H * s.x_pred);
    s.Sig_filt = joseph_update(s.Sig_pred, s.gain, aug.H, aug.Qv);
    return s;
}

FilterState1 c1_step(const FilterState1& prev, const Vec& y, const Vec& u_prev,
                     const Vec& utilde_prev, const ProblemDef& def, const AugmentedDef& aug) {
    FilterState1 s;
    s.k = prev.k + 1;
    s.x_pred = def.A * prev.x_filt + aug.B * u_prev + def.B1 * utilde_prev;
    s.Sig_pred = sym(def.A * prev.Sig_filt * def.A.transpose() + def.Qw);
    s.gain = kalman_gain(s.Sig_pred, aug.H, aug.Qv, "C1 innovation covariance");
    s.x_filt = s.x_pred + s.gain * (y - aug.H * s.x_pred);
    s.Sig_filt = joseph_update(s.Sig_pred, s.gain, aug.H, aug.Qv);
    return s;
}

FilterState2 c2_start(const ProblemDef& def, const Vec& y2_0) {
    FilterState2 s;
    s.k = 0;
    s.x_pred = def.mu;
    s.Sig_pred = sym(def.Sigma0);
    s.gain = kalman_gain(s.Sig_pred, def.H2, def.Qv2, "C2 innovation covariance");
    s.x_filt = s.x_pred + s.gain * (y2_0 - def.H2 * s.x_pred);
    s.Sig_filt = joseph_update(s.Sig_pred, s.gain, def.H2, def.Qv2);
    return s;
}

FilterState2 c2_step(const FilterState2& prev, const Vec& y2, const Vec& u_prev,
                     const Mat& Sig_pred_supplied, const ProblemDef& def) {
    const Mat B = [&] {
        Mat b(def.dims.m, def.dims.l + def.dims.r);
        b << def.B1, def.B2;
        return b;
    }();
    FilterState2 s;
    s.k = prev.k + 1;
    s.x_pred = def.A * prev.x_filt + B * u_prev;
    s.Sig_pred = sym(Sig_pred_supplied);
    s.gain = kalman_gain(s.Sig_pred, def.H2, def.Qv2, "C2 innovation covariance");
    s.x_filt = s.x_pred + s.gain * (y2 - def.H2 * s.x_pred);
    s.Sig_filt = joseph_update(s.Sig_pred, s.gain, def.H2, def.Qv2);
    return s;
}

Mat c2_cov_predict(const Mat& Sig2_filt, const Mat& Sig1_filt, const Mat& Gamma,
                   const ProblemDef& def) {
    const Mat Acl = def.A - def.B1 * Gamma;
    return sym(Acl * (Sig2_filt - Sig1_filt) * Acl.transpose() +
               def.A * Sig1_filt * def.A.transpose() + def.Qw);
}

CovChain1 c1_cov_rollforward(const Mat& Sigma0, const ProblemDef& def,
                             const AugmentedDef& aug, int N) {
    CovChain1 c;
    c.Sig_pred.reserve(N + 1);
    c.Sig_filt.reserve(N + 1);
    c.gain.reserve(N + 1);
    Mat Sp = sym(Sigma0);
    for (int k = 0; k <= N; ++k) {
        const Mat G = kalman_gain(Sp, aug.H, aug.Qv, "C1 innovation covariance");
        const Mat Sf = joseph_update(Sp, G, aug.H, aug.Qv);
        c.Sig_pred.push_back(Sp);
        c.Sig_filt.push_back(Sf);
        c.gain.push_back(G);
        Sp = sym(def.A * Sf * def.A.transpose() + def.Qw);
    }
    return c;
}

CovChain2 c2_cov_chain(const Mat& Sigma0, const CovChain1& chain1,
                       const std::vector<Mat>& gammas, const ProblemDef& def, int N) {
    CovChain2 c;
    c.Sig_pred.reserve(N + 1);
    c.Sig_filt.reserve(N + 1);
    c.gain.reserve(N + 1);
    Mat Sp = sym(Sigma0);
    for (int k = 0; k <= N; ++k) {
        const Mat G2 = kalman_gain(Sp, def.H2, def.Qv2, "C2 innovation covariance");
        const Mat Sf = joseph_update(Sp, G2, def.H2, def.Qv2);
        c.Sig_pred.push_back(Sp);
        c.Sig_filt.push_back(Sf);
        c.gain.push_back(G2);
        if (k < N) Sp = c2_cov_predict(Sf, chain1.Sig_filt.at(k), gammas.at(k), def);
    }
    return c;
}

CovChain2 c2_cov_chain(const Mat& Sigma0, const CovChain1& chain1, const Mat& gamma_const,
                       const ProblemDef& def, int N) {
    return c2_cov_chain(Sigma0, chain1, std::vector<Mat>(N + 1, gamma_const), def, N);
}

SteadyFilters steady_filters(const ProblemDef& def, const AugmentedDef& aug, const Mat& Gamma,
                             double tol, int max_iter) {
    if (!detectable(def.A, aug.H)) {
        throw NumericalError("(A, H) is not detectable; steady-state filter does not exist");
    }
    SteadyFilters out;
    Mat Sp = sym(def.Sigma0);
    Mat Sf, G;
    int it = 0;
    for (; it < max_iter; ++it) {
        G = kalman_gain(Sp, aug.H, aug.Qv, "C1 innovation covariance");
        Sf = joseph_update(Sp, G, aug.H, aug.Qv);
        const Mat Spn = sym(def.A * Sf * def.A.transpose() + def.Qw);
        const double d = (Spn - Sp).norm();
        Sp = Spn;
        if (d <= tol * (1.0 + Sp.norm())) break;
    }
    out.Sig1_pred = Sp;
    out.G = kalman_gain(Sp, aug.H, aug.Qv, "C1 innovation covariance");
    out.Sig1_filt = joseph_update(Sp, out.G, aug.H, aug.Qv);
    out.residual1 =
        (Sp - sym(def.A * out.Sig1_filt * def.A.transpose() + def.Qw)).norm();
    out.iterations = it;
    out.converged = it < max_iter;

    Mat S2p = sym(def.Sigma0);
    int it2 = 0;
    for (; it2 < max_iter; ++it2) {
        const Mat G2 = kalman_gain(S2p, def.H2, def.Qv2, "C2 innovation covariance");
        const Mat S2f = joseph_update(S2p, G2, def.H2, def.Qv2);
        const Mat S2pn = c2_cov_predict(S2f, out.Sig1_filt, Gamma, def);
        const double d = (S2pn - S2p).norm();
        S2p = S2pn;
        if (d <= tol * (1.0 + S2p.norm())) break;
    }
    out.Sig2_pred = S2p;
    out.G2 = kalman_gain(S2p, def.H2, def.Qv2, "C2 innovation covariance");
    out.Sig2_filt = joseph_update(S2p, out.G2, def.H2, def.Qv2);
    out.residual2 = (S2p - c2_cov_predict(out.Sig2_filt, out.Sig1_filt, Gamma, def)).norm();
    out.iterations = std::max(it, it2);
    out.converged = out.converged && it2 < max_iter;
    return out;
}

}  // namespace declqg
