#include "declqg/simulator.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "declqg/linalg.hpp"
#include "declqg/rng.hpp"

namespace declqg {

namespace {

constexpr int kChunk = 256;           // fixed chunk size keeps merges order-stable
constexpr double kOverflowLimit = 1e150;

void attach_noise_factors(SimInputs& in) {
    in.Lx0 = psd_sqrt_lower(in.def.Sigma0);
    in.Lw = psd_sqrt_lower(in.def.Qw);
    in.Lv1 = psd_sqrt_lower(in.def.Qv1);
    in.Lv2 = psd_sqrt_lower(in.def.Qv2);
}

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("DLQG_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

struct ChunkAccum {
    long double cost_sum = 0.0L;
    long double cost_sq_sum = 0.0L;
    std::vector<Mat> Exx, S1, S2;
    bool overflow = false;
    int count = 0;
};

}  // namespace

double stage_cost(const Vec& x, const Vec& u1, const Vec& u2, const ProblemDef& def) {
    return x.dot(def.Q * x) + u1.dot(def.R1 * u1) + u2.dot(def.R2 * u2);
}

SimInputs make_sim_inputs(const ProblemDef& def, const AugmentedDef& aug,
                          const RiccatiTrajectory& rt, const GainSchedule& gains, int N) {
    if (!rt.has_chains || rt.N < N || gains.N < N) {
        throw std::invalid_argument("make_sim_inputs: trajectory/gains must cover k = 0..N "
                                    "with filter chains attached");
    }
    SimInputs in;
    in.def = def;
    in.aug = aug;
    in.mode = GainMode::FiniteHorizon;
    in.N = N;
    in.K.assign(gains.K.begin(), gains.K.begin() + N + 1);
    in.Gamma.assign(gains.Gamma.begin(), gains.Gamma.begin() + N + 1);
    in.cov1 = rt.cov1;
    in.cov2 = rt.cov2;
    attach_noise_factors(in);
    in.rho = spectral_radius(def.A - aug.B * in.K[0]);
    return in;
}

SimInputs make_sim_inputs(const ProblemDef& def, const AugmentedDef& aug,
                          const SteadyGains& gains, int N) {
    SimInputs in;
    in.def = def;
    in.aug = aug;
    in.mode = GainMode::SteadyState;
    in.N = N;
    in.K.assign(N + 1, gains.K);
    in.Gamma.assign(N + 1, gains.Gamma);
    in.cov1 = c1_cov_rollforward(def.Sigma0, def, aug, N + 1);
    in.cov2 = c2_cov_chain(def.Sigma0, in.cov1, gains.Gamma, def, N + 1);
    attach_noise_factors(in);
    in.rho = spectral_radius(def.A - aug.B * gains.K);
    return in;
}

SimInputs make_sim_inputs(const ProblemDef& def, const AugmentedDef& aug,
                          const std::vector<Mat>& K, const std::vector<Mat>& Gamma, int N) {
    if (K.size() != Gamma.size() || static_cast<int>(K.size()) < N + 1) {
        throw std::invalid_argument("make_sim_inputs: gain schedule must cover k = 0..N");
    }
    SimInputs in;
    in.def = def;
    in.aug = aug;
    in.mode = GainMode::FiniteHorizon;
    in.N = N;
    in.K.assign(K.begin(), K.begin() + N + 1);
    in.Gamma.assign(Gamma.begin(), Gamma.begin() + N + 1);
    in.cov1 = c1_cov_rollforward(def.Sigma0, def, aug, N + 1);
    std::vector<Mat> gam = in.Gamma;
    gam.push_back(in.Gamma.back());
    in.cov2 = c2_cov_chain(def.Sigma0, in.cov1, gam, def, N + 1);
    attach_noise_factors(in);
    in.rho = spectral_radius(def.A - aug.B * in.K[0]);
    return in;
}

SimInputs make_sim_inputs_uncontrolled(const ProblemDef& def, const AugmentedDef& aug, int N) {
    const std::vector<Mat> K(N + 1, Mat::Zero(def.dims.l + def.dims.r, def.dims.m));
    const std::vector<Mat> Gamma(N + 1, Mat::Zero(def.dims.l, def.dims.m));
    SimInputs in = make_sim_inputs(def, aug, K, Gamma, N);
    in.mode = GainMode::SteadyState;
    return in;
}

namespace {

// Core rollout. When replay_injection is set, the plant is driven by the
// recorded inputs instead of the freshly computed ones (the controllers
// still compute and record their own outputs); v1_replicate picks the v1
// substream, which the info-pattern probe points at a different replicate.
Trajectory rollout_core(const SimInputs& in, const SimConfig& cfg, int replicate_index,
                        const std::vector<Vec>* replay_injection, uint64_t v1_replicate) {
    const ProblemDef& def = in.def;
    const int N = in.N;
    const int m = def.dims.m, l = def.dims.l, r = def.dims.r;
    const int p = def.dims.p, q = def.dims.q;

    GaussianStream sx = noise_stream(cfg.seed, replicate_index, NoiseSource::X0);
    GaussianStream sw = noise_stream(cfg.seed, replicate_index, NoiseSource::Process);
    GaussianStream sv1 = noise_stream(cfg.seed, v1_replicate, NoiseSource::V1);
    GaussianStream sv2 = noise_stream(cfg.seed, replicate_index, NoiseSource::V2);

    Trajectory tr;
    tr.N = N;
    tr.x.reserve(N + 1);
    tr.y.reserve(N + 1);
    tr.y2.reserve(N + 1);
    tr.u1.reserve(N + 1);
    tr.u2.reserve(N + 1);
    tr.u.reserve(N + 1);
    tr.utilde1.reserve(N + 1);
    tr.xhat1.reserve(N + 1);
    tr.xhat2.reserve(N + 1);
    tr.stage_cost.reserve(N + 1);

    Vec x = def.mu + in.Lx0 * sx.draw(m);
    Vec pred1 = def.mu;
    Vec pred2 = def.mu;

    for (int k = 0; k <= N; ++k) {
        const Vec v1 = in.Lv1 * sv1.draw(p);
        const Vec v2 = in.Lv2 * sv2.draw(q);
        const Vec y1 = def.H1 * x + v1;
        const Vec y2 = def.H2 * x + v2;
        Vec y(p + q);
        y << y1, y2;

        const Vec xhat1 = pred1 + in.cov1.gain[k] * (y - in.aug.H * pred1);
        const Vec xhat2 = pred2 + in.cov2.gain[k] * (y2 - def.H2 * pred2);

        const ControlDecision d = control_inputs(in.K[k], in.Gamma[k], xhat1, xhat2, l, r);

        tr.x.push_back(x);
        tr.y.push_back(y);
        tr.y2.push_back(y2);
        tr.u1.push_back(d.u1);
        tr.u2.push_back(d.u2);
        tr.u.push_back(d.u);
        tr.utilde1.push_back(d.utilde1);
        tr.xhat1.push_back(xhat1);
        tr.xhat2.push_back(xhat2);
        tr.stage_cost.push_back(stage_cost(x, d.u1, d.u2, def));

        const Vec w = in.Lw * sw.draw(m);
        const Vec injection =
            replay_injection ? (*replay_injection)[k] : Vec(def.B1 * d.u1 + def.B2 * d.u2);
        x = def.A * x + injection + w;
        pred1 = def.A * xhat1 + in.aug.B * d.u + def.B1 * d.utilde1;
        pred2 = def.A * xhat2 + in.aug.B * d.u;

        if (!x.allFinite() || x.cwiseAbs().maxCoeff() > kOverflowLimit) tr.overflow = true;
    }
    tr.x_terminal = x;
    tr.terminal_cost = x.dot(def.Theta * x);
    tr.total_cost = tr.terminal_cost;
    for (double c : tr.stage_cost) tr.total_cost += c;
    return tr;
}

}  // namespace

Trajectory rollout(const SimInputs& in, const SimConfig& cfg, int replicate_index) {
    return rollout_core(in, cfg, replicate_index, nullptr, replicate_index);
}

SimSummary monte_carlo(const SimInputs& in, const SimConfig& cfg) {
    const int N = in.N;
    const int m = in.def.dims.m;
    const int reps = cfg.replications;
    const int num_chunks = (reps + kChunk - 1) / kChunk;

    std::vector<ChunkAccum> chunks(num_chunks);
    std::atomic<int> next_chunk{0};

    auto run_chunk = [&](int c) {
        ChunkAccum acc;
        acc.Exx.assign(N + 2, Mat::Zero(m, m));
        acc.S1.assign(N + 1, Mat::Zero(m, m));
        acc.S2.assign(N + 1, Mat::Zero(m, m));
        const int lo = c * kChunk;
        const int hi = std::min(reps, lo + kChunk);
        for (int rep = lo; rep < hi; ++rep) {
            const Trajectory tr = rollout(in, cfg, rep);
            acc.cost_sum += tr.total_cost;
            acc.cost_sq_sum += static_cast<long double>(tr.total_cost) * tr.total_cost;
            for (int k = 0; k <= N; ++k) {
                acc.Exx[k] += tr.x[k] * tr.x[k].transpose();
                const Vec e1 = tr.x[k] - tr.xhat1[k];
                const Vec e2 = tr.x[k] - tr.xhat2[k];
                acc.S1[k] += e1 * e1.transpose();
                acc.S2[k] += e2 * e2.transpose();
            }
            acc.Exx[N + 1] += tr.x_terminal * tr.x_terminal.transpose();
            acc.overflow = acc.overflow || tr.overflow;
            ++acc.count;
        }
        chunks[c] = std::move(acc);
    };

    const int threads = std::min(resolve_threads(cfg.threads), num_chunks);
    if (threads <= 1) {
        for (int c = 0; c < num_chunks; ++c) run_chunk(c);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                for (int c = next_chunk.fetch_add(1); c < num_chunks;
                     c = next_chunk.fetch_add(1)) {
                    run_chunk(c);
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    SimSummary out;
    out.replications = reps;
    out.Exx.assign(N + 2, Mat::Zero(m, m));
    out.Sig1_emp.assign(N + 1, Mat::Zero(m, m));
    out.Sig2_emp.assign(N + 1, Mat::Zero(m, m));
    long double cost_sum = 0.0L, cost_sq = 0.0L;
    for (const ChunkAccum& acc : chunks) {  // fixed chunk order: deterministic merge
        cost_sum += acc.cost_sum;
        cost_sq += acc.cost_sq_sum;
        for (int k = 0; k <= N + 1; ++k) out.Exx[k] += acc.Exx[k];
        for (int k = 0; k <= N; ++k) {
            out.Sig1_emp[k] += acc.S1[k];
            out.Sig2_emp[k] += acc.S2[k];
        }
        out.overflow = out.overflow || acc.overflow;
    }
    const double n = static_cast<double>(reps);
    for (auto& X : out.Exx) X /= n;
    for (auto& X : out.Sig1_emp) X /= n;
    for (auto& X : out.Sig2_emp) X /= n;
    out.cost_mean = static_cast<double>(cost_sum / reps);
    if (reps > 1) {
        const long double var =
            (cost_sq - cost_sum * cost_sum / reps) / (static_cast<long double>(reps) - 1);
        out.cost_se = static_cast<double>(std::sqrt(std::max(var, 0.0L) / reps));
    }
    out.rho = in.rho;
    out.bounded = in.rho < 1.0 && !out.overflow;
    return out;
}

std::vector<Mat> closed_loop_second_moments(const SimInputs& in) {
    const ProblemDef& def = in.def;
    const AugmentedDef& aug = in.aug;
    const int N = in.N;
    const int m = def.dims.m, q = def.dims.q, pq = def.dims.p + def.dims.q;
    const Mat Sig = def.Sigma0;
    const Mat mumu = def.mu * def.mu.transpose();

    // Joint uncentered second moment of (x, xhat1, xhat2) after the k = 0
    // measurement updates.
    const Mat& G0 = in.cov1.gain[0];
    const Mat& G20 = in.cov2.gain[0];
    Mat Evv2 = Mat::Zero(pq, q);  // E[v v2'] (shared v2 block)
    Evv2.bottomRows(q) = def.Qv2;

    Mat Xi = Mat::Zero(3 * m, 3 * m);
    auto blk = [&](int i, int j) { return Xi.block(i * m, j * m, m, m); };
    blk(0, 0) = Sig + mumu;
    blk(0, 1) = mumu + Sig * aug.H.transpose() * G0.transpose();
    blk(0, 2) = mumu + Sig * def.H2.transpose() * G20.transpose();
    blk(1, 1) = mumu + G0 * (aug.H * Sig * aug.H.transpose() + aug.Qv) * G0.transpose();
    blk(2, 2) = mumu + G20 * (def.H2 * Sig * def.H2.transpose() + def.Qv2) * G20.transpose();
    blk(1, 2) = mumu + G0 * aug.H * Sig * def.H2.transpose() * G20.transpose() +
                G0 * Evv2 * G20.transpose();
    blk(1, 0) = blk(0, 1).transpose();
    blk(2, 0) = blk(0, 2).transpose();
    blk(2, 1) = blk(1, 2).transpose();

    std::vector<Mat> Exx;
    Exx.reserve(N + 2);
    Exx.push_back(Xi.topLeftCorner(m, m));

    for (int k = 0; k <= N; ++k) {
        const Mat BK = aug.B * in.K[k];
        const Mat B1G = def.B1 * in.Gamma[k];
        const Mat& Gn = in.cov1.gain[k + 1];
        const Mat& G2n = in.cov2.gain[k + 1];
        const Mat GH = Gn * aug.H;
        const Mat G2H2 = G2n * def.H2;
        const Mat I = Mat::Identity(m, m);

        Mat F = Mat::Zero(3 * m, 3 * m);
        // x_{k+1} row
        F.block(0, 0, m, m) = def.A;
        F.block(0, m, m, m) = -B1G;
        F.block(0, 2 * m, m, m) = B1G - BK;
        // xhat1_{k+1} row
        F.block(m, 0, m, m) = GH * def.A;
        F.block(m, m, m, m) = GH * (-B1G) + (I - GH) * (def.A - B1G);
        F.block(m, 2 * m, m, m) = B1G - BK;
        // xhat2_{k+1} row
        F.block(2 * m, 0, m, m) = G2H2 * def.A;
        F.block(2 * m, m, m, m) = G2H2 * (-B1G);
        F.block(2 * m, 2 * m, m, m) = G2H2 * (B1G - BK) + (I - G2H2) * (def.A - BK);

        Mat Nw(3 * m, m);
        Nw << I, GH, G2H2;
        Mat Nv = Mat::Zero(3 * m, pq);
        Nv.block(m, 0, m, pq) = Gn;
        Nv.block(2 * m, 0, m, pq).rightCols(q) = G2n;

        Xi = F * Xi * F.transpose() + Nw * def.Qw * Nw.transpose() +
             Nv * aug.Qv * Nv.transpose();
        Exx.push_back(Xi.topLeftCorner(m, m));
    }
    return Exx;
}

StabilityReport stability_report(const ProblemDef& def, const AugmentedDef& aug,
                                 const SteadyState& ss, const SteadyGains& gains) {
    StabilityReport rep;
    const Mat Acl = def.A - aug.B * gains.K;
    rep.rho = spectral_radius(Acl);
    rep.lyapunov_residual =
        (ss.P - (gains.K.transpose() * aug.R * gains.K + def.Q +
                 Acl.transpose() * ss.P * Acl))
            .norm();
    rep.bounded = rep.rho < 1.0;
    if (!rep.bounded) return rep;

    // Fixed point of the steady joint moment map: run the exact propagation
    // with constant steady gains until it settles.
    SimInputs in;
    in.def = def;
    in.aug = aug;
    in.N = 2000;
    in.K.assign(in.N + 1, gains.K);
    in.Gamma.assign(in.N + 1, gains.Gamma);
    const Mat G = ss.G, G2 = ss.G2;
    in.cov1.gain.assign(in.N + 2, G);
    in.cov1.Sig_pred.assign(in.N + 2, ss.Sig1);
    in.cov2.gain.assign(in.N + 2, G2);
    in.cov2.Sig_pred.assign(in.N + 2, ss.Sig2);
    const std::vector<Mat> Exx = closed_loop_second_moments(in);
    for (size_t k = 1; k < Exx.size(); ++k) {
        if ((Exx[k] - Exx[k - 1]).norm() <= 1e-12 * (1.0 + Exx[k].norm())) {
            rep.has_moment_limit = true;
            rep.Exx_limit = Exx[k];
            break;
        }
    }
    if (!rep.has_moment_limit) rep.Exx_limit = Exx.back();
    return rep;
}

ProbeResult info_pattern_probe(const SimInputs& in, const SimConfig& cfg, int replicate_index) {
    const Trajectory base = rollout(in, cfg, replicate_index);
    std::vector<Vec> injections;
    injections.reserve(in.N + 1);
    for (int k = 0; k <= in.N; ++k) {
        injections.push_back(in.def.B1 * base.u1[k] + in.def.B2 * base.u2[k]);
    }
    // Same x0/w/v2 streams, fresh v1 stream, plant replays the base inputs.
    const uint64_t other = static_cast<uint64_t>(replicate_index) + 0x80000000ull;
    const Trajectory alt = rollout_core(in, cfg, replicate_index, &injections, other);

    ProbeResult res;
    res.u2_identical = true;
    for (int k = 0; k <= in.N; ++k) {
        const double d2 = (alt.u2[k] - base.u2[k]).cwiseAbs().maxCoeff();
        const double d1 = (alt.u1[k] - base.u1[k]).cwiseAbs().maxCoeff();
        res.max_u2_diff = std::max(res.max_u2_diff, d2);
        res.max_u1_diff = std::max(res.max_u1_diff, d1);
        if (d2 != 0.0) res.u2_identical = false;
    }
    res.u1_differs = res.max_u1_diff > 0.0;
    return res;
}

}  // namespace declqg
