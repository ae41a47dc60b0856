#pragma once

#include <cstdint>
#include <vector>

#include "declqg/controller.hpp"
#include "declqg/estimator.hpp"
#include "declqg/riccati.hpp"
#include "declqg/types.hpp"

namespace declqg {

enum class GainMode { FiniteHorizon, SteadyState };
enum class RecordLevel { Summary, FullTrajectories };

struct SimConfig {
    uint64_t seed = 0;
    int horizon = 1;       // N: decisions at k = 0..N, terminal state at N+1
    int replications = 1;
    GainMode mode = GainMode::SteadyState;
    RecordLevel record = RecordLevel::Summary;
    int threads = 0;       // 0 = DLQG_THREADS env var, else hardware default
};

// Everything a rollout reads: problem data, per-step control gains, the
// per-step filter gains (time-varying Kalman chains started from the belief
// Sigma0, controller 2's chain driven by the Gamma in force), and the noise
// factors. Immutable once built; shared read-only across replicate threads.
struct SimInputs {
    ProblemDef def;
    AugmentedDef aug;
    GainMode mode = GainMode::SteadyState;
    int N = 0;
    std::vector<Mat> K;      // k = 0..N
    std::vector<Mat> Gamma;  // k = 0..N
    CovChain1 cov1;          // k = 0..N+1
    CovChain2 cov2;          // k = 0..N+1
    Mat Lx0, Lw, Lv1, Lv2;   // lower PSD factors of Sigma0, Qw, Qv1, Qv2
    double rho = 0.0;        // spectral radius of A - B K_0
};

// Finite-horizon gains from a coupled trajectory (must carry its chains).
SimInputs make_sim_inputs(const ProblemDef& def, const AugmentedDef& aug,
                          const RiccatiTrajectory& rt, const GainSchedule& gains, int N);
// Constant steady gains; filter chains are rolled forward from Sigma0 with
// the steady Gamma in force.
SimInputs make_sim_inputs(const ProblemDef& def, const AugmentedDef& aug,
                          const SteadyGains& gains, int N);
// Explicit per-step gain schedule (e.g. read from a gains file); entries are
// recycled from the last one if shorter than N+1 after validation by caller.
SimInputs make_sim_inputs(const ProblemDef& def, const AugmentedDef& aug,
                          const std::vector<Mat>& K, const std::vector<Mat>& Gamma, int N);
// Uncontrolled baseline: all control gains zero, same filter machinery.
SimInputs make_sim_inputs_uncontrolled(const ProblemDef& def, const AugmentedDef& aug, int N);

// One closed-loop sample path. Stage cost is x'Qx + u1'R1 u1 + u2'R2 u2,
// recomputable exactly from the stored vectors.
struct Trajectory {
    int N = 0;
    std::vector<Vec> x, y, y2, u1, u2, u, utilde1, xhat1, xhat2;
    std::vector<double> stage_cost;  // k = 0..N
    Vec x_terminal;                  // x_{N+1}
    double terminal_cost = 0.0;
    double total_cost = 0.0;
    bool overflow = false;
};

double stage_cost(const Vec& x, const Vec& u1, const Vec& u2, const ProblemDef& def);

// Noise substreams are derived from (seed, replicate_index) only, so
// replicates are reproducible in any execution order.
Trajectory rollout(const SimInputs& in, const SimConfig& cfg, int replicate_index);

struct SimSummary {
    double cost_mean = 0.0;
    double cost_se = 0.0;            // sample std / sqrt(replications)
    std::vector<Mat> Exx;            // k = 0..N+1
    std::vector<Mat> Sig1_emp;       // empirical E[(x - xhat1)(x - xhat1)'], k = 0..N
    std::vector<Mat> Sig2_emp;       // same for controller 2
    double rho = 0.0;
    bool bounded = false;            // rho < 1 and no overflow
    bool overflow = false;
    int replications = 0;
};

// Aggregates replicates in fixed 256-replicate chunks merged in chunk order,
// so the summary is bit-identical for any thread count.
SimSummary monte_carlo(const SimInputs& in, const SimConfig& cfg);

// Exact second moments E[x_k x_k'] of the closed loop for k = 0..N+1,
// propagated through the joint (x, xhat1, xhat2) linear recursion with the
// same gains the simulator applies.
std::vector<Mat> closed_loop_second_moments(const SimInputs& in);

// Steady-state diagnostics: spectral radius of A - B Ups^-1 M, the Lyapunov
// identity residual
//   || P - M'Ups^-1 R Ups^-1 M - Q - (A - B Ups^-1 M)' P (A - B Ups^-1 M) ||_F,
// and the fixed point of the steady closed-loop second-moment map when it
// exists.
struct StabilityReport {
    double rho = 0.0;
    double lyapunov_residual = 0.0;
    bool bounded = false;
    bool has_moment_limit = false;
    Mat Exx_limit;
};
StabilityReport stability_report(const ProblemDef& def, const AugmentedDef& aug,
                                 const SteadyState& ss, const SteadyGains& gains);

// Structural information-pattern probe. Reruns a replicate with the v1
// substream resampled while replaying the first run's physical plant inputs,
// so both runs share the state path; controller 2's stack sees identical
// (y2, u) and must reproduce u2 bit-identically, while controller 1's u1
// responds to the new v1. (In the fully closed loop a v1 change reaches y2
// through B1*utilde1; the replay isolates the information path.)
struct ProbeResult {
    bool u2_identical = false;
    bool u1_differs = false;
    double max_u2_diff = 0.0;
    double max_u1_diff = 0.0;
};
ProbeResult info_pattern_probe(const SimInputs& in, const SimConfig& cfg, int replicate_index);

}  // namespace declqg
