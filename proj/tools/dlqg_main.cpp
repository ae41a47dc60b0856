// dlqg: batch front-end for the decentralized LQG solver.
//
// Subcommands: solve, simulate, verify, example-sec4, dump-config.
// Exit codes: 0 ok, 1 config error, 2 solver non-convergence,
// 3 failed verification property.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "declqg/controller.hpp"
#include "declqg/csv.hpp"
#include "declqg/estimator.hpp"
#include "declqg/linalg.hpp"
#include "declqg/manifest.hpp"
#include "declqg/model.hpp"
#include "declqg/problem_json.hpp"
#include "declqg/riccati.hpp"
#include "declqg/sec4.hpp"
#include "declqg/simulator.hpp"

namespace fs = std::filesystem;
using namespace declqg;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNoConvergence = 2;
constexpr int kExitPropertyFailure = 3;

// "sec4" resolves to the embedded benchmark instance.
ProblemDef resolve_config(const std::string& config, std::string* label) {
    if (config == "sec4") {
        *label = "<embedded:sec4>";
        return sec4_problem();
    }
    *label = config;
    std::vector<std::string> warnings;
    ProblemDef def = load_problem(config, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    return def;
}

struct SolveOptions {
    double tol = 1e-9;
    int max_iter = 10000;
    double seed_p = 1.0;
    double seed_cov = 0.1;
};

int run_solve(const std::string& config, const SolveOptions& opt, const std::string& out_dir) {
    std::string label;
    const ProblemDef def = resolve_config(config, &label);
    const AugmentedDef aug = augment(def);
    const int m = def.dims.m;

    const ForwardResult fr =
        forward_iteration(def, aug, opt.seed_p * Mat::Identity(m, m),
                          opt.seed_p * Mat::Identity(m, m),
                          opt.seed_cov * Mat::Identity(m, m), opt.tol, opt.max_iter);
    const SteadyState& ss = fr.ss;

    fs::create_directories(out_dir);
    RunManifest man;
    man.command = "solve";
    man.config = label;
    man.tolerances = {{"tol", opt.tol}, {"max_iter", static_cast<double>(opt.max_iter)}};
    man.settings = {{"seed_p", format_double(opt.seed_p)},
                    {"seed_cov", format_double(opt.seed_cov)},
                    {"gains_mode", "steady-state"}};
    man.status = to_string(ss.status);

    const fs::path trace_path = fs::path(out_dir) / "riccati_trace.csv";
    const fs::path steady_path = fs::path(out_dir) / "steady_state.csv";
    write_trace_csv(trace_path, fr.trace);
    write_steady_csv(steady_path, ss);
    man.add_output(trace_path);
    man.add_output(steady_path);

    if (ss.status != SolveStatus::Diverged) {
        const SteadyGains gains = synthesize(ss);
        const fs::path gains_path = fs::path(out_dir) / "gains.csv";
        write_gains_csv(gains_path, {gains.K}, {gains.Gamma}, /*steady=*/true);
        man.add_output(gains_path);
    }
    man.write(out_dir);

    std::cout << "status: " << to_string(ss.status) << " after " << ss.iterations
              << " iterations (last residual " << format_double(ss.last_residual) << ")\n";
    for (const auto& [name, value] : ss.residuals) {
        std::cout << "residual[" << name << "] = " << format_double(value) << "\n";
    }
    if (ss.status != SolveStatus::Converged) {
        if (!ss.diagnostic.empty()) std::cerr << "diagnostic: " << ss.diagnostic << "\n";
        return kExitNoConvergence;
    }
    return kExitOk;
}

struct SimulateOptions {
    std::string gains = "solve";
    std::string mode = "steady";
    int horizon = 50;
    int reps = 1000;
    uint64_t seed = 12345;
    std::string record = "summary";
    int threads = 0;
    SolveOptions solve;
};

int run_simulate(const std::string& config, const SimulateOptions& opt,
                 const std::string& out_dir) {
    std::string label;
    const ProblemDef def = resolve_config(config, &label);
    const AugmentedDef aug = augment(def);
    const int m = def.dims.m;
    const int N = opt.horizon;

    SimInputs inputs;
    std::string gains_mode;
    if (opt.gains == "solve") {
        if (opt.mode == "finite") {
            const FiniteHorizonResult fh = finite_horizon_solve(def, aug, N);
            if (fh.status != SolveStatus::Converged) {
                std::cerr << "finite-horizon coupling did not converge (residual "
                          << fh.last_residual << ")\n";
                return kExitNoConvergence;
            }
            inputs = make_sim_inputs(def, aug, fh.rt, synthesize(fh.rt), N);
            gains_mode = "finite-horizon";
        } else {
            const ForwardResult fr = forward_iteration(
                def, aug, opt.solve.seed_p * Mat::Identity(m, m),
                opt.solve.seed_p * Mat::Identity(m, m),
                opt.solve.seed_cov * Mat::Identity(m, m), opt.solve.tol, opt.solve.max_iter);
            if (fr.ss.status != SolveStatus::Converged) {
                std::cerr << "solver did not converge: " << fr.ss.diagnostic << "\n";
                return kExitNoConvergence;
            }
            inputs = make_sim_inputs(def, aug, synthesize(fr.ss), N);
            gains_mode = "steady-state (suboptimal in finite horizon)";
        }
    } else {
        std::vector<Mat> K, Gamma;
        bool steady = false;
        try {
            steady = read_gains_csv(opt.gains, def.dims.l, def.dims.r, m, &K, &Gamma);
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kExitConfig;
        }
        if (steady) {
            inputs = make_sim_inputs(def, aug, SteadyGains{K[0], Gamma[0]}, N);
            gains_mode = "steady-state (from file)";
        } else if (static_cast<int>(K.size()) >= N + 1) {
            inputs = make_sim_inputs(def, aug, K, Gamma, N);
            gains_mode = "finite-horizon (from file)";
        } else {
            std::cerr << "error: gains file covers k = 0.." << K.size() - 1
                      << " but horizon is " << N << "\n";
            return kExitConfig;
        }
    }

    SimConfig cfg;
    cfg.seed = opt.seed;
    cfg.horizon = N;
    cfg.replications = opt.reps;
    cfg.record = opt.record == "full" ? RecordLevel::FullTrajectories : RecordLevel::Summary;
    cfg.threads = opt.threads;
    cfg.mode = gains_mode.starts_with("finite") ? GainMode::FiniteHorizon
                                                : GainMode::SteadyState;

    const SimSummary summary = monte_carlo(inputs, cfg);

    fs::create_directories(out_dir);
    RunManifest man;
    man.command = "simulate";
    man.config = label;
    man.settings = {{"seed", std::to_string(opt.seed)},
                    {"horizon", std::to_string(N)},
                    {"replications", std::to_string(opt.reps)},
                    {"record", opt.record},
                    {"gains", opt.gains},
                    {"gains_mode", gains_mode}};
    man.status = summary.overflow ? "overflow" : "ok";

    const fs::path summary_path = fs::path(out_dir) / "summary.csv";
    write_summary_csv(summary_path, summary);
    man.add_output(summary_path);

    if (cfg.record == RecordLevel::FullTrajectories) {
        for (int rep = 0; rep < opt.reps; ++rep) {
            const Trajectory tr = rollout(inputs, cfg, rep);
            const fs::path p = fs::path(out_dir) / ("trajectory_r" + std::to_string(rep) + ".csv");
            write_trajectory_csv(p, tr);
            man.add_output(p);
        }
    }
    man.write(out_dir);

    std::cout << "gains: " << gains_mode << "\n";
    std::cout << "cost mean = " << format_double(summary.cost_mean)
              << "  se = " << format_double(summary.cost_se) << "  rho = "
              << format_double(summary.rho) << "  bounded = " << (summary.bounded ? 1 : 0)
              << "\n";
    return kExitOk;
}

struct PropertyLine {
    std::string name;
    bool pass;
    double value;
    double threshold;
};

int run_verify(const std::string& config, double tol, int reps, const std::string& out_dir) {
    std::string label;
    const ProblemDef def = resolve_config(config, &label);
    const AugmentedDef aug = augment(def);
    const int m = def.dims.m;

    const double solver_tol = std::min(1e-9, tol / 10.0);
    const ForwardResult fr = forward_iteration(def, aug, Mat::Identity(m, m),
                                               Mat::Identity(m, m),
                                               0.1 * Mat::Identity(m, m), solver_tol, 10000);
    const SteadyState& ss = fr.ss;
    if (ss.status != SolveStatus::Converged) {
        std::cerr << "solver did not converge: " << ss.diagnostic << "\n";
        return kExitNoConvergence;
    }
    const SteadyGains gains = synthesize(ss);

    std::vector<PropertyLine> props;
    auto check = [&](const std::string& name, double value, double threshold) {
        props.push_back({name, value <= threshold, value, threshold});
    };

    for (const auto& [name, value] : ss.residuals) {
        if (name == "S_asymmetry") continue;  // diagnostic, not a property
        check("are_residual." + name, value, tol);
    }

    check("gain_residual.K", (ss.Ups * gains.K - ss.M).norm() / (1.0 + ss.M.norm()), 1e-10);
    check("gain_residual.Gamma", (ss.Lam * gains.Gamma - ss.L).norm() / (1.0 + ss.L.norm()),
          1e-10);

    // Sigma2 - Sigma1 PSD along the belief-seeded chains with the steady
    // Gamma in force.
    const int chainN = 200;
    const CovChain1 c1 = c1_cov_rollforward(def.Sigma0, def, aug, chainN);
    const CovChain2 c2 = c2_cov_chain(def.Sigma0, c1, gains.Gamma, def, chainN);
    double worst_eig = 0.0;
    for (int k = 0; k <= chainN; ++k) {
        worst_eig = std::min(worst_eig, min_eig_sym(c2.Sig_filt[k] - c1.Sig_filt[k]));
    }
    check("psd.Sig2_minus_Sig1", -worst_eig, 1e-8);

    const StabilityReport stab = stability_report(def, aug, ss, gains);
    check("spectral_radius", stab.rho, std::nextafter(1.0, 0.0));
    check("lyapunov_residual", stab.lyapunov_residual, 1e-8);

    // Monte Carlo consistency at reduced replication count: empirical EEC of
    // controller 2 vs the decoupled recursion, 3 SE (Gaussian SE of a sample
    // covariance entry).
    const int simN = std::min(40, chainN);
    SimInputs inputs = make_sim_inputs(def, aug, gains, simN);
    SimConfig cfg;
    cfg.seed = 271828;
    cfg.horizon = simN;
    cfg.replications = reps;
    const SimSummary sum = monte_carlo(inputs, cfg);
    double worst_sigma = 0.0;
    for (int k : {simN / 4, simN / 2, simN}) {
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) {
                const double se = std::sqrt((inputs.cov2.Sig_filt[k](i, i) *
                                                 inputs.cov2.Sig_filt[k](j, j) +
                                             std::pow(inputs.cov2.Sig_filt[k](i, j), 2)) /
                                            reps);
                const double dev =
                    std::abs(sum.Sig2_emp[k](i, j) - inputs.cov2.Sig_filt[k](i, j));
                worst_sigma = std::max(worst_sigma, dev / (3.0 * se));
            }
        }
    }
    check("mc_consistency.Sigma2", worst_sigma, 1.0);

    const ProbeResult probe = info_pattern_probe(inputs, cfg, 0);
    props.push_back({"info_pattern.u2_bit_identical", probe.u2_identical, probe.max_u2_diff,
                     0.0});

    bool all_pass = true;
    nlohmann::json report = nlohmann::json::array();
    for (const auto& p : props) {
        all_pass = all_pass && p.pass;
        std::cout << (p.pass ? "PASS " : "FAIL ") << p.name << " (value "
                  << format_double(p.value) << ", threshold " << format_double(p.threshold)
                  << ")\n";
        report.push_back({{"name", p.name},
                          {"pass", p.pass},
                          {"value", p.value},
                          {"threshold", p.threshold}});
    }

    fs::create_directories(out_dir);
    {
        std::ofstream rf(fs::path(out_dir) / "verify_report.json");
        rf << report.dump(2) << "\n";
    }
    RunManifest man;
    man.command = "verify";
    man.config = label;
    man.tolerances = {{"tol", tol}};
    man.settings = {{"replications", std::to_string(reps)}};
    man.status = all_pass ? "pass" : "fail";
    man.add_output(fs::path(out_dir) / "verify_report.json");
    man.write(out_dir);
    return all_pass ? kExitOk : kExitPropertyFailure;
}

int run_example_sec4(const std::string& out_dir, uint64_t seed, int reps) {
    const ProblemDef def = sec4_problem();
    const AugmentedDef aug = augment(def);
    fs::create_directories(out_dir);

    RunManifest man;
    man.command = "example-sec4";
    man.config = "<embedded:sec4>";
    man.settings = {{"seed", std::to_string(seed)},
                    {"replications", std::to_string(reps)},
                    {"seed_p", format_double(kSec4SeedP)},
                    {"seed_cov", format_double(kSec4SeedCov)}};

    // Riccati trace with the benchmark's reported seeds.
    const ForwardResult fr = forward_iteration(
        def, aug, kSec4SeedP * Mat::Identity(1, 1), kSec4SeedP * Mat::Identity(1, 1),
        kSec4SeedCov * Mat::Identity(1, 1), 1e-12, 10000);
    if (fr.ss.status != SolveStatus::Converged) {
        std::cerr << "solver did not converge\n";
        return kExitNoConvergence;
    }
    const fs::path fig2 = fs::path(out_dir) / "fig2_riccati_trace.csv";
    write_trace_csv(fig2, fr.trace);
    man.add_output(fig2);

    const SteadyGains gains = synthesize(fr.ss);
    const int N = 200;
    const SimInputs controlled = make_sim_inputs(def, aug, gains, N);
    const SimInputs uncontrolled = make_sim_inputs_uncontrolled(def, aug, N);

    SimConfig cfg;
    cfg.seed = seed;
    cfg.horizon = N;
    cfg.replications = reps;
    const SimSummary sum_c = monte_carlo(controlled, cfg);
    const SimSummary sum_u = monte_carlo(uncontrolled, cfg);

    {
        std::ofstream out(fs::path(out_dir) / "fig3_second_moment.csv");
        out << "k,Exx_controlled,Exx_uncontrolled\n";
        for (int k = 0; k <= N + 1; ++k) {
            out << k << "," << format_double(sum_c.Exx[k](0, 0)) << ","
                << format_double(sum_u.Exx[k](0, 0)) << "\n";
        }
    }
    man.add_output(fs::path(out_dir) / "fig3_second_moment.csv");

    {
        std::ofstream out(fs::path(out_dir) / "fig4_covariances.csv");
        out << "k,Sig1_filt,Sig2_filt,Sig1_emp,Sig2_emp\n";
        for (int k = 0; k <= N; ++k) {
            out << k << "," << format_double(controlled.cov1.Sig_filt[k](0, 0)) << ","
                << format_double(controlled.cov2.Sig_filt[k](0, 0)) << ","
                << format_double(sum_c.Sig1_emp[k](0, 0)) << ","
                << format_double(sum_c.Sig2_emp[k](0, 0)) << "\n";
        }
    }
    man.add_output(fs::path(out_dir) / "fig4_covariances.csv");

    {
        const Trajectory tr = rollout(controlled, cfg, 0);
        std::ofstream out(fs::path(out_dir) / "fig5_sample_path.csv");
        out << "k,x,xhat1,xhat2\n";
        for (int k = 0; k <= N; ++k) {
            out << k << "," << format_double(tr.x[k](0)) << "," << format_double(tr.xhat1[k](0))
                << "," << format_double(tr.xhat2[k](0)) << "\n";
        }
    }
    man.add_output(fs::path(out_dir) / "fig5_sample_path.csv");

    std::cout << "cost mean (controlled, N=" << N << ") = " << format_double(sum_c.cost_mean)
              << "  se = " << format_double(sum_c.cost_se) << "\n";
    std::cout << "rho = " << format_double(sum_c.rho) << "\n";

    const int verify_rc = run_verify("sec4", 1e-8, 4000, (fs::path(out_dir) / "verify").string());
    man.status = verify_rc == kExitOk ? "pass" : "fail";
    man.write(out_dir);
    return verify_rc;
}

int run_dump_config(const std::string& config, const std::string& out) {
    std::string label;
    const ProblemDef def = resolve_config(config, &label);
    if (out.empty() || out == "-") {
        std::cout << problem_to_json(def) << "\n";
    } else {
        dump_problem(def, out);
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"decentralized LQG solver, simulator and verifier"};
    app.require_subcommand(1);

    std::string config, out_dir = "out", dump_out;
    SolveOptions solve_opt;
    SimulateOptions sim_opt;
    double verify_tol = 1e-8;
    int verify_reps = 4000;
    uint64_t ex_seed = 12345;
    int ex_reps = 10000;

    CLI::App* solve = app.add_subcommand("solve", "solve the coupled Riccati fixed point");
    solve->add_option("config", config, "problem JSON file, or \"sec4\"")->required();
    solve->add_option("--tol", solve_opt.tol, "convergence tolerance");
    solve->add_option("--max-iter", solve_opt.max_iter, "iteration cap");
    solve->add_option("--seed-p", solve_opt.seed_p, "P0 = S0 = seed-p * I");
    solve->add_option("--seed-cov", solve_opt.seed_cov, "covariance-chain seed * I");
    solve->add_option("--out-dir", out_dir, "output directory");

    CLI::App* simulate = app.add_subcommand("simulate", "closed-loop Monte Carlo");
    simulate->add_option("config", config)->required();
    simulate->add_option("--gains", sim_opt.gains, "gains CSV path, or \"solve\"");
    simulate->add_option("--mode", sim_opt.mode, "steady | finite (with --gains solve)")
        ->check(CLI::IsMember({"steady", "finite"}));
    simulate->add_option("--horizon", sim_opt.horizon, "N: decisions at k = 0..N");
    simulate->add_option("--reps", sim_opt.reps, "replications");
    simulate->add_option("--seed", sim_opt.seed, "RNG seed");
    simulate->add_option("--record", sim_opt.record, "summary | full")
        ->check(CLI::IsMember({"summary", "full"}));
    simulate->add_option("--threads", sim_opt.threads, "0 = DLQG_THREADS env / auto");
    simulate->add_option("--tol", sim_opt.solve.tol, "solver tolerance for --gains solve");
    simulate->add_option("--seed-p", sim_opt.solve.seed_p);
    simulate->add_option("--seed-cov", sim_opt.solve.seed_cov);
    simulate->add_option("--out-dir", out_dir);

    CLI::App* verify = app.add_subcommand("verify", "run the property suite");
    verify->add_option("config", config)->required();
    verify->add_option("--tol", verify_tol, "residual threshold");
    verify->add_option("--reps", verify_reps, "Monte Carlo replication count");
    verify->add_option("--out-dir", out_dir);

    CLI::App* example = app.add_subcommand("example-sec4", "reproduce the built-in benchmark");
    example->add_option("--out-dir", out_dir);
    example->add_option("--seed", ex_seed);
    example->add_option("--reps", ex_reps);

    CLI::App* dump = app.add_subcommand("dump-config", "parse and re-emit a problem file");
    dump->add_option("config", config)->required();
    dump->add_option("--out", dump_out, "output path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) return run_solve(config, solve_opt, out_dir);
        if (simulate->parsed()) return run_simulate(config, sim_opt, out_dir);
        if (verify->parsed()) return run_verify(config, verify_tol, verify_reps, out_dir);
        if (example->parsed()) return run_example_sec4(out_dir, ex_seed, ex_reps);
        if (dump->parsed()) return run_dump_config(config, dump_out);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNoConvergence;
    }
    return kExitOk;
}
