#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "declqg/controller.hpp"
#include "declqg/estimator.hpp"
#include "declqg/model.hpp"
#include "declqg/problem_json.hpp"
#include "declqg/riccati.hpp"
#include "declqg/sec4.hpp"
#include "declqg/simulator.hpp"

namespace py = pybind11;
using namespace declqg;

namespace {

SimInputs build_inputs(const ProblemDef& def, const std::string& mode, int horizon,
                       double tol, int max_iter) {
    const AugmentedDef aug = augment(def);
    const int m = def.dims.m;
    if (mode == "finite") {
        const FiniteHorizonResult fh = finite_horizon_solve(def, aug, horizon);
        if (fh.status != SolveStatus::Converged) {
            throw std::runtime_error("finite-horizon coupling did not converge");
        }
        return make_sim_inputs(def, aug, fh.rt, synthesize(fh.rt), horizon);
    }
    const ForwardResult fr =
        forward_iteration(def, aug, Mat::Identity(m, m), Mat::Identity(m, m),
                          0.1 * Mat::Identity(m, m), tol, max_iter);
    if (fr.ss.status != SolveStatus::Converged) {
        throw std::runtime_error("forward iteration did not converge: " + fr.ss.diagnostic);
    }
    return make_sim_inputs(def, aug, synthesize(fr.ss), horizon);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "decentralized LQG solver core";

    py::class_<Dimensions>(m, "Dimensions")
        .def(py::init<>())
        .def_readwrite("m", &Dimensions::m)
        .def_readwrite("l", &Dimensions::l)
        .def_readwrite("r", &Dimensions::r)
        .def_readwrite("p", &Dimensions::p)
        .def_readwrite("q", &Dimensions::q);

    py::class_<ProblemDef>(m, "Problem")
        .def(py::init<>())
        .def_readwrite("dims", &ProblemDef::dims)
        .def_readwrite("A", &ProblemDef::A)
        .def_readwrite("B1", &ProblemDef::B1)
        .def_readwrite("B2", &ProblemDef::B2)
        .def_readwrite("H1", &ProblemDef::H1)
        .def_readwrite("H2", &ProblemDef::H2)
        .def_readwrite("Qw", &ProblemDef::Qw)
        .def_readwrite("Qv1", &ProblemDef::Qv1)
        .def_readwrite("Qv2", &ProblemDef::Qv2)
        .def_readwrite("Q", &ProblemDef::Q)
        .def_readwrite("R1", &ProblemDef::R1)
        .def_readwrite("R2", &ProblemDef::R2)
        .def_readwrite("Theta", &ProblemDef::Theta)
        .def_readwrite("mu", &ProblemDef::mu)
        .def_readwrite("Sigma0", &ProblemDef::Sigma0)
        .def("to_json", &problem_to_json);

    m.def("sec4_problem", &sec4_problem);
    m.def("load_problem",
          [](const std::string& path) { return load_problem(path, nullptr); });
    m.def("parse_problem",
          [](const std::string& text) { return parse_problem(text, nullptr); });
    m.def("validate", &validate);

    m.def("augment", [](const ProblemDef& def) {
        const AugmentedDef aug = augment(def);
        py::dict d;
        d["B"] = aug.B;
        d["H"] = aug.H;
        d["R"] = aug.R;
        d["Qv"] = aug.Qv;
        return d;
    });

    m.def(
        "solve",
        [](const ProblemDef& def, double seed_p, double seed_cov, double tol, int max_iter) {
            const AugmentedDef aug = augment(def);
            const int mm = def.dims.m;
            const ForwardResult fr = forward_iteration(
                def, aug, seed_p * Mat::Identity(mm, mm), seed_p * Mat::Identity(mm, mm),
                seed_cov * Mat::Identity(mm, mm), tol, max_iter);
            const SteadyState& ss = fr.ss;
            py::dict d;
            d["status"] = std::string(to_string(ss.status));
            d["iterations"] = ss.iterations;
            d["P"] = ss.P;
            d["S"] = ss.S;
            d["Phi"] = ss.Phi;
            d["M"] = ss.M;
            d["Ups"] = ss.Ups;
            d["L"] = ss.L;
            d["L0"] = ss.L0;
            d["Lam"] = ss.Lam;
            d["Sig1"] = ss.Sig1;
            d["Sig2"] = ss.Sig2;
            d["G"] = ss.G;
            d["G2"] = ss.G2;
            d["residuals"] = ss.residuals;
            if (ss.status == SolveStatus::Converged) {
                const SteadyGains g = synthesize(ss);
                d["K"] = g.K;
                d["Gamma"] = g.Gamma;
            }
            py::list trace_P, trace_S;
            for (const auto& row : fr.trace) {
                trace_P.append(row.P);
                trace_S.append(row.S);
            }
            d["trace_P"] = trace_P;
            d["trace_S"] = trace_S;
            return d;
        },
        py::arg("problem"), py::arg("seed_p") = 1.0, py::arg("seed_cov") = 0.1,
        py::arg("tol") = 1e-9, py::arg("max_iter") = 10000);

    m.def(
        "optimal_cost",
        [](const ProblemDef& def, int horizon) {
            const AugmentedDef aug = augment(def);
            const FiniteHorizonResult fh = finite_horizon_solve(def, aug, horizon);
            if (fh.status != SolveStatus::Converged) {
                throw std::runtime_error("finite-horizon coupling did not converge");
            }
            return optimal_cost(def, aug, fh.rt, fh.rt.cov1);
        },
        py::arg("problem"), py::arg("horizon"));

    m.def(
        "simulate",
        [](const ProblemDef& def, int horizon, int replications, uint64_t seed,
           const std::string& mode, int threads) {
            SimInputs in = build_inputs(def, mode, horizon, 1e-9, 10000);
            SimConfig cfg;
            cfg.seed = seed;
            cfg.horizon = horizon;
            cfg.replications = replications;
            cfg.threads = threads;
            const SimSummary s = monte_carlo(in, cfg);
            py::dict d;
            d["cost_mean"] = s.cost_mean;
            d["cost_se"] = s.cost_se;
            d["rho"] = s.rho;
            d["bounded"] = s.bounded;
            d["overflow"] = s.overflow;
            py::list exx, s1, s2;
            for (const auto& X : s.Exx) exx.append(X);
            for (const auto& X : s.Sig1_emp) s1.append(X);
            for (const auto& X : s.Sig2_emp) s2.append(X);
            d["Exx"] = exx;
            d["Sig1_emp"] = s1;
            d["Sig2_emp"] = s2;
            return d;
        },
        py::arg("problem"), py::arg("horizon"), py::arg("replications"),
        py::arg("seed") = 12345, py::arg("mode") = "steady", py::arg("threads") = 0);

    m.def(
        "rollout",
        [](const ProblemDef& def, int horizon, uint64_t seed, int replicate,
           const std::string& mode) {
            SimInputs in = build_inputs(def, mode, horizon, 1e-9, 10000);
            SimConfig cfg;
            cfg.seed = seed;
            cfg.horizon = horizon;
            cfg.replications = 1;
            const Trajectory tr = rollout(in, cfg, replicate);
            py::dict d;
            py::list x, xhat1, xhat2, u1, u2, stage;
            for (int k = 0; k <= tr.N; ++k) {
                x.append(tr.x[k]);
                xhat1.append(tr.xhat1[k]);
                xhat2.append(tr.xhat2[k]);
                u1.append(tr.u1[k]);
                u2.append(tr.u2[k]);
                stage.append(tr.stage_cost[k]);
            }
            d["x"] = x;
            d["xhat1"] = xhat1;
            d["xhat2"] = xhat2;
            d["u1"] = u1;
            d["u2"] = u2;
            d["stage_cost"] = stage;
            d["total_cost"] = tr.total_cost;
            return d;
        },
        py::arg("problem"), py::arg("horizon"), py::arg("seed") = 12345,
        py::arg("replicate") = 0, py::arg("mode") = "steady");
}
