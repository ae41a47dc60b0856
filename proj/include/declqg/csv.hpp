#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "declqg/riccati.hpp"
#include "declqg/simulator.hpp"
#include "declqg/types.hpp"

namespace declqg {

// All CSV output uses %.17g so values round-trip exactly and file checksums
// are reproducible.
std::string format_double(double v);

// k, P_<i>_<j>..., S_<i>_<j>..., resid_P, resid_S, resid_Sig2
void write_trace_csv(const std::filesystem::path& path,
                     const std::vector<IterTraceRow>& trace);

// One row per steady quantity entry: name, i, j, value — plus residual rows.
void write_steady_csv(const std::filesystem::path& path, const SteadyState& ss);

// k, K_<i>_<j>..., Gamma_<i>_<j>...; steady gains use the sentinel k = -1.
void write_gains_csv(const std::filesystem::path& path, const std::vector<Mat>& K,
                     const std::vector<Mat>& Gamma, bool steady);

// Reads a gains CSV back; returns true when the file carried the steady
// sentinel row.
bool read_gains_csv(const std::filesystem::path& path, int l, int r, int m,
                    std::vector<Mat>* K, std::vector<Mat>* Gamma);

// k, x_0.., y_0.., y2_0.., u1_0.., u2_0.., xhat1_0.., xhat2_0.., stage_cost
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& tr);

// Leading record line `# cost_mean=... cost_se=... rho=... bounded=...`,
// then k, Exx_<i>_<j>..., Sig1_emp_<i>_<j>..., Sig2_emp_<i>_<j>...
void write_summary_csv(const std::filesystem::path& path, const SimSummary& s);

}  // namespace declqg
