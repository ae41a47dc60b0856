#pragma once

#include "declqg/types.hpp"

namespace declqg {

// The built-in scalar benchmark instance: unstable A = 2.7, two scalar
// inputs and two scalar observation channels, unit weights and noise
// covariances, x0 ~ N(0, 1).
ProblemDef sec4_problem();

// Iteration seeds the benchmark is reported with: P0 = S0 = 3 and
// covariance-chain seed 0.1.
inline constexpr double kSec4SeedP = 3.0;
inline constexpr double kSec4SeedCov = 0.1;

}  // namespace declqg
