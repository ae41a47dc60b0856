#pragma once

#include <string>
#include <vector>

#include "declqg/types.hpp"

namespace declqg {

// Relative asymmetry above this fails validation outright.
inline constexpr double kAsymViolationTol = 1e-8;
// Below the violation threshold, asymmetry beyond this still earns a warning
// before the matrix is symmetrized for downstream use.
inline constexpr double kAsymWarnTol = 1e-10;

// Returns every violated invariant as a human-readable description; an empty
// list means the instance is valid. Diagnostics are returned, never thrown.
std::vector<std::string> validate(const ProblemDef& def);

// X <- (X + X')/2 on every symmetric-by-contract member. Warnings are
// appended for members whose relative asymmetry exceeded kAsymWarnTol.
ProblemDef symmetrized(const ProblemDef& def,
                       std::vector<std::string>* warnings = nullptr);

// Stacks B = [B1 B2], H = [H1; H2] and the block-diagonal R, Qv exactly as
// blocks; the inputs are not modified. Throws std::invalid_argument on any
// shape mismatch (a malformed def).
AugmentedDef augment(const ProblemDef& def);

}  // namespace declqg
