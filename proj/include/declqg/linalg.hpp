#pragma once

#include <stdexcept>
#include <string>

#include "declqg/types.hpp"

namespace declqg {

// Thrown when a required factorization or solve is numerically unusable
// (singular innovation covariance, ill-conditioned gain equation, ...).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline Mat sym(const Mat& X) { return 0.5 * (X + X.transpose()); }

// ||X - X'||_F / (1 + ||X||_F)
double rel_asym(const Mat& X);

// Smallest eigenvalue of sym(X).
double min_eig_sym(const Mat& X);

// Eigenvalue floor >= -floor_scale * (1 + ||X||_F).
bool is_psd(const Mat& X, double floor_scale = 1e-10);

// Strictly positive spectrum: lambda_min > floor_scale * (1 + ||X||_F).
bool is_pd(const Mat& X, double floor_scale = 1e-10);

// Condition estimate lambda_max / lambda_min of a symmetric matrix
// (infinity when lambda_min <= 0).
double sym_condition(const Mat& X);

// Solves S * X = B for symmetric positive definite S via LLT. Throws
// NumericalError naming `what` when S fails the factorization or its
// condition estimate exceeds cond_limit.
Mat solve_spd(const Mat& S, const Mat& B, const std::string& what,
              double cond_limit = 1e12);

double spectral_radius(const Mat& X);

// Lower factor F with F*F' = X for symmetric positive SEMIdefinite X
// (negative eigenvalues from roundoff are clamped to zero), so that
// zero covariances sample as exact zeros.
Mat psd_sqrt_lower(const Mat& X);

// PBH test: every eigenvalue of A with |lambda| >= 1 keeps [A - lambda I; H]
// at full column rank (smallest singular value > tol * largest).
bool detectable(const Mat& A, const Mat& H, double tol = 1e-8);

}  // namespace declqg
