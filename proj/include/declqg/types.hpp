#pragma once

#include <Eigen/Dense>

namespace declqg {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// State, input and observation dimensions. All five must be >= 1; they are
// written explicitly in problem files and cross-checked against every matrix
// so transposed inputs are caught early.
struct Dimensions {
    int m = 0;  // state
    int l = 0;  // input of controller 1
    int r = 0;  // input of controller 2
    int p = 0;  // observation of sensor 1
    int q = 0;  // observation of sensor 2
};

// One decentralized LQG problem instance:
//   x_{k+1} = A x + B1 u1 + B2 u2 + w,   w ~ N(0, Qw)
//   y1 = H1 x + v1,  v1 ~ N(0, Qv1)
//   y2 = H2 x + v2,  v2 ~ N(0, Qv2)
//   J  = E[ sum_k x'Qx + u1'R1 u1 + u2'R2 u2 + x_{N+1}' Theta x_{N+1} ]
// with x0 ~ N(mu, Sigma0). Controller 1 sees both observation streams,
// controller 2 only its own.
struct ProblemDef {
    Dimensions dims;
    Mat A;       // m x m
    Mat B1;      // m x l
    Mat B2;      // m x r
    Mat H1;      // p x m
    Mat H2;      // q x m
    Mat Qw;      // m x m
    Mat Qv1;     // p x p
    Mat Qv2;     // q x q
    Mat Q;       // m x m
    Mat R1;      // l x l
    Mat R2;      // r x r
    Mat Theta;   // m x m
    Vec mu;      // m
    Mat Sigma0;  // m x m
};

// Stacked quantities for controller 1's joint observation channel and the
// combined input u = [u1_hat; u2].
struct AugmentedDef {
    Mat B;   // m x (l+r)      = [B1 B2]
    Mat H;   // (p+q) x m      = [H1; H2]
    Mat R;   // (l+r) x (l+r)  = blkdiag(R1, R2)
    Mat Qv;  // (p+q) x (p+q)  = blkdiag(Qv1, Qv2)
};

}  // namespace declqg
