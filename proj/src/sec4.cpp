#include "declqg/sec4.hpp"

namespace declqg {

ProblemDef sec4_problem() {
    ProblemDef def;
    def.dims = {1, 1, 1, 1, 1};
    def.A = Mat::Constant(1, 1, 2.7);
    def.B1 = Mat::Constant(1, 1, 1.2);
    def.B2 = Mat::Constant(1, 1, 1.1);
    def.H1 = Mat::Constant(1, 1, 1.2);
    def.H2 = Mat::Constant(1, 1, 1.1);
    def.Qw = Mat::Identity(1, 1);
    def.Qv1 = Mat::Identity(1, 1);
    def.Qv2 = Mat::Identity(1, 1);
    def.Q = Mat::Identity(1, 1);
    def.R1 = Mat::Identity(1, 1);
    def.R2 = Mat::Identity(1, 1);
    def.Theta = Mat::Identity(1, 1);
    def.mu = Vec::Zero(1);
    def.Sigma0 = Mat::Identity(1, 1);
    return def;
}

}  // namespace declqg
