#include "declqg/model.hpp"

#include <stdexcept>

#include "declqg/linalg.hpp"

namespace declqg {

namespace {

void check_shape(std::vector<std::string>& out, const std::string& name,
                 const Mat& X, int rows, int cols) {
    if (X.rows() != rows || X.cols() != cols) {
        out.push_back(name + " has wrong shape (got " + std::to_string(X.rows()) + "x" +
                      std::to_string(X.cols()) + ", want " + std::to_string(rows) + "x" +
                      std::to_string(cols) + ")");
    }
}

void check_symmetric(std::vector<std::string>& out, const std::string& name, const Mat& X) {
    if (X.rows() != X.cols()) return;  // shape violation reported separately
    if (rel_asym(X) > kAsymViolationTol) out.push_back(name + " not symmetric");
}

void check_psd(std::vector<std::string>& out, const std::string& name, const Mat& X) {
    if (X.rows() != X.cols()) return;
    if (!is_psd(X)) out.push_back(name + " not PSD");
}

void check_pd(std::vector<std::string>& out, const std::string& name, const Mat& X) {
    if (X.rows() != X.cols()) return;
    if (!is_pd(X)) out.push_back(name + " not positive definite");
}

}  // namespace

std::vector<std::string> validate(const ProblemDef& def) {
    std::vector<std::string> v;
    const auto& d = def.dims;
    if (d.m < 1) v.push_back("dims.m must be >= 1");
    if (d.l < 1) v.push_back("dims.l must be >= 1");
    if (d.r < 1) v.push_back("dims.r must be >= 1");
    if (d.p < 1) v.push_back("dims.p must be >= 1");
    if (d.q < 1) v.push_back("dims.q must be >= 1");
    if (!v.empty()) return v;  // shapes below are meaningless without dims

    check_shape(v, "A", def.A, d.m, d.m);
    check_shape(v, "B1", def.B1, d.m, d.l);
    check_shape(v, "B2", def.B2, d.m, d.r);
    check_shape(v, "H1", def.H1, d.p, d.m);
    check_shape(v, "H2", def.H2, d.q, d.m);
    check_shape(v, "Qw", def.Qw, d.m, d.m);
    check_shape(v, "Qv1", def.Qv1, d.p, d.p);
    check_shape(v, "Qv2", def.Qv2, d.q, d.q);
    check_shape(v, "Q", def.Q, d.m, d.m);
    check_shape(v, "R1", def.R1, d.l, d.l);
    check_shape(v, "R2", def.R2, d.r, d.r);
    check_shape(v, "Theta", def.Theta, d.m, d.m);
    check_shape(v, "Sigma0", def.Sigma0, d.m, d.m);
    if (def.mu.size() != d.m) {
        v.push_back("mu has wrong length (got " + std::to_string(def.mu.size()) + ", want " +
                    std::to_string(d.m) + ")");
    }

    for (const auto& [name, X] :
         {std::pair<const char*, const Mat*>{"Qw", &def.Qw}, {"Qv1", &def.Qv1},
          {"Qv2", &def.Qv2}, {"Q", &def.Q}, {"R1", &def.R1}, {"R2", &def.R2},
          {"Theta", &def.Theta}, {"Sigma0", &def.Sigma0}}) {
        check_symmetric(v, name, *X);
        check_psd(v, name, *X);
    }
    // Qv1, Qv2 appear inverted inside the filter gains.
    check_pd(v, "Qv1", def.Qv1);
    check_pd(v, "Qv2", def.Qv2);
    return v;
}

ProblemDef symmetrized(const ProblemDef& def, std::vector<std::string>* warnings) {
    ProblemDef out = def;
    for (auto& [name, X] :
         {std::pair<const char*, Mat*>{"Qw", &out.Qw}, {"Qv1", &out.Qv1},
          {"Qv2", &out.Qv2}, {"Q", &out.Q}, {"R1", &out.R1}, {"R2", &out.R2},
          {"Theta", &out.Theta}, {"Sigma0", &out.Sigma0}}) {
        if (X->rows() != X->cols()) continue;
        if (warnings && rel_asym(*X) > kAsymWarnTol) {
            warnings->push_back(std::string(name) + " symmetrized (relative asymmetry " +
                                std::to_string(rel_asym(*X)) + ")");
        }
        *X = sym(*X);
    }
    return out;
}

AugmentedDef augment(const ProblemDef& def) {
    const auto& d = def.dims;
    if (d.m < 1 || d.l < 1 || d.r < 1 || d.p < 1 || d.q < 1) {
        throw std::invalid_argument("augment: all dimensions must be >= 1");
    }
    auto expect = [](const char* name, const Mat& X, int rows, int cols) {
        if (X.rows() != rows || X.cols() != cols) {
            throw std::invalid_argument(std::string("augment: ") + name + " has shape " +
                                        std::to_string(X.rows()) + "x" + std::to_string(X.cols()) +
                                        ", want " + std::to_string(rows) + "x" +
                                        std::to_string(cols));
        }
    };
    expect("B1", def.B1, d.m, d.l);
    expect("B2", def.B2, d.m, d.r);
    expect("H1", def.H1, d.p, d.m);
    expect("H2", def.H2, d.q, d.m);
    expect("R1", def.R1, d.l, d.l);
    expect("R2", def.R2, d.r, d.r);
    expect("Qv1", def.Qv1, d.p, d.p);
    expect("Qv2", def.Qv2, d.q, d.q);

    AugmentedDef aug;
    aug.B = Mat(d.m, d.l + d.r);
    aug.B << def.B1, def.B2;
    aug.H = Mat(d.p + d.q, d.m);
    aug.H << def.H1, def.H2;
    aug.R = Mat::Zero(d.l + d.r, d.l + d.r);
    aug.R.topLeftCorner(d.l, d.l) = def.R1;
    aug.R.bottomRightCorner(d.r, d.r) = def.R2;
    aug.Qv = Mat::Zero(d.p + d.q, d.p + d.q);
    aug.Qv.topLeftCorner(d.p, d.p) = def.Qv1;
    aug.Qv.bottomRightCorner(d.q, d.q) = def.Qv2;
    return aug;
}

}  // namespace declqg
