#include "declqg/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace declqg {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

void entry_headers(std::ostream& os, const std::string& prefix, int rows, int cols) {
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) os << "," << prefix << "_" << i << "_" << j;
}

void entry_values(std::ostream& os, const Mat& X) {
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        for (Eigen::Index j = 0; j < X.cols(); ++j) os << "," << format_double(X(i, j));
}

void vec_headers(std::ostream& os, const std::string& prefix, int n) {
    for (int i = 0; i < n; ++i) os << "," << prefix << "_" << i;
}

void vec_values(std::ostream& os, const Vec& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) os << "," << format_double(v(i));
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_trace_csv(const std::filesystem::path& path,
                     const std::vector<IterTraceRow>& trace) {
    auto out = open_out(path);
    if (trace.empty()) {
        out << "k\n";
        return;
    }
    const int m = static_cast<int>(trace[0].P.rows());
    out << "k";
    entry_headers(out, "P", m, m);
    entry_headers(out, "S", m, m);
    out << ",resid_P,resid_S,resid_Sig2\n";
    for (const auto& row : trace) {
        out << row.k;
        entry_values(out, row.P);
        entry_values(out, row.S);
        out << "," << format_double(row.dP) << "," << format_double(row.dS) << ","
            << format_double(row.dSig2) << "\n";
    }
}

void write_steady_csv(const std::filesystem::path& path, const SteadyState& ss) {
    auto out = open_out(path);
    out << "name,i,j,value\n";
    auto emit = [&](const char* name, const Mat& X) {
        for (Eigen::Index i = 0; i < X.rows(); ++i)
            for (Eigen::Index j = 0; j < X.cols(); ++j)
                out << name << "," << i << "," << j << "," << format_double(X(i, j)) << "\n";
    };
    emit("P", ss.P);
    emit("S", ss.S);
    emit("Phi", ss.Phi);
    emit("M", ss.M);
    emit("Ups", ss.Ups);
    emit("L0", ss.L0);
    emit("L", ss.L);
    emit("Lam", ss.Lam);
    emit("Sig1", ss.Sig1);
    emit("Sig2", ss.Sig2);
    emit("G", ss.G);
    emit("G2", ss.G2);
    for (const auto& [name, value] : ss.residuals) {
        out << "residual_" << name << ",0,0," << format_double(value) << "\n";
    }
    out << "iterations,0,0," << ss.iterations << "\n";
    out << "status,0,0," << to_string(ss.status) << "\n";
}

void write_gains_csv(const std::filesystem::path& path, const std::vector<Mat>& K,
                     const std::vector<Mat>& Gamma, bool steady) {
    auto out = open_out(path);
    const int lr = static_cast<int>(K.at(0).rows());
    const int m = static_cast<int>(K.at(0).cols());
    const int l = static_cast<int>(Gamma.at(0).rows());
    out << "k";
    entry_headers(out, "K", lr, m);
    entry_headers(out, "Gamma", l, m);
    out << "\n";
    for (size_t k = 0; k < K.size(); ++k) {
        out << (steady ? -1 : static_cast<int>(k));
        entry_values(out, K[k]);
        entry_values(out, Gamma[k]);
        out << "\n";
    }
}

bool read_gains_csv(const std::filesystem::path& path, int l, int r, int m,
                    std::vector<Mat>* K, std::vector<Mat>* Gamma) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open gains file " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty gains file " + path.string());
    const size_t expected = 1 + static_cast<size_t>((l + r) * m + l * m);
    bool steady = false;
    K->clear();
    Gamma->clear();
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
        if (vals.size() != expected) {
            throw std::runtime_error("gains file " + path.string() + ": row has " +
                                     std::to_string(vals.size()) + " columns, want " +
                                     std::to_string(expected));
        }
        if (vals[0] < 0) steady = true;
        size_t idx = 1;
        Mat Kk(l + r, m), Gk(l, m);
        for (int i = 0; i < l + r; ++i)
            for (int j = 0; j < m; ++j) Kk(i, j) = vals[idx++];
        for (int i = 0; i < l; ++i)
            for (int j = 0; j < m; ++j) Gk(i, j) = vals[idx++];
        K->push_back(Kk);
        Gamma->push_back(Gk);
    }
    if (K->empty()) throw std::runtime_error("gains file " + path.string() + " has no rows");
    return steady;
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& tr) {
    auto out = open_out(path);
    const int m = static_cast<int>(tr.x.at(0).size());
    const int pq = static_cast<int>(tr.y.at(0).size());
    const int q = static_cast<int>(tr.y2.at(0).size());
    const int l = static_cast<int>(tr.u1.at(0).size());
    const int r = static_cast<int>(tr.u2.at(0).size());
    out << "k";
    vec_headers(out, "x", m);
    vec_headers(out, "y", pq);
    vec_headers(out, "y2", q);
    vec_headers(out, "u1", l);
    vec_headers(out, "u2", r);
    vec_headers(out, "xhat1", m);
    vec_headers(out, "xhat2", m);
    out << ",stage_cost\n";
    for (int k = 0; k <= tr.N; ++k) {
        out << k;
        vec_values(out, tr.x[k]);
        vec_values(out, tr.y[k]);
        vec_values(out, tr.y2[k]);
        vec_values(out, tr.u1[k]);
        vec_values(out, tr.u2[k]);
        vec_values(out, tr.xhat1[k]);
        vec_values(out, tr.xhat2[k]);
        out << "," << format_double(tr.stage_cost[k]) << "\n";
    }
}

void write_summary_csv(const std::filesystem::path& path, const SimSummary& s) {
    auto out = open_out(path);
    out << "# cost_mean=" << format_double(s.cost_mean) << " cost_se=" << format_double(s.cost_se)
        << " rho=" << format_double(s.rho) << " bounded=" << (s.bounded ? 1 : 0)
        << " replications=" << s.replications << "\n";
    const int m = static_cast<int>(s.Exx.at(0).rows());
    out << "k";
    entry_headers(out, "Exx", m, m);
    entry_headers(out, "Sig1_emp", m, m);
    entry_headers(out, "Sig2_emp", m, m);
    out << "\n";
    const size_t n = s.Exx.size();
    for (size_t k = 0; k < n; ++k) {
        out << k;
        entry_values(out, s.Exx[k]);
        if (k < s.Sig1_emp.size()) {
            entry_values(out, s.Sig1_emp[k]);
            entry_values(out, s.Sig2_emp[k]);
        } else {
            const Mat nan = Mat::Constant(m, m, std::nan(""));
            entry_values(out, nan);
            entry_values(out, nan);
        }
        out << "\n";
    }
}

}  // namespace declqg
