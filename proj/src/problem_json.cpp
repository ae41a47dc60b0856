#include "declqg/problem_json.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "declqg/model.hpp"

namespace declqg {

using nlohmann::json;

namespace {

Mat parse_matrix(const json& j, const std::string& name) {
    if (!j.is_array() || j.empty() || !j[0].is_array()) {
        throw ConfigError(name + ": expected an array of row arrays (write scalars as [[x]])");
    }
    const size_t rows = j.size();
    const size_t cols = j[0].size();
    Mat X(rows, cols);
    for (size_t i = 0; i < rows; ++i) {
        if (!j[i].is_array() || j[i].size() != cols) {
            throw ConfigError(name + ": row " + std::to_string(i) + " has inconsistent length");
        }
        for (size_t c = 0; c < cols; ++c) {
            if (!j[i][c].is_number()) {
                throw ConfigError(name + ": entry (" + std::to_string(i) + "," +
                                  std::to_string(c) + ") is not a number");
            }
            X(i, c) = j[i][c].get<double>();
        }
    }
    return X;
}

Vec parse_vector(const json& j, const std::string& name) {
    if (!j.is_array()) throw ConfigError(name + ": expected a flat array of numbers");
    Vec v(j.size());
    for (size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) {
            throw ConfigError(name + ": entry " + std::to_string(i) + " is not a number");
        }
        v(i) = j[i].get<double>();
    }
    return v;
}

int parse_dim(const json& j, const std::string& name) {
    if (!j.is_number_integer() || j.get<long long>() < 1) {
        throw ConfigError("dims." + name + ": expected a positive integer");
    }
    return static_cast<int>(j.get<long long>());
}

const std::set<std::string> kMatrixKeys = {
    "A", "B1", "B2", "H1", "H2", "Qw", "Qv1", "Qv2", "Q", "R1", "R2", "Theta", "Sigma0"};

}  // namespace

ProblemDef parse_problem(const std::string& json_text, std::vector<std::string>* warnings) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("JSON parse error: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("top level must be a JSON object");

    std::set<std::string> allowed = kMatrixKeys;
    allowed.insert("dims");
    allowed.insert("mu");
    for (const auto& [key, _] : j.items()) {
        if (!allowed.count(key)) throw ConfigError("unknown key \"" + key + "\"");
    }
    for (const auto& key : allowed) {
        if (!j.contains(key)) throw ConfigError("missing key \"" + key + "\"");
    }

    const json& jd = j.at("dims");
    if (!jd.is_object()) throw ConfigError("dims must be an object");
    for (const auto& [key, _] : jd.items()) {
        if (key != "m" && key != "l" && key != "r" && key != "p" && key != "q") {
            throw ConfigError("dims: unknown key \"" + key + "\"");
        }
    }
    ProblemDef def;
    def.dims.m = parse_dim(jd.at("m"), "m");
    def.dims.l = parse_dim(jd.at("l"), "l");
    def.dims.r = parse_dim(jd.at("r"), "r");
    def.dims.p = parse_dim(jd.at("p"), "p");
    def.dims.q = parse_dim(jd.at("q"), "q");

    def.A = parse_matrix(j.at("A"), "A");
    def.B1 = parse_matrix(j.at("B1"), "B1");
    def.B2 = parse_matrix(j.at("B2"), "B2");
    def.H1 = parse_matrix(j.at("H1"), "H1");
    def.H2 = parse_matrix(j.at("H2"), "H2");
    def.Qw = parse_matrix(j.at("Qw"), "Qw");
    def.Qv1 = parse_matrix(j.at("Qv1"), "Qv1");
    def.Qv2 = parse_matrix(j.at("Qv2"), "Qv2");
    def.Q = parse_matrix(j.at("Q"), "Q");
    def.R1 = parse_matrix(j.at("R1"), "R1");
    def.R2 = parse_matrix(j.at("R2"), "R2");
    def.Theta = parse_matrix(j.at("Theta"), "Theta");
    def.Sigma0 = parse_matrix(j.at("Sigma0"), "Sigma0");
    def.mu = parse_vector(j.at("mu"), "mu");

    const auto violations = validate(def);
    if (!violations.empty()) {
        std::ostringstream oss;
        oss << "invalid problem:";
        for (const auto& v : violations) oss << "\n  - " << v;
        throw ConfigError(oss.str());
    }
    return symmetrized(def, warnings);
}

ProblemDef load_problem(const std::filesystem::path& path, std::vector<std::string>* warnings) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_problem(buf.str(), warnings);
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::string problem_to_json(const ProblemDef& def) {
    auto mat = [](const Mat& X) {
        json rows = json::array();
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
            json row = json::array();
            for (Eigen::Index c = 0; c < X.cols(); ++c) row.push_back(X(i, c));
            rows.push_back(row);
        }
        return rows;
    };
    json j;
    j["dims"] = {{"m", def.dims.m}, {"l", def.dims.l}, {"r", def.dims.r},
                 {"p", def.dims.p}, {"q", def.dims.q}};
    j["A"] = mat(def.A);
    j["B1"] = mat(def.B1);
    j["B2"] = mat(def.B2);
    j["H1"] = mat(def.H1);
    j["H2"] = mat(def.H2);
    j["Qw"] = mat(def.Qw);
    j["Qv1"] = mat(def.Qv1);
    j["Qv2"] = mat(def.Qv2);
    j["Q"] = mat(def.Q);
    j["R1"] = mat(def.R1);
    j["R2"] = mat(def.R2);
    j["Theta"] = mat(def.Theta);
    j["Sigma0"] = mat(def.Sigma0);
    json mu = json::array();
    for (Eigen::Index i = 0; i < def.mu.size(); ++i) mu.push_back(def.mu(i));
    j["mu"] = mu;
    return j.dump(2);
}

void dump_problem(const ProblemDef& def, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << problem_to_json(def) << "\n";
}

}  // namespace declqg
