#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "declqg/types.hpp"

namespace declqg {

// Raised on malformed problem files: JSON syntax errors, unknown keys,
// shape/type mismatches, or failed validation. The message carries one line
// per problem.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parses a problem file. Top-level keys: "dims" {"m","l","r","p","q"} and the
// fourteen matrices, each an array of row arrays ("mu" is a flat array;
// scalars must still be written as 1x1 row arrays). Unknown keys are
// rejected. The returned def has passed validate() and had its weight and
// covariance matrices symmetrized; warnings (if any) describe members that
// needed symmetrizing.
ProblemDef load_problem(const std::filesystem::path& path,
                        std::vector<std::string>* warnings = nullptr);

ProblemDef parse_problem(const std::string& json_text,
                         std::vector<std::string>* warnings = nullptr);

// Serializes with exact double round-trip.
std::string problem_to_json(const ProblemDef& def);

void dump_problem(const ProblemDef& def, const std::filesystem::path& path);

}  // namespace declqg
