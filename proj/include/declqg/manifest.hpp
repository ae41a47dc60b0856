#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace declqg {

// FNV-1a (64-bit) over the file bytes, hex-encoded. Deterministic content
// checksum for regression via manifests.
std::string fnv1a64_file(const std::filesystem::path& path);

struct RunManifest {
    std::string command;
    std::string config;  // path, or "<embedded:sec4>"
    std::map<std::string, double> tolerances;
    std::map<std::string, std::string> settings;  // seeds, modes, flags
    std::string status;
    std::vector<std::pair<std::string, std::string>> outputs;  // path, checksum

    // Registers an already-written file with its checksum.
    void add_output(const std::filesystem::path& path);
    std::string to_json() const;
    // Writes <out_dir>/manifest.json and registers nothing further.
    void write(const std::filesystem::path& out_dir) const;
};

}  // namespace declqg
