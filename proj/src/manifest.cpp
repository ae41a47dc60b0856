#include "declqg/manifest.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace declqg {

std::string fnv1a64_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    uint64_t h = 0xCBF29CE484222325ull;
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof(buf));
        const std::streamsize n = in.gcount();
        for (std::streamsize i = 0; i < n; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x00000100000001B3ull;
        }
    }
    std::ostringstream oss;
    oss << std::hex << std::setw(16) << std::setfill('0') << h;
    return oss.str();
}

void RunManifest::add_output(const std::filesystem::path& path) {
    outputs.emplace_back(path.string(), fnv1a64_file(path));
}

std::string RunManifest::to_json() const {
    nlohmann::json j;
    j["command"] = command;
    j["config"] = config;
    j["tolerances"] = tolerances;
    j["settings"] = settings;
    j["status"] = status;
    nlohmann::json outs = nlohmann::json::array();
    for (const auto& [path, sum] : outputs) {
        outs.push_back({{"path", path}, {"fnv1a64", sum}});
    }
    j["outputs"] = outs;
    return j.dump(2);
}

void RunManifest::write(const std::filesystem::path& out_dir) const {
    const auto path = out_dir / "manifest.json";
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << to_json() << "\n";
}

}  // namespace declqg
