#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "rnsift/version.hpp"

namespace rnsift::cli {

/// FNV-1a 64-bit digest of a file, hex-encoded. Stable across runs, used to
/// pin input identity in the run manifest.
inline std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read for digest: " + path);
    std::uint64_t h = 1469598103934665603ull;
    char buf[4096];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ull;
        }
        if (!in) break;
    }
    char out[17];
    std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
    return out;
}

/// Every command writes one of these beside its outputs: the fully resolved
/// configuration (no implicit defaults), input digests and output paths.
/// Identical manifests imply byte-identical CSV outputs.
class RunManifest {
public:
    explicit RunManifest(std::string command) {
        j_["command"] = std::move(command);
        j_["tool"] = kToolName;
        j_["version"] = kToolVersion;
        j_["config"] = nlohmann::json::object();
        j_["inputs"] = nlohmann::json::object();
        j_["outputs"] = nlohmann::json::array();
    }

    template <typename T>
    void config(const std::string& key, const T& value) {
        j_["config"][key] = value;
    }
    void input(const std::string& path) { j_["inputs"][path] = file_digest(path); }
    void output(const std::string& path) { j_["outputs"].push_back(path); }

    void write(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write manifest: " + path);
        out << j_.dump(2) << "\n";
    }

private:
    nlohmann::json j_;
};

} // namespace rnsift::cli
