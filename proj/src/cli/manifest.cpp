#include "goldlab/manifest.hpp"

#include <cstdio>
#include <fstream>

#include "json.hpp"

#include "goldlab/errors.hpp"

namespace goldlab::cli {

void RunManifest::add_artifact(const std::string& relative_path) {
    artifacts.push_back(relative_path);
}

void RunManifest::add_duration(const std::string& phase, double ms) {
    durations_ms.emplace_back(phase, ms);
}

std::string hash_hex(std::uint64_t hash) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

void write_manifest(const std::string& out_dir, const RunManifest& manifest) {
    nlohmann::ordered_json j;
    j["command"] = manifest.command;
    j["config_hash"] = hash_hex(manifest.config_hash);
    j["code_version"] = manifest.code_version;
    j["seeds"] = manifest.seeds;
    j["artifacts"] = manifest.artifacts;
    nlohmann::ordered_json durations = nlohmann::ordered_json::object();
    for (const auto& [phase, ms] : manifest.durations_ms) durations[phase] = ms;
    j["durations_ms"] = durations;
    const std::string path = out_dir + "/manifest.json";
    std::ofstream out(path);
    if (!out) throw StateError("cannot write manifest: " + path);
    out << j.dump(2) << "\n";
}

RunManifest read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw StateError("cannot open manifest: " + path);
    nlohmann::json j;
    in >> j;
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.config_hash = std::stoull(j.at("config_hash").get<std::string>(), nullptr, 16);
    m.code_version = j.at("code_version").get<std::string>();
    m.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    m.artifacts = j.at("artifacts").get<std::vector<std::string>>();
    for (const auto& [phase, ms] : j.at("durations_ms").items())
        m.durations_ms.emplace_back(phase, ms.get<double>());
    return m;
}

}  // namespace goldlab::cli
