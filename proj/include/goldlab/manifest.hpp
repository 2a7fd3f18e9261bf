#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace goldlab::cli {

inline constexpr const char* kCodeVersion = "goldlab 0.1.0";

// Ledger of everything one command produced; serialized as manifest.json in
// the output directory so a run can be replayed or audited.
struct RunManifest {
    std::string command;
    std::uint64_t config_hash = 0;
    std::string code_version = kCodeVersion;
    std::vector<std::uint64_t> seeds;
    std::vector<std::string> artifacts;  // paths relative to the output dir
    std::vector<std::pair<std::string, double>> durations_ms;

    void add_artifact(const std::string& relative_path);
    void add_duration(const std::string& phase, double ms);
};

void write_manifest(const std::string& out_dir, const RunManifest& manifest);
RunManifest read_manifest(const std::string& path);

std::string hash_hex(std::uint64_t hash);

}  // namespace goldlab::cli
