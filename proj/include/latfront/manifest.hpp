#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace latfront {

std::uint64_t fnv1a64_file(const std::filesystem::path& file);

/// Run manifest: written with status "running" before any artifact, rewritten
/// finalized with the output inventory and wall-clock timing afterwards. Data
/// artifacts are byte-reproducible across reruns; the manifest itself carries
/// the (nondeterministic) timings.
class RunManifest {
public:
    RunManifest(std::filesystem::path outdir, std::string command, nlohmann::json resolved_config);

    void set_resolved(const nlohmann::json& resolved);
    void add_seed(std::uint64_t seed);

    /// Registers an artifact path (relative to the run directory).
    void add_output(const std::filesystem::path& file);

    void write_initial() const;
    void finalize();

    const std::filesystem::path& dir() const { return outdir_; }

private:
    std::filesystem::path outdir_;
    std::string command_;
    nlohmann::json config_;
    nlohmann::json resolved_;
    std::vector<std::uint64_t> seeds_;
    std::vector<std::filesystem::path> outputs_;
    std::chrono::steady_clock::time_point start_;
    std::string created_;

    void write(const std::string& status, bool with_outputs) const;
};

/// Writes schema.json describing every CSV emitted by the run.
void write_csv_schema(const std::filesystem::path& outdir,
                      const std::vector<std::pair<std::string, std::vector<std::string>>>& files);

}  // namespace latfront
