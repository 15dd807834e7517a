#include "latfront/manifest.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>

#include "latfront/errors.hpp"
#include "latfront/version.hpp"

namespace latfront {

std::uint64_t fnv1a64_file(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ConfigError("fnv1a64: cannot read " + file.string());
    std::uint64_t h = 0xcbf29ce484222325ull;
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ull;
        }
        if (!in) break;
    }
    return h;
}

namespace {
std::string iso_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}
}  // namespace

RunManifest::RunManifest(std::filesystem::path outdir, std::string command,
                         nlohmann::json resolved_config)
    : outdir_(std::move(outdir)), command_(std::move(command)), config_(std::move(resolved_config)),
      start_(std::chrono::steady_clock::now()), created_(iso_now()) {
    std::filesystem::create_directories(outdir_);
}

void RunManifest::set_resolved(const nlohmann::json& resolved) { resolved_ = resolved; }
void RunManifest::add_seed(std::uint64_t seed) { seeds_.push_back(seed); }
void RunManifest::add_output(const std::filesystem::path& file) { outputs_.push_back(file); }

void RunManifest::write(const std::string& status, bool with_outputs) const {
    nlohmann::json j;
    j["tool"] = "latfront";
    j["tool_version"] = kVersion;
    j["command"] = command_;
    j["status"] = status;
    j["created"] = created_;
    j["config"] = config_;
    if (!resolved_.is_null()) j["resolved"] = resolved_;
    j["seeds"] = seeds_;
    if (with_outputs) {
        const auto elapsed = std::chrono::duration<double>(
                                 std::chrono::steady_clock::now() - start_).count();
        j["elapsed_seconds"] = elapsed;
        auto arr = nlohmann::json::array();
        auto sorted = outputs_;
        std::sort(sorted.begin(), sorted.end());
        for (const auto& f : sorted) {
            const auto full = outdir_ / f;
            char hex[20];
            std::snprintf(hex, sizeof(hex), "0x%016llx",
                          static_cast<unsigned long long>(fnv1a64_file(full)));
            arr.push_back({{"file", f.generic_string()},
                           {"bytes", std::filesystem::file_size(full)},
                           {"fnv64", hex}});
        }
        j["outputs"] = arr;
    }
    std::ofstream out(outdir_ / "manifest.json");
    out << j.dump(2) << "\n";
}

void RunManifest::write_initial() const { write("running", false); }
void RunManifest::finalize() { write("complete", true); }

void write_csv_schema(const std::filesystem::path& outdir,
                      const std::vector<std::pair<std::string, std::vector<std::string>>>& files) {
    nlohmann::json j;
    j["format"] = "csv, full double precision (17 significant digits)";
    auto arr = nlohmann::json::array();
    for (const auto& [name, cols] : files) arr.push_back({{"file", name}, {"columns", cols}});
    j["files"] = arr;
    std::ofstream out(outdir / "schema.json");
    out << j.dump(2) << "\n";
}

}  // namespace latfront
