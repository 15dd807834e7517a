#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "latfront/config.hpp"

namespace latfront {

struct RunOptions {
    std::filesystem::path outdir;
    int threads = 1;
    std::optional<std::uint64_t> seed_override;
};

// Exit codes: 0 success, 2 config error, 3 infeasible resources,
// 4 property failure, 5 numerical instability.
int cmd_speedscan(const Config& cfg, const RunOptions& opt);
int cmd_envelope(const Config& cfg, const RunOptions& opt);
int cmd_front(const Config& cfg, const RunOptions& opt);
int cmd_stability(const Config& cfg, const RunOptions& opt);
int cmd_spreading(const Config& cfg, const RunOptions& opt);
int cmd_simulate(const Config& cfg, const RunOptions& opt);
int cmd_validate(const Config& cfg, const RunOptions& opt);

/// Dispatch by name with exception -> exit-code mapping applied.
int run_command(const std::string& name, const Config& cfg, const RunOptions& opt);

}  // namespace latfront
