#pragma once

// Subcommand execution and result persistence.

#include "sonoheat/config.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sonoheat {

inline constexpr const char* kToolVersion = "0.1.0";

enum class ExitCode : int { ok = 0, validation = 1, runtime = 2, io = 3 };

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunStatus {
    std::string name;
    std::string status;  // "ok" or "failed"
    std::string message;
};

struct RunManifest {
    std::string config_hash;
    std::string tool_version = kToolVersion;
    std::string subcommand;
    std::string started_utc;
    std::string finished_utc;
    std::vector<RunStatus> runs;
    std::vector<std::string> outputs;  // file names relative to the output directory
    nlohmann::json results = nlohmann::json::object();
    nlohmann::json config;

    [[nodiscard]] bool ok() const;
    [[nodiscard]] nlohmann::json to_json() const;
};

struct RunOptions {
    std::filesystem::path out_dir = ".";
    int workers = 1;
    std::optional<std::uint64_t> seed;  // reserved
    bool quiet = false;                 // suppress stdout tables
};

/// Writes to a sibling temp file, then renames over `path`. Throws IoError.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// Runs one of toy, estimate, regime, evolve, sideband. The manifest is
/// written last, as manifest_<hash>.json.
RunManifest run(const ScenarioConfig& cfg, const std::string& subcommand, const RunOptions& opts);

/// One evolve per grid point along `axis` ("params.X" or "schedule[k].from.X" /
/// "schedule[k].to.X"). A detuning axis runs a sideband scan instead.
RunManifest sweep(const ScenarioConfig& cfg, const std::string& axis, const std::vector<double>& grid,
                  const RunOptions& opts);

/// Returns a copy of cfg with the field named by `axis` set to `value`.
[[nodiscard]] ScenarioConfig with_axis_value(const ScenarioConfig& cfg, const std::string& axis, double value);

/// Output file name for a given stem: "<stem>_<hash>.<ext>".
[[nodiscard]] std::string output_name(const std::string& stem, const std::string& hash, const std::string& ext);

/// Parameters quoted for the sonoluminescence case: nu = 1e7, Omega = 1e6,
/// Lambda = 1e12, omega0 = 1e15 (rad/s).
[[nodiscard]] PhysParams sonoluminescence_preset();

}  // namespace sonoheat
