#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "spatzsim/metrics.hpp"
#include "spatzsim/runner.hpp"
#include "spatzsim/workloads.hpp"

namespace spatzsim {

// Exit codes shared by every subcommand.
inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 1;     // bad config / bad arguments
inline constexpr int exit_asm = 2;       // assembly error
inline constexpr int exit_fault = 3;     // simulation fault or timeout
inline constexpr int exit_mismatch = 4;  // oracle / checksum mismatch

enum class ExperimentKind { Kernel, Asm, Mixed };

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::Kernel;
    KernelSpec kernel;
    std::string asm_path;
    ScalarWorkloadSpec scalar;                // mixed only
    std::vector<CheckRegion> expect;          // asm runs: expected memory words
    std::vector<KernelName> sweep_kernels;    // sweep only; defaults to all six
    std::vector<std::string> sweep_modes;     // "split" | "merge"
    uint64_t seed = 1;
    uint64_t max_cycles = 10'000'000;
};

struct OutputConfig {
    ReportFormat format = ReportFormat::Json;
    std::string path;  // empty = stdout
    bool trace = false;
};

struct CliConfig {
    ClusterConfig cluster;
    EnergyModel energy = EnergyModel::defaults();
    ExperimentConfig experiment;
    OutputConfig output;
};

// Command-line flags that override the config file.
struct CliOverrides {
    std::optional<std::string> mode;  // "split" | "merge"
    std::optional<std::string> format;
    std::optional<uint64_t> seed;
    std::optional<uint64_t> max_cycles;
    std::optional<std::string> out;
    bool trace = false;
};

// Parses the JSON config text. Unknown keys anywhere are errors
// (std::invalid_argument), as are out-of-schema values.
CliConfig parse_config(const std::string& json_text);
CliConfig load_config_file(const std::string& path);
void apply_overrides(CliConfig& cfg, const CliOverrides& ov);

// Subcommand bodies. Reports go to output.path (or `out` when no path is
// set); human-readable status and errors go to `err`. Each returns one of
// the exit codes above.
int cmd_run(const CliConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_sweep(const CliConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_mixed(const CliConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_asm_check(const std::string& path, std::ostream& err);

}  // namespace spatzsim
