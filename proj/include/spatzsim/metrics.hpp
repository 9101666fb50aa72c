#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "spatzsim/config.hpp"

namespace spatzsim {

// Per-core event counts.
struct CoreCounters {
    uint64_t ifetch_scalar = 0;
    uint64_t ifetch_vector = 0;  // vector instructions issued (incl. vsetvli)
    uint64_t scalar_alu_op = 0;
    uint64_t scalar_mem_access = 0;
    uint64_t bank_conflict_stall = 0;
    uint64_t barrier_stall_cycle = 0;
    uint64_t offload_stall_cycle = 0;
    uint64_t barrier_count = 0;
    uint64_t modeswitch_count = 0;
    uint64_t active_cycle = 0;
    uint64_t idle_cycle = 0;

    bool operator==(const CoreCounters&) const = default;
};

// Per-vector-unit event counts.
struct UnitCounters {
    uint64_t vector_lane_op = 0;  // one per element-operation
    uint64_t vrf_access = 0;
    uint64_t tcdm_access = 0;
    uint64_t bank_conflict_stall = 0;
    uint64_t active_cycle = 0;
    uint64_t idle_cycle = 0;

    bool operator==(const UnitCounters&) const = default;
};

struct PerfCounters {
    std::array<CoreCounters, 2> core{};
    std::array<UnitCounters, 2> unit{};
    // scalar-side tcdm accesses, summed over cores, included in tcdm totals
    uint64_t scalar_tcdm_access = 0;

    uint64_t total(uint64_t CoreCounters::* m) const {
        return core[0].*m + core[1].*m;
    }
    uint64_t total(uint64_t UnitCounters::* m) const {
        return unit[0].*m + unit[1].*m;
    }
    // flat event name -> total count, the domain of the energy model
    std::map<std::string, uint64_t> events() const;

    bool operator==(const PerfCounters&) const = default;
};

// Abstract energy units per event. Absolute values are declared model inputs;
// only ratios between runs are meaningful.
struct EnergyModel {
    std::map<std::string, double> weights;

    static EnergyModel defaults();
    void validate() const;
    bool operator==(const EnergyModel&) const = default;
};

struct EnergyBreakdown {
    double total = 0.0;
    std::map<std::string, double> by_event;
    bool operator==(const EnergyBreakdown&) const = default;
};

// energy == sum over events of count * weight, exactly
EnergyBreakdown energy(const PerfCounters& counters, const EnergyModel& model);

struct RunStats {
    uint32_t schema_version = 1;
    std::string workload;  // kernel or experiment name
    std::string mode;      // "split" | "merge0" | "merge1"
    std::string dtype;
    std::string problem;   // e.g. "n=4096"
    uint64_t seed = 0;
    uint64_t cycles = 0;
    bool timeout = false;
    uint64_t result_checksum = 0;  // FNV-1a 64 over the output region
    PerfCounters counters;
    ClusterConfig config;
    EnergyBreakdown energy;

    bool operator==(const RunStats&) const = default;
};

struct ComparisonReport {
    std::string workload;
    std::string problem;
    double speedup = 0.0;       // cycles_split / cycles_merge
    double energy_ratio = 0.0;  // energy_split / energy_merge
    double fetch_ratio = 0.0;   // vector ifetch split / merge
    std::map<std::string, int64_t> event_deltas;  // merge - split per event
    RunStats split;
    RunStats merge;
};

// Refuses (throws std::runtime_error) on mismatched workloads, timeouts, or
// diverging result checksums.
ComparisonReport compare_modes(const RunStats& split, const RunStats& merge);

enum class ReportFormat { Json, Csv };

std::string emit_report(const RunStats& stats, ReportFormat format);
std::string emit_report(const std::vector<RunStats>& runs,
                        const std::vector<ComparisonReport>& comparisons,
                        ReportFormat format);
RunStats parse_run_stats(const std::string& json_text);

uint64_t fnv1a64(const uint8_t* data, size_t len);

}  // namespace spatzsim
