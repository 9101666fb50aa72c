#pragma once

#include <iosfwd>
#include <string>

#include "spatzsim/cluster.hpp"
#include "spatzsim/metrics.hpp"
#include "spatzsim/workloads.hpp"

namespace spatzsim {

struct RunRequest {
    ClusterConfig config;
    EnergyModel energy = EnergyModel::defaults();
    uint64_t max_cycles = 10'000'000;
    std::ostream* trace = nullptr;
};

struct RunResult {
    RunStats stats;
    bool oracle_ok = true;
    std::string mismatch;  // first failing element, when oracle_ok is false
};

// Verifies every check region against the simulated memory. Returns an empty
// string on success, else a description of the first mismatch.
std::string check_regions(const Cluster& cl, const std::vector<CheckRegion>& checks);

// FNV-1a 64 over the concatenated check-region bytes, read from simulated
// memory, in region order.
uint64_t checksum_regions(const Cluster& cl, const std::vector<CheckRegion>& checks);

// Runs an already-assembled program; no oracle checking, checksum over the
// given regions (may be empty).
RunStats run_program(const Program& prog, const RunRequest& req, Mode initial_mode,
                     const std::vector<CheckRegion>& checks, const std::string& workload,
                     const std::string& problem, const std::string& dtype, uint64_t seed);

// Generates and runs one kernel, verifying its output against the oracle.
RunResult run_kernel(const KernelSpec& spec, const RunRequest& req);

struct MixedResult {
    RunStats split;
    RunStats merge;
    double speedup = 0.0;           // split cycles / merge cycles
    double util_core1_split = 0.0;  // active fraction of the scalar-task core
    double util_core1_merge = 0.0;
    bool oracle_ok = true;
    std::string mismatch;
};

MixedResult run_mixed(const KernelSpec& kernel, const ScalarWorkloadSpec& scalar,
                      const RunRequest& req);

}  // namespace spatzsim
