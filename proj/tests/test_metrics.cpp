#include <random>

#include "doctest.h"
#include "spatzsim/metrics.hpp"
#include "spatzsim/runner.hpp"

using namespace spatzsim;

namespace {

PerfCounters random_counters(std::mt19937_64& rng) {
    PerfCounters c;
    auto r = [&] { return rng() % 100000; };
    for (int i = 0; i < 2; ++i) {
        c.core[i].ifetch_scalar = r();
        c.core[i].ifetch_vector = r();
        c.core[i].scalar_alu_op = r();
        c.core[i].scalar_mem_access = r();
        c.core[i].bank_conflict_stall = r();
        c.core[i].barrier_stall_cycle = r();
        c.core[i].offload_stall_cycle = r();
        c.core[i].barrier_count = r();
        c.core[i].modeswitch_count = r();
        c.core[i].active_cycle = r();
        c.core[i].idle_cycle = r();
        c.unit[i].vector_lane_op = r();
        c.unit[i].vrf_access = r();
        c.unit[i].tcdm_access = r();
        c.unit[i].bank_conflict_stall = r();
        c.unit[i].active_cycle = r();
        c.unit[i].idle_cycle = r();
    }
    c.scalar_tcdm_access = r();
    return c;
}

RunStats random_stats(std::mt19937_64& rng) {
    RunStats s;
    s.workload = "w" + std::to_string(rng() % 100);
    s.mode = rng() & 1 ? "split" : "merge0";
    s.dtype = "int32";
    s.problem = "n=" + std::to_string(rng() % 10000);
    s.seed = rng();
    s.cycles = rng() % 1000000;
    s.timeout = false;
    s.result_checksum = rng();
    s.counters = random_counters(rng);
    s.energy = energy(s.counters, EnergyModel::defaults());
    return s;
}

}  // namespace

TEST_CASE("energy is a weighted sum of events") {
    EnergyModel m = EnergyModel::defaults();
    PerfCounters c;
    CHECK(energy(c, m).total == 0.0);

    c.core[0].ifetch_scalar = 10;
    CHECK(energy(c, m).total == 50.0);  // weight 5

    c = {};
    c.core[0].ifetch_scalar = 4;
    c.unit[0].vector_lane_op = 32;
    EnergyBreakdown e = energy(c, m);
    CHECK(e.total == 52.0);  // 4*5 + 32*1
    CHECK(e.by_event.at("ifetch_scalar") == 20.0);
    CHECK(e.by_event.at("vector_lane_op") == 32.0);
}

TEST_CASE("default weights match the declared model") {
    EnergyModel m = EnergyModel::defaults();
    CHECK(m.weights.at("ifetch_scalar") == 5.0);
    CHECK(m.weights.at("ifetch_vector") == 5.0);
    CHECK(m.weights.at("scalar_alu_op") == 1.0);
    CHECK(m.weights.at("scalar_mem_access") == 2.0);
    CHECK(m.weights.at("vector_lane_op") == 1.0);
    CHECK(m.weights.at("vrf_access") == 1.0);
    CHECK(m.weights.at("tcdm_access") == 2.0);
}

TEST_CASE("energy linearity: scaling counts scales energy") {
    std::mt19937_64 rng(3);
    EnergyModel m = EnergyModel::defaults();
    for (int i = 0; i < 20; ++i) {
        PerfCounters c = random_counters(rng);
        double e1 = energy(c, m).total;
        PerfCounters c3 = c;
        for (int k = 0; k < 2; ++k) {
            c3.core[k].ifetch_scalar *= 3;
            c3.core[k].ifetch_vector *= 3;
            c3.core[k].scalar_alu_op *= 3;
            c3.core[k].scalar_mem_access *= 3;
            c3.core[k].bank_conflict_stall *= 3;
            c3.core[k].barrier_stall_cycle *= 3;
            c3.core[k].offload_stall_cycle *= 3;
            c3.core[k].barrier_count *= 3;
            c3.core[k].modeswitch_count *= 3;
            c3.core[k].active_cycle *= 3;
            c3.core[k].idle_cycle *= 3;
            c3.unit[k].vector_lane_op *= 3;
            c3.unit[k].vrf_access *= 3;
            c3.unit[k].tcdm_access *= 3;
            c3.unit[k].bank_conflict_stall *= 3;
            c3.unit[k].active_cycle *= 3;
            c3.unit[k].idle_cycle *= 3;
        }
        c3.scalar_tcdm_access *= 3;
        CHECK(energy(c3, m).total == 3.0 * e1);
    }
}

TEST_CASE("negative or non-finite weights are rejected") {
    EnergyModel m = EnergyModel::defaults();
    m.weights["ifetch_scalar"] = -1.0;
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);
}

TEST_CASE("compare_modes ratio examples") {
    std::mt19937_64 rng(5);
    RunStats split = random_stats(rng);
    split.mode = "split";
    split.cycles = 2000;
    RunStats merge = split;
    merge.mode = "merge0";
    merge.cycles = 1000;
    ComparisonReport r = compare_modes(split, merge);
    CHECK(r.speedup == 2.0);
    CHECK(r.fetch_ratio ==
          static_cast<double>(split.counters.total(&CoreCounters::ifetch_vector)) /
              static_cast<double>(merge.counters.total(&CoreCounters::ifetch_vector)));

    ComparisonReport id = compare_modes(split, split);
    CHECK(id.speedup == 1.0);
    for (const auto& [ev, delta] : id.event_deltas) CHECK(delta == 0);
}

TEST_CASE("compare_modes refuses functional divergence") {
    std::mt19937_64 rng(6);
    RunStats split = random_stats(rng);
    RunStats merge = split;
    merge.result_checksum ^= 1;
    CHECK_THROWS_WITH_AS(compare_modes(split, merge), doctest::Contains("divergence"),
                         std::runtime_error);

    RunStats other = split;
    other.workload = split.workload + "x";
    CHECK_THROWS_AS(compare_modes(split, other), std::runtime_error);

    RunStats late = split;
    late.timeout = true;
    CHECK_THROWS_AS(compare_modes(split, late), std::runtime_error);
}

TEST_CASE("speedup symmetry") {
    std::mt19937_64 rng(8);
    for (int i = 0; i < 10; ++i) {
        RunStats a = random_stats(rng);
        RunStats b = a;
        b.cycles = 1 + rng() % 1000000;
        double p = compare_modes(a, b).speedup * compare_modes(b, a).speedup;
        CHECK(p == doctest::Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("JSON report round-trips losslessly") {
    std::mt19937_64 rng(9);
    for (int i = 0; i < 25; ++i) {
        RunStats s = random_stats(rng);
        RunStats back = parse_run_stats(emit_report(s, ReportFormat::Json));
        CHECK(back == s);
    }
}

TEST_CASE("JSON report exposes the documented schema fields") {
    std::mt19937_64 rng(10);
    std::string text = emit_report(random_stats(rng), ReportFormat::Json);
    for (const char* key : {"cycles", "energy", "counters", "checksum", "schema_version",
                            "config", "workload", "mode", "seed", "timeout"})
        CHECK(text.find(std::string("\"") + key + "\"") != std::string::npos);
}

TEST_CASE("CSV sweep report has one header and one row per run") {
    std::mt19937_64 rng(12);
    std::vector<RunStats> runs;
    for (int i = 0; i < 6; ++i) runs.push_back(random_stats(rng));
    std::string csv = emit_report(runs, {}, ReportFormat::Csv);
    size_t lines = 0;
    for (char ch : csv) lines += ch == '\n';
    CHECK(lines == 7);  // header + 6 rows, no comparison block
}

TEST_CASE("fetch-energy separability at small problem sizes") {
    RunRequest req;
    for (KernelName kn : {KernelName::Axpy, KernelName::Dotp, KernelName::Relu}) {
        KernelSpec sp = KernelSpec::defaults(kn);
        sp.n = 512;
        sp.variant = Variant::SplitSingle;
        RunResult split = run_kernel(sp, req);
        sp.variant = Variant::MergeSingle;
        RunResult merge = run_kernel(sp, req);
        double fi_split = split.stats.energy.by_event.at("ifetch_vector");
        double fi_merge = merge.stats.energy.by_event.at("ifetch_vector");
        CHECK(fi_merge <= fi_split);
    }
}
