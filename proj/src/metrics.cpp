#include "spatzsim/metrics.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

namespace spatzsim {

using json = nlohmann::ordered_json;

std::map<std::string, uint64_t> PerfCounters::events() const {
    std::map<std::string, uint64_t> e;
    e["ifetch_scalar"] = total(&CoreCounters::ifetch_scalar);
    e["ifetch_vector"] = total(&CoreCounters::ifetch_vector);
    e["scalar_alu_op"] = total(&CoreCounters::scalar_alu_op);
    e["scalar_mem_access"] = total(&CoreCounters::scalar_mem_access);
    e["vector_lane_op"] = total(&UnitCounters::vector_lane_op);
    e["vrf_access"] = total(&UnitCounters::vrf_access);
    e["tcdm_access"] = total(&UnitCounters::tcdm_access) + scalar_tcdm_access;
    e["bank_conflict_stall"] = total(&CoreCounters::bank_conflict_stall) +
                               total(&UnitCounters::bank_conflict_stall);
    e["barrier_stall_cycle"] = total(&CoreCounters::barrier_stall_cycle);
    e["offload_stall_cycle"] = total(&CoreCounters::offload_stall_cycle);
    e["modeswitch_count"] = total(&CoreCounters::modeswitch_count);
    e["active_cycle"] = total(&CoreCounters::active_cycle);
    e["idle_cycle"] = total(&CoreCounters::idle_cycle);
    return e;
}

EnergyModel EnergyModel::defaults() {
    EnergyModel m;
    m.weights = {
        {"ifetch_scalar", 5.0},    {"ifetch_vector", 5.0},
        {"scalar_alu_op", 1.0},    {"scalar_mem_access", 2.0},
        {"vector_lane_op", 1.0},   {"vrf_access", 1.0},
        {"tcdm_access", 2.0},      {"bank_conflict_stall", 0.0},
        {"barrier_stall_cycle", 0.0}, {"offload_stall_cycle", 0.0},
        {"modeswitch_count", 0.0}, {"active_cycle", 0.0},
        {"idle_cycle", 0.0},
    };
    return m;
}

void EnergyModel::validate() const {
    for (const auto& [name, w] : weights)
        if (!(w >= 0.0) || !std::isfinite(w))
            throw std::invalid_argument("energy weight for '" + name +
                                        "' must be a non-negative finite number");
}

EnergyBreakdown energy(const PerfCounters& counters, const EnergyModel& model) {
    EnergyBreakdown b;
    for (const auto& [name, count] : counters.events()) {
        auto it = model.weights.find(name);
        double w = it == model.weights.end() ? 0.0 : it->second;
        double e = static_cast<double>(count) * w;
        b.by_event[name] = e;
        b.total += e;
    }
    return b;
}

ComparisonReport compare_modes(const RunStats& split, const RunStats& merge) {
    if (split.workload != merge.workload || split.problem != merge.problem ||
        split.dtype != merge.dtype)
        throw std::runtime_error("compare_modes: runs are not the same workload");
    if (split.timeout || merge.timeout)
        throw std::runtime_error("compare_modes: cannot compare a timed-out run");
    if (split.result_checksum != merge.result_checksum)
        throw std::runtime_error(
            "functional divergence: result checksums differ between modes");
    ComparisonReport r;
    r.workload = split.workload;
    r.problem = split.problem;
    r.speedup = static_cast<double>(split.cycles) / static_cast<double>(merge.cycles);
    r.energy_ratio = split.energy.total / merge.energy.total;
    uint64_t fs = split.counters.total(&CoreCounters::ifetch_vector);
    uint64_t fm = merge.counters.total(&CoreCounters::ifetch_vector);
    r.fetch_ratio = fm == 0 ? 0.0 : static_cast<double>(fs) / static_cast<double>(fm);
    auto es = split.counters.events();
    auto em = merge.counters.events();
    for (const auto& [name, c] : es)
        r.event_deltas[name] =
            static_cast<int64_t>(em[name]) - static_cast<int64_t>(c);
    r.split = split;
    r.merge = merge;
    return r;
}

namespace {

json core_to_json(const CoreCounters& c) {
    return json{{"ifetch_scalar", c.ifetch_scalar},
                {"ifetch_vector", c.ifetch_vector},
                {"scalar_alu_op", c.scalar_alu_op},
                {"scalar_mem_access", c.scalar_mem_access},
                {"bank_conflict_stall", c.bank_conflict_stall},
                {"barrier_stall_cycle", c.barrier_stall_cycle},
                {"offload_stall_cycle", c.offload_stall_cycle},
                {"barrier_count", c.barrier_count},
                {"modeswitch_count", c.modeswitch_count},
                {"active_cycle", c.active_cycle},
                {"idle_cycle", c.idle_cycle}};
}

CoreCounters core_from_json(const json& j) {
    CoreCounters c;
    c.ifetch_scalar = j.at("ifetch_scalar");
    c.ifetch_vector = j.at("ifetch_vector");
    c.scalar_alu_op = j.at("scalar_alu_op");
    c.scalar_mem_access = j.at("scalar_mem_access");
    c.bank_conflict_stall = j.at("bank_conflict_stall");
    c.barrier_stall_cycle = j.at("barrier_stall_cycle");
    c.offload_stall_cycle = j.at("offload_stall_cycle");
    c.barrier_count = j.at("barrier_count");
    c.modeswitch_count = j.at("modeswitch_count");
    c.active_cycle = j.at("active_cycle");
    c.idle_cycle = j.at("idle_cycle");
    return c;
}

json unit_to_json(const UnitCounters& u) {
    return json{{"vector_lane_op", u.vector_lane_op},
                {"vrf_access", u.vrf_access},
                {"tcdm_access", u.tcdm_access},
                {"bank_conflict_stall", u.bank_conflict_stall},
                {"active_cycle", u.active_cycle},
                {"idle_cycle", u.idle_cycle}};
}

UnitCounters unit_from_json(const json& j) {
    UnitCounters u;
    u.vector_lane_op = j.at("vector_lane_op");
    u.vrf_access = j.at("vrf_access");
    u.tcdm_access = j.at("tcdm_access");
    u.bank_conflict_stall = j.at("bank_conflict_stall");
    u.active_cycle = j.at("active_cycle");
    u.idle_cycle = j.at("idle_cycle");
    return u;
}

json config_to_json(const ClusterConfig& c) {
    return json{{"vlen", c.vlen},
                {"nlanes", c.nlanes},
                {"nports", c.nports},
                {"n_banks", c.n_banks},
                {"scratchpad_bytes", c.scratchpad_bytes},
                {"offload_depth", c.offload_depth},
                {"modeswitch_latency", c.modeswitch_latency},
                {"debug_vrf_check", c.debug_vrf_check},
                {"initial_mode", to_string(c.initial_mode)}};
}

ClusterConfig config_from_json(const json& j) {
    ClusterConfig c;
    c.vlen = j.at("vlen");
    c.nlanes = j.at("nlanes");
    c.nports = j.at("nports");
    c.n_banks = j.at("n_banks");
    c.scratchpad_bytes = j.at("scratchpad_bytes");
    c.offload_depth = j.at("offload_depth");
    c.modeswitch_latency = j.at("modeswitch_latency");
    c.debug_vrf_check = j.at("debug_vrf_check");
    std::string m = j.at("initial_mode");
    if (m == "split")
        c.initial_mode = Mode::split();
    else if (m == "merge0")
        c.initial_mode = Mode::merge(0);
    else if (m == "merge1")
        c.initial_mode = Mode::merge(1);
    else
        throw std::runtime_error("bad mode string '" + m + "'");
    return c;
}

std::string checksum_hex(uint64_t v) {
    char buf[19];
    snprintf(buf, sizeof(buf), "0x%016llx", static_cast<unsigned long long>(v));
    return buf;
}

json stats_to_json(const RunStats& s) {
    json j;
    j["schema_version"] = s.schema_version;
    j["workload"] = s.workload;
    j["mode"] = s.mode;
    j["dtype"] = s.dtype;
    j["problem"] = s.problem;
    j["seed"] = s.seed;
    j["cycles"] = s.cycles;
    j["timeout"] = s.timeout;
    j["checksum"] = checksum_hex(s.result_checksum);
    j["config"] = config_to_json(s.config);
    j["counters"] = json{{"core0", core_to_json(s.counters.core[0])},
                         {"core1", core_to_json(s.counters.core[1])},
                         {"unit0", unit_to_json(s.counters.unit[0])},
                         {"unit1", unit_to_json(s.counters.unit[1])},
                         {"scalar_tcdm_access", s.counters.scalar_tcdm_access}};
    j["energy"] = json{{"total", s.energy.total}, {"by_event", s.energy.by_event}};
    return j;
}

json comparison_to_json(const ComparisonReport& r) {
    json j;
    j["workload"] = r.workload;
    j["problem"] = r.problem;
    j["speedup"] = r.speedup;
    j["energy_ratio"] = r.energy_ratio;
    j["fetch_ratio"] = r.fetch_ratio;
    j["event_deltas"] = r.event_deltas;
    return j;
}

// stable CSV column set for a single run
const char* kCsvHeader =
    "workload,mode,dtype,problem,seed,cycles,timeout,checksum,"
    "ifetch_scalar,ifetch_vector,scalar_alu_op,scalar_mem_access,"
    "vector_lane_op,vrf_access,tcdm_access,bank_conflict_stall,"
    "barrier_stall_cycle,offload_stall_cycle,energy_total";

std::string stats_csv_row(const RunStats& s) {
    auto e = s.counters.events();
    std::ostringstream o;
    o << s.workload << ',' << s.mode << ',' << s.dtype << ',' << s.problem << ','
      << s.seed << ',' << s.cycles << ',' << (s.timeout ? 1 : 0) << ','
      << checksum_hex(s.result_checksum) << ',' << e["ifetch_scalar"] << ','
      << e["ifetch_vector"] << ',' << e["scalar_alu_op"] << ','
      << e["scalar_mem_access"] << ',' << e["vector_lane_op"] << ','
      << e["vrf_access"] << ',' << e["tcdm_access"] << ','
      << e["bank_conflict_stall"] << ',' << e["barrier_stall_cycle"] << ','
      << e["offload_stall_cycle"] << ',' << s.energy.total;
    return o.str();
}

}  // namespace

std::string emit_report(const RunStats& stats, ReportFormat format) {
    if (format == ReportFormat::Json) return stats_to_json(stats).dump(2) + "\n";
    return std::string(kCsvHeader) + "\n" + stats_csv_row(stats) + "\n";
}

std::string emit_report(const std::vector<RunStats>& runs,
                        const std::vector<ComparisonReport>& comparisons,
                        ReportFormat format) {
    if (format == ReportFormat::Json) {
        json j;
        j["schema_version"] = 1;
        j["runs"] = json::array();
        for (const auto& r : runs) j["runs"].push_back(stats_to_json(r));
        j["comparisons"] = json::array();
        for (const auto& c : comparisons) j["comparisons"].push_back(comparison_to_json(c));
        return j.dump(2) + "\n";
    }
    std::ostringstream o;
    o << kCsvHeader << "\n";
    for (const auto& r : runs) o << stats_csv_row(r) << "\n";
    if (!comparisons.empty()) {
        o << "\nworkload,problem,speedup,energy_ratio,fetch_ratio\n";
        for (const auto& c : comparisons)
            o << c.workload << ',' << c.problem << ',' << c.speedup << ','
              << c.energy_ratio << ',' << c.fetch_ratio << "\n";
    }
    return o.str();
}

RunStats parse_run_stats(const std::string& json_text) {
    json j = json::parse(json_text);
    RunStats s;
    s.schema_version = j.at("schema_version");
    s.workload = j.at("workload");
    s.mode = j.at("mode");
    s.dtype = j.at("dtype");
    s.problem = j.at("problem");
    s.seed = j.at("seed");
    s.cycles = j.at("cycles");
    s.timeout = j.at("timeout");
    s.result_checksum = std::stoull(j.at("checksum").get<std::string>(), nullptr, 16);
    s.config = config_from_json(j.at("config"));
    const auto& jc = j.at("counters");
    s.counters.core[0] = core_from_json(jc.at("core0"));
    s.counters.core[1] = core_from_json(jc.at("core1"));
    s.counters.unit[0] = unit_from_json(jc.at("unit0"));
    s.counters.unit[1] = unit_from_json(jc.at("unit1"));
    s.counters.scalar_tcdm_access = jc.at("scalar_tcdm_access");
    s.energy.total = j.at("energy").at("total");
    for (const auto& [k, v] : j.at("energy").at("by_event").items())
        s.energy.by_event[k] = v;
    return s;
}

uint64_t fnv1a64(const uint8_t* data, size_t len) {
    uint64_t h = 14695981039346656037ull;
    for (size_t i = 0; i < len; ++i) {
        h ^= data[i];
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace spatzsim
