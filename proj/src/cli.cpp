#include "spatzsim/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"

namespace spatzsim {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& msg) { throw std::invalid_argument(msg); }

// unknown keys are errors, not warnings
void check_keys(const json& j, const std::string& where,
                std::initializer_list<const char*> allowed) {
    if (!j.is_object()) bad("config section '" + where + "' must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) known = true;
        if (!known) bad("unknown config key '" + where + "." + it.key() + "'");
    }
}

uint64_t get_u64(const json& j, const std::string& where) {
    if (!j.is_number_unsigned()) bad("config key '" + where + "' must be a non-negative integer");
    return j.get<uint64_t>();
}

uint32_t get_u32(const json& j, const std::string& where) {
    uint64_t v = get_u64(j, where);
    if (v > UINT32_MAX) bad("config key '" + where + "' out of range");
    return static_cast<uint32_t>(v);
}

void parse_cluster(const json& j, ClusterConfig& c) {
    check_keys(j, "cluster",
               {"vlen", "nlanes", "nports", "n_banks", "scratchpad_bytes", "offload_depth",
                "modeswitch_latency"});
    if (j.contains("vlen")) c.vlen = get_u32(j["vlen"], "cluster.vlen");
    if (j.contains("nlanes")) c.nlanes = get_u32(j["nlanes"], "cluster.nlanes");
    if (j.contains("nports")) c.nports = get_u32(j["nports"], "cluster.nports");
    if (j.contains("n_banks")) c.n_banks = get_u32(j["n_banks"], "cluster.n_banks");
    if (j.contains("scratchpad_bytes"))
        c.scratchpad_bytes = get_u32(j["scratchpad_bytes"], "cluster.scratchpad_bytes");
    if (j.contains("offload_depth"))
        c.offload_depth = get_u32(j["offload_depth"], "cluster.offload_depth");
    if (j.contains("modeswitch_latency"))
        c.modeswitch_latency = get_u32(j["modeswitch_latency"], "cluster.modeswitch_latency");
}

void parse_energy(const json& j, EnergyModel& e) {
    if (!j.is_object()) bad("config section 'energy' must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!e.weights.count(it.key()))
            bad("unknown energy event '" + it.key() + "'");
        if (!it.value().is_number())
            bad("energy weight '" + it.key() + "' must be a number");
        e.weights[it.key()] = it.value().get<double>();
    }
    e.validate();
}

Variant variant_for_mode(const std::string& mode) {
    if (mode == "split") return Variant::SplitSingle;
    if (mode == "merge") return Variant::MergeSingle;
    bad("mode must be 'split' or 'merge', got '" + mode + "'");
}

void parse_kernel(const json& j, KernelSpec& k, const std::string& where) {
    check_keys(j, where, {"name", "n", "m", "k", "taps", "dtype", "variant"});
    if (j.contains("name")) {
        auto kn = kernel_from_string(j["name"].get<std::string>());
        if (!kn) bad("unknown kernel '" + j["name"].get<std::string>() + "'");
        k = KernelSpec::defaults(*kn);
    }
    if (j.contains("n")) k.n = get_u32(j["n"], where + ".n");
    if (j.contains("m")) k.m = get_u32(j["m"], where + ".m");
    if (j.contains("k")) k.k = get_u32(j["k"], where + ".k");
    if (j.contains("taps")) k.taps = get_u32(j["taps"], where + ".taps");
    if (j.contains("dtype")) {
        auto dt = dtype_from_string(j["dtype"].get<std::string>());
        if (!dt) bad("unknown dtype '" + j["dtype"].get<std::string>() + "'");
        k.dtype = *dt;
    }
    if (j.contains("variant")) {
        auto v = variant_from_string(j["variant"].get<std::string>());
        if (!v) bad("unknown variant '" + j["variant"].get<std::string>() + "'");
        k.variant = *v;
    }
}

void parse_experiment(const json& j, ExperimentConfig& e) {
    check_keys(j, "experiment",
               {"kernel", "asm", "mixed", "kernels", "modes", "mode", "seed", "max_cycles",
                "expect"});
    int kinds = j.contains("kernel") + j.contains("asm") + j.contains("mixed");
    if (kinds > 1) bad("experiment must have at most one of kernel / asm / mixed");
    if (j.contains("seed")) e.seed = get_u64(j["seed"], "experiment.seed");
    if (j.contains("max_cycles")) e.max_cycles = get_u64(j["max_cycles"], "experiment.max_cycles");
    if (j.contains("kernel")) {
        e.kind = ExperimentKind::Kernel;
        parse_kernel(j["kernel"], e.kernel, "experiment.kernel");
    } else if (j.contains("asm")) {
        e.kind = ExperimentKind::Asm;
        e.asm_path = j["asm"].get<std::string>();
    } else if (j.contains("mixed")) {
        e.kind = ExperimentKind::Mixed;
        const json& m = j["mixed"];
        check_keys(m, "experiment.mixed", {"kernel", "scalar"});
        if (m.contains("kernel")) parse_kernel(m["kernel"], e.kernel, "experiment.mixed.kernel");
        if (m.contains("scalar")) {
            const json& s = m["scalar"];
            check_keys(s, "experiment.mixed.scalar",
                       {"iterations", "msg_len", "seed", "region_base"});
            if (s.contains("iterations"))
                e.scalar.iterations = get_u64(s["iterations"], "scalar.iterations");
            if (s.contains("msg_len")) e.scalar.msg_len = get_u32(s["msg_len"], "scalar.msg_len");
            if (s.contains("seed")) e.scalar.seed = get_u64(s["seed"], "scalar.seed");
            if (s.contains("region_base"))
                e.scalar.region_base = get_u32(s["region_base"], "scalar.region_base");
        }
    }
    if (j.contains("kernels")) {
        if (!j["kernels"].is_array() || j["kernels"].empty())
            bad("experiment.kernels must be a non-empty array");
        for (const auto& name : j["kernels"]) {
            auto kn = kernel_from_string(name.get<std::string>());
            if (!kn) bad("unknown kernel '" + name.get<std::string>() + "' in experiment.kernels");
            e.sweep_kernels.push_back(*kn);
        }
    }
    if (j.contains("modes")) {
        if (!j["modes"].is_array() || j["modes"].empty())
            bad("experiment.modes must be a non-empty array");
        for (const auto& m : j["modes"]) {
            std::string s = m.get<std::string>();
            variant_for_mode(s);  // validates
            e.sweep_modes.push_back(s);
        }
    }
    if (j.contains("mode")) e.kernel.variant = variant_for_mode(j["mode"].get<std::string>());
    if (j.contains("expect")) {
        if (!j["expect"].is_array()) bad("experiment.expect must be an array");
        for (const auto& r : j["expect"]) {
            check_keys(r, "experiment.expect[]", {"addr", "words"});
            if (!r.contains("addr") || !r.contains("words"))
                bad("experiment.expect entries need 'addr' and 'words'");
            CheckRegion cr;
            cr.label = "expect";
            cr.addr = get_u32(r["addr"], "expect.addr");
            if (!r["words"].is_array()) bad("expect.words must be an array");
            for (const auto& w : r["words"])
                cr.expected.push_back(get_u32(w, "expect.words[]"));
            e.expect.push_back(std::move(cr));
        }
    }
}

void parse_output(const json& j, OutputConfig& o) {
    check_keys(j, "output", {"format", "path", "trace"});
    if (j.contains("format")) {
        std::string f = j["format"].get<std::string>();
        if (f == "json") o.format = ReportFormat::Json;
        else if (f == "csv") o.format = ReportFormat::Csv;
        else bad("output.format must be 'json' or 'csv'");
    }
    if (j.contains("path")) o.path = j["path"].get<std::string>();
    if (j.contains("trace")) {
        if (!j["trace"].is_boolean()) bad("output.trace must be a boolean");
        o.trace = j["trace"].get<bool>();
    }
}

int write_report(const std::string& text, const OutputConfig& o, std::ostream& out,
                 std::ostream& err) {
    if (o.path.empty()) {
        out << text;
        return exit_ok;
    }
    std::ofstream f(o.path, std::ios::binary);
    if (!f) {
        err << "error: cannot open output file '" << o.path << "'\n";
        return exit_usage;
    }
    f << text;
    return exit_ok;
}

json stats_json(const RunStats& s) { return json::parse(emit_report(s, ReportFormat::Json)); }

}  // namespace

CliConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        bad(std::string("config is not valid JSON: ") + e.what());
    }
    CliConfig cfg;
    check_keys(j, "config", {"cluster", "energy", "experiment", "output"});
    if (j.contains("cluster")) parse_cluster(j["cluster"], cfg.cluster);
    if (j.contains("energy")) parse_energy(j["energy"], cfg.energy);
    if (j.contains("experiment")) parse_experiment(j["experiment"], cfg.experiment);
    if (j.contains("output")) parse_output(j["output"], cfg.output);
    cfg.cluster.validate();
    cfg.experiment.kernel.seed = cfg.experiment.seed;
    return cfg;
}

CliConfig load_config_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) bad("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

void apply_overrides(CliConfig& cfg, const CliOverrides& ov) {
    if (ov.mode) {
        cfg.experiment.kernel.variant = variant_for_mode(*ov.mode);
        cfg.experiment.sweep_modes = {*ov.mode};
    }
    if (ov.format) {
        if (*ov.format == "json") cfg.output.format = ReportFormat::Json;
        else if (*ov.format == "csv") cfg.output.format = ReportFormat::Csv;
        else bad("format must be 'json' or 'csv'");
    }
    if (ov.seed) {
        cfg.experiment.seed = *ov.seed;
        cfg.experiment.kernel.seed = *ov.seed;
        cfg.experiment.scalar.seed = *ov.seed;
    }
    if (ov.max_cycles) cfg.experiment.max_cycles = *ov.max_cycles;
    if (ov.out) cfg.output.path = *ov.out;
    if (ov.trace) cfg.output.trace = true;
}

int cmd_run(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.experiment.kind == ExperimentKind::Mixed) return cmd_mixed(cfg, out, err);

    RunRequest req;
    req.config = cfg.cluster;
    req.energy = cfg.energy;
    req.max_cycles = cfg.experiment.max_cycles;
    if (cfg.output.trace) req.trace = &err;

    RunStats st;
    bool oracle_ok = true;
    std::string mismatch;
    try {
        if (cfg.experiment.kind == ExperimentKind::Asm) {
            std::ifstream f(cfg.experiment.asm_path, std::ios::binary);
            if (!f) {
                err << "error: cannot read '" << cfg.experiment.asm_path << "'\n";
                return exit_usage;
            }
            std::ostringstream ss;
            ss << f.rdbuf();
            Program prog = assemble(ss.str());
            Cluster cl(cfg.cluster);
            cl.set_trace(req.trace);
            cl.load(prog);
            RunOutcome o = cl.run_to_halt(req.max_cycles);
            st.workload = cfg.experiment.asm_path;
            st.mode = to_string(cfg.cluster.initial_mode);
            st.seed = cfg.experiment.seed;
            st.cycles = o.cycles;
            st.timeout = o.timeout;
            st.counters = o.counters;
            st.config = cfg.cluster;
            st.result_checksum = checksum_regions(cl, cfg.experiment.expect);
            st.energy = energy(o.counters, req.energy);
            if (!o.timeout) {
                mismatch = check_regions(cl, cfg.experiment.expect);
                oracle_ok = mismatch.empty();
            }
        } else {
            RunResult res = run_kernel(cfg.experiment.kernel, req);
            st = res.stats;
            oracle_ok = res.oracle_ok;
            mismatch = res.mismatch;
        }
    } catch (const AsmError& e) {
        err << "assembly error: " << e.what() << "\n";
        return exit_asm;
    } catch (const SimFault& e) {
        err << "simulation fault: " << e.what() << "\n";
        return exit_fault;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << "\n";
        return exit_usage;
    }

    int rc = write_report(emit_report(st, cfg.output.format), cfg.output, out, err);
    if (rc != exit_ok) return rc;
    if (st.timeout) {
        err << "error: timeout after " << st.cycles << " cycles\n";
        return exit_fault;
    }
    if (!oracle_ok) {
        err << "oracle mismatch: " << mismatch << "\n";
        return exit_mismatch;
    }
    return exit_ok;
}

int cmd_sweep(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
    std::vector<KernelName> kernels = cfg.experiment.sweep_kernels;
    if (kernels.empty())
        kernels = {KernelName::Axpy, KernelName::Dotp, KernelName::Matmul,
                   KernelName::Fir,  KernelName::Relu, KernelName::Fft};
    std::vector<std::string> modes = cfg.experiment.sweep_modes;
    if (modes.empty()) modes = {"split", "merge"};

    RunRequest req;
    req.config = cfg.cluster;
    req.energy = cfg.energy;
    req.max_cycles = cfg.experiment.max_cycles;

    int rc = exit_ok;
    std::vector<RunStats> runs;
    std::vector<ComparisonReport> comparisons;
    for (KernelName kn : kernels) {
        RunStats per_mode[2];
        bool mode_ok[2] = {false, false};
        for (const std::string& mode : modes) {
            KernelSpec sp = KernelSpec::defaults(kn);
            sp.seed = cfg.experiment.seed;
            sp.variant = variant_for_mode(mode);
            int slot = mode == "merge" ? 1 : 0;
            try {
                RunResult res = run_kernel(sp, req);
                runs.push_back(res.stats);
                if (res.stats.timeout) {
                    err << "cell " << to_string(kn) << "/" << mode << ": timeout\n";
                    if (rc == exit_ok) rc = exit_fault;
                } else if (!res.oracle_ok) {
                    err << "cell " << to_string(kn) << "/" << mode << ": oracle mismatch: "
                        << res.mismatch << "\n";
                    if (rc == exit_ok) rc = exit_mismatch;
                } else {
                    per_mode[slot] = res.stats;
                    mode_ok[slot] = true;
                }
            } catch (const SimFault& e) {
                err << "cell " << to_string(kn) << "/" << mode << ": fault: " << e.what()
                    << "\n";
                if (rc == exit_ok) rc = exit_fault;
            } catch (const std::invalid_argument& e) {
                err << "cell " << to_string(kn) << "/" << mode << ": " << e.what() << "\n";
                if (rc == exit_ok) rc = exit_usage;
            }
        }
        if (mode_ok[0] && mode_ok[1]) {
            try {
                comparisons.push_back(compare_modes(per_mode[0], per_mode[1]));
            } catch (const std::runtime_error& e) {
                err << "cell " << to_string(kn) << ": " << e.what() << "\n";
                if (rc == exit_ok) rc = exit_mismatch;
            }
        }
    }
    int wrc = write_report(emit_report(runs, comparisons, cfg.output.format), cfg.output, out,
                           err);
    return rc != exit_ok ? rc : wrc;
}

int cmd_mixed(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
    RunRequest req;
    req.config = cfg.cluster;
    req.energy = cfg.energy;
    req.max_cycles = cfg.experiment.max_cycles;
    if (cfg.output.trace) req.trace = &err;

    MixedResult mr;
    try {
        mr = run_mixed(cfg.experiment.kernel, cfg.experiment.scalar, req);
    } catch (const AsmError& e) {
        err << "assembly error: " << e.what() << "\n";
        return exit_asm;
    } catch (const SimFault& e) {
        err << "simulation fault: " << e.what() << "\n";
        return exit_fault;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << "\n";
        return exit_usage;
    }

    std::string text;
    if (cfg.output.format == ReportFormat::Json) {
        json j;
        j["schema_version"] = 1;
        j["kind"] = "mixed";
        j["workload"] = mr.split.workload;
        j["problem"] = mr.split.problem;
        j["speedup"] = mr.speedup;
        j["util_core1_split"] = mr.util_core1_split;
        j["util_core1_merge"] = mr.util_core1_merge;
        j["split"] = stats_json(mr.split);
        j["merge"] = stats_json(mr.merge);
        text = j.dump(2) + "\n";
    } else {
        text = emit_report({mr.split, mr.merge}, {}, ReportFormat::Csv);
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%.6f\n", mr.speedup, mr.util_core1_split,
                      mr.util_core1_merge);
        text += "\nspeedup,util_core1_split,util_core1_merge\n";
        text += buf;
    }
    int rc = write_report(text, cfg.output, out, err);
    if (rc != exit_ok) return rc;
    if (mr.split.timeout || mr.merge.timeout) {
        err << "error: timeout before completion\n";
        return exit_fault;
    }
    if (!mr.oracle_ok) {
        err << "oracle mismatch: " << mr.mismatch << "\n";
        return exit_mismatch;
    }
    return exit_ok;
}

int cmd_asm_check(const std::string& path, std::ostream& err) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        err << "error: cannot read '" << path << "'\n";
        return exit_usage;
    }
    std::ostringstream ss;
    ss << f.rdbuf();
    try {
        Program prog = assemble(ss.str());
        err << path << ": ok, " << prog.instrs.size() << " instructions\n";
    } catch (const AsmError& e) {
        err << "assembly error: " << e.what() << "\n";
        return exit_asm;
    }
    return exit_ok;
}

}  // namespace spatzsim
