#include "spatzsim/runner.hpp"

#include <bit>
#include <cmath>
#include <cstdio>

namespace spatzsim {

std::string check_regions(const Cluster& cl, const std::vector<CheckRegion>& checks) {
    for (const auto& region : checks) {
        for (size_t i = 0; i < region.expected.size(); ++i) {
            uint32_t got = cl.load_word(region.addr + 4 * static_cast<uint32_t>(i));
            uint32_t want = region.expected[i];
            if (!region.expected_im.empty()) {
                uint32_t got_im = cl.load_word(region.addr_im + 4 * static_cast<uint32_t>(i));
                uint32_t want_im = region.expected_im[i];
                if (got == want && got_im == want_im) continue;
                double gr = std::bit_cast<float>(got), gi = std::bit_cast<float>(got_im);
                double wr = std::bit_cast<float>(want), wi = std::bit_cast<float>(want_im);
                double mag = std::hypot(wr, wi);
                double err = std::hypot(gr - wr, gi - wi);
                double rel = err / std::max(mag, region.floor);
                if (!(rel <= region.tol)) {
                    char buf[160];
                    std::snprintf(buf, sizeof(buf),
                                  ": expected (%.9g, %.9g), got (%.9g, %.9g) (rel %.3g)",
                                  wr, wi, gr, gi, rel);
                    return region.label + "[" + std::to_string(i) + "]" + buf;
                }
            } else if (!region.fp) {
                if (got != want)
                    return region.label + "[" + std::to_string(i) + "]: expected " +
                           std::to_string(want) + ", got " + std::to_string(got);
            } else {
                float g = std::bit_cast<float>(got);
                float w = std::bit_cast<float>(want);
                double denom = std::max(static_cast<double>(std::fabs(w)), region.floor);
                double rel = std::fabs(static_cast<double>(g) - static_cast<double>(w)) /
                             denom;
                if (!(rel <= region.tol) && got != want) {
                    char buf[128];
                    std::snprintf(buf, sizeof(buf),
                                  ": expected %.9g, got %.9g (rel %.3g)", w, g, rel);
                    return region.label + "[" + std::to_string(i) + "]" + buf;
                }
            }
        }
    }
    return "";
}

uint64_t checksum_regions(const Cluster& cl, const std::vector<CheckRegion>& checks) {
    std::vector<uint8_t> bytes;
    for (const auto& region : checks) {
        for (size_t i = 0; i < region.expected.size(); ++i) {
            uint32_t w = cl.load_word(region.addr + 4 * static_cast<uint32_t>(i));
            bytes.push_back(w & 0xFF);
            bytes.push_back((w >> 8) & 0xFF);
            bytes.push_back((w >> 16) & 0xFF);
            bytes.push_back((w >> 24) & 0xFF);
        }
    }
    return fnv1a64(bytes.data(), bytes.size());
}

RunStats run_program(const Program& prog, const RunRequest& req, Mode initial_mode,
                     const std::vector<CheckRegion>& checks, const std::string& workload,
                     const std::string& problem, const std::string& dtype, uint64_t seed) {
    ClusterConfig cfg = req.config;
    cfg.initial_mode = initial_mode;
    Cluster cl(cfg);
    cl.set_trace(req.trace);
    cl.load(prog);
    RunOutcome out = cl.run_to_halt(req.max_cycles);

    RunStats st;
    st.workload = workload;
    st.mode = to_string(initial_mode);
    st.dtype = dtype;
    st.problem = problem;
    st.seed = seed;
    st.cycles = out.cycles;
    st.timeout = out.timeout;
    st.counters = out.counters;
    st.config = cfg;
    st.result_checksum = checksum_regions(cl, checks);
    st.energy = energy(out.counters, req.energy);
    return st;
}

RunResult run_kernel(const KernelSpec& spec, const RunRequest& req) {
    GeneratedKernel gk = generate_kernel(spec, req.config);
    RunResult res;
    ClusterConfig c2 = req.config;
    c2.initial_mode = gk.required_mode;
    Cluster cl(c2);
    cl.set_trace(req.trace);
    cl.load(gk.program);
    RunOutcome out = cl.run_to_halt(req.max_cycles);

    RunStats st;
    st.workload = to_string(spec.name);
    st.mode = to_string(gk.required_mode);
    st.dtype = gk.dtype;
    st.problem = gk.problem;
    st.seed = spec.seed;
    st.cycles = out.cycles;
    st.timeout = out.timeout;
    st.counters = out.counters;
    st.config = c2;
    st.result_checksum = checksum_regions(cl, gk.checks);
    st.energy = energy(out.counters, req.energy);
    res.stats = st;
    if (out.timeout) {
        res.oracle_ok = false;
        res.mismatch = "timeout before halt";
        return res;
    }
    res.mismatch = check_regions(cl, gk.checks);
    res.oracle_ok = res.mismatch.empty();
    return res;
}

MixedResult run_mixed(const KernelSpec& kernel, const ScalarWorkloadSpec& scalar,
                      const RunRequest& req) {
    GeneratedMixed gm = generate_mixed(kernel, scalar, req.config);
    MixedResult res;
    std::string name = std::string("mixed-") + to_string(kernel.name);

    for (int layout = 0; layout < 2; ++layout) {
        const Program& prog = layout == 0 ? gm.split_program : gm.merge_program;
        ClusterConfig cfg = req.config;
        cfg.initial_mode = Mode::split();  // merge layout switches itself
        Cluster cl(cfg);
        cl.set_trace(req.trace);
        cl.load(prog);
        RunOutcome out = cl.run_to_halt(req.max_cycles);

        RunStats st;
        st.workload = name;
        st.mode = layout == 0 ? "split" : "merge0";
        st.dtype = to_string(kernel.dtype);
        st.problem = gm.problem;
        st.seed = kernel.seed;
        st.cycles = out.cycles;
        st.timeout = out.timeout;
        st.counters = out.counters;
        st.config = cfg;
        st.result_checksum = checksum_regions(cl, gm.checks);
        st.energy = energy(out.counters, req.energy);

        std::string mism;
        if (out.timeout)
            mism = "timeout before halt";
        else
            mism = check_regions(cl, gm.checks);
        if (!mism.empty() && res.mismatch.empty()) {
            res.oracle_ok = false;
            res.mismatch = (layout == 0 ? "split: " : "merge: ") + mism;
        }
        double util = out.cycles == 0
                          ? 0.0
                          : static_cast<double>(out.counters.core[1].active_cycle) /
                                static_cast<double>(out.cycles);
        if (layout == 0) {
            res.split = st;
            res.util_core1_split = util;
        } else {
            res.merge = st;
            res.util_core1_merge = util;
        }
    }
    if (res.merge.cycles > 0)
        res.speedup = static_cast<double>(res.split.cycles) /
                      static_cast<double>(res.merge.cycles);
    return res;
}

}  // namespace spatzsim
