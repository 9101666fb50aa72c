#include <cstdio>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "spatzsim/cli.hpp"

using namespace spatzsim;

namespace {

std::string write_temp(const char* name, const std::string& text) {
    std::string path = std::string("cli_test_") + name;
    std::ofstream f(path, std::ios::binary);
    f << text;
    return path;
}

}  // namespace

TEST_CASE("config defaults and overrides") {
    CliConfig cfg = parse_config("{}");
    CHECK(cfg.cluster.vlen == 256);
    CHECK(cfg.experiment.kind == ExperimentKind::Kernel);
    CHECK(cfg.output.format == ReportFormat::Json);

    cfg = parse_config(R"({"cluster": {"vlen": 512, "nlanes": 8},
                           "experiment": {"kernel": {"name": "fft", "n": 256}, "seed": 9},
                           "output": {"format": "csv", "trace": true}})");
    CHECK(cfg.cluster.vlen == 512);
    CHECK(cfg.cluster.nlanes == 8);
    CHECK(cfg.experiment.kernel.name == KernelName::Fft);
    CHECK(cfg.experiment.kernel.n == 256);
    CHECK(cfg.experiment.kernel.seed == 9);
    CHECK(cfg.output.format == ReportFormat::Csv);
    CHECK(cfg.output.trace);

    CliOverrides ov;
    ov.mode = "merge";
    ov.seed = 123;
    ov.max_cycles = 5000;
    ov.format = "json";
    apply_overrides(cfg, ov);
    CHECK(cfg.experiment.kernel.variant == Variant::MergeSingle);
    CHECK(cfg.experiment.kernel.seed == 123);
    CHECK(cfg.experiment.max_cycles == 5000);
    CHECK(cfg.output.format == ReportFormat::Json);
}

TEST_CASE("unknown config keys are errors, not warnings") {
    CHECK_THROWS_AS(parse_config(R"({"klustr": {}})"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config(R"({"cluster": {"vlanes": 4}})"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config(R"({"experiment": {"kernle": {}}})"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config(R"({"experiment": {"kernel": {"size": 4}}})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_config(R"({"energy": {"ifetch_quantum": 1}})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_config(R"({"output": {"fromat": "json"}})"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("not json"), std::invalid_argument);
}

TEST_CASE("config validation of values") {
    CHECK_THROWS_AS(parse_config(R"({"cluster": {"vlen": 100}})"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config(R"({"cluster": {"n_banks": 12}})"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config(R"({"experiment": {"mode": "both"}})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_config(R"({"energy": {"ifetch_scalar": -2}})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        parse_config(R"({"experiment": {"kernel": {}, "asm": "x.s"}})"),
        std::invalid_argument);
}

TEST_CASE("cmd_run: clean kernel run exits 0 with a parseable report") {
    CliConfig cfg = parse_config(
        R"({"experiment": {"kernel": {"name": "axpy", "n": 64}}})");
    std::ostringstream out, err;
    CHECK(cmd_run(cfg, out, err) == exit_ok);
    RunStats st = parse_run_stats(out.str());
    CHECK(st.workload == "axpy");
    CHECK_FALSE(st.timeout);
    CHECK(st.cycles > 0);

    // checksum in the report matches an independent oracle-checked run
    RunRequest req;
    RunResult ref = run_kernel(cfg.experiment.kernel, req);
    CHECK(ref.oracle_ok);
    CHECK(st.result_checksum == ref.stats.result_checksum);
}

TEST_CASE("cmd_run exit codes per failure class") {
    SUBCASE("assembly error exits 2") {
        std::string bad = write_temp("bad.s", "frobnicate x1\n");
        CliConfig cfg = parse_config(R"({"experiment": {"asm": ")" + bad + R"("}})");
        std::ostringstream out, err;
        CHECK(cmd_run(cfg, out, err) == exit_asm);
        CHECK(err.str().find("unknown mnemonic") != std::string::npos);
        std::remove(bad.c_str());
    }
    SUBCASE("timeout exits 3 and is flagged in the report") {
        std::string loop = write_temp("loop.s", "loop:\njal x0, loop\n");
        CliConfig cfg = parse_config(
            R"({"experiment": {"asm": ")" + loop + R"(", "max_cycles": 1000}})");
        std::ostringstream out, err;
        CHECK(cmd_run(cfg, out, err) == exit_fault);
        CHECK(out.str().find("\"timeout\": true") != std::string::npos);
        std::remove(loop.c_str());
    }
    SUBCASE("simulation fault exits 3") {
        std::string flt = write_temp("fault.s", "li x1, 0x7FFFFFF0\nlw x2, 0(x1)\nhalt\n");
        CliConfig cfg = parse_config(R"({"experiment": {"asm": ")" + flt + R"("}})");
        std::ostringstream out, err;
        CHECK(cmd_run(cfg, out, err) == exit_fault);
        std::remove(flt.c_str());
    }
    SUBCASE("expectation mismatch exits 4") {
        std::string ok = write_temp("store.s", "li x1, 7\nsw x1, 0(x0)\nhalt\n");
        CliConfig cfg = parse_config(R"({"experiment": {"asm": ")" + ok +
                                     R"(", "expect": [{"addr": 0, "words": [8]}]}})");
        std::ostringstream out, err;
        CHECK(cmd_run(cfg, out, err) == exit_mismatch);
        cfg.experiment.expect[0].expected = {7};
        std::ostringstream out2, err2;
        CHECK(cmd_run(cfg, out2, err2) == exit_ok);
        std::remove(ok.c_str());
    }
    SUBCASE("missing asm file exits 1") {
        CliConfig cfg = parse_config(R"({"experiment": {"asm": "no_such_file.s"}})");
        std::ostringstream out, err;
        CHECK(cmd_run(cfg, out, err) == exit_usage);
    }
}

TEST_CASE("report reproducibility: same config gives byte-identical reports") {
    CliConfig cfg = parse_config(
        R"({"experiment": {"kernel": {"name": "dotp", "n": 128}}})");
    std::ostringstream a, b, err;
    CHECK(cmd_run(cfg, a, err) == exit_ok);
    CHECK(cmd_run(cfg, b, err) == exit_ok);
    CHECK(a.str() == b.str());
    CHECK_FALSE(a.str().empty());
}

TEST_CASE("cmd_sweep cell and comparison counts") {
    SUBCASE("2 kernels x 2 modes: 4 rows, 2 comparison rows") {
        CliConfig cfg = parse_config(
            R"({"experiment": {"kernels": ["axpy", "relu"]}, "output": {"format": "csv"}})");
        std::ostringstream out, err;
        CHECK(cmd_sweep(cfg, out, err) == exit_ok);
        std::string csv = out.str();
        size_t rows = 0;
        for (char ch : csv) rows += ch == '\n';
        // header + 4 runs + blank + comparison header + 2 comparisons
        CHECK(rows == 9);
        CHECK(csv.find("axpy,split") != std::string::npos);
        CHECK(csv.find("axpy,merge0") != std::string::npos);
    }
    SUBCASE("single kernel, single mode degenerates to one row, no ratios") {
        CliConfig cfg = parse_config(
            R"({"experiment": {"kernels": ["relu"], "modes": ["split"]},
                "output": {"format": "csv"}})");
        std::ostringstream out, err;
        CHECK(cmd_sweep(cfg, out, err) == exit_ok);
        std::string csv = out.str();
        size_t rows = 0;
        for (char ch : csv) rows += ch == '\n';
        CHECK(rows == 2);  // header + one run, no comparison block
        CHECK(csv.find("speedup") == std::string::npos);
    }
}

TEST_CASE("cmd_mixed reports speedup and utilization") {
    CliConfig cfg = parse_config(
        R"({"experiment": {"mixed": {"kernel": {"name": "relu", "n": 1024},
                                     "scalar": {"iterations": 2}}}})");
    std::ostringstream out, err;
    CHECK(cmd_mixed(cfg, out, err) == exit_ok);
    CHECK(out.str().find("\"speedup\"") != std::string::npos);
    CHECK(out.str().find("\"util_core1_merge\"") != std::string::npos);
}

TEST_CASE("load_config_file rejects missing files") {
    CHECK_THROWS_AS(load_config_file("definitely_missing.json"), std::invalid_argument);
}
