#include <bit>
#include <random>
#include <string>

#include "doctest.h"
#include "spatzsim/cluster.hpp"
#include "spatzsim/runner.hpp"

using namespace spatzsim;

namespace {

// run a one-core program and return the cluster for state inspection
Cluster run_cl(const std::string& src, ClusterConfig cfg = {}) {
    Cluster cl(cfg);
    cl.load(assemble(src));
    cl.run_to_halt(100000);
    return cl;
}

}  // namespace

TEST_CASE("vsetvli clamps to VLMAX") {
    Cluster a = run_cl("li x2, 16\nvsetvli x1, x2, e32\nhalt\n");
    CHECK(a.core(0).x[1] == 8);  // min(16, 256/32)

    Cluster b = run_cl("li x2, 5\nvsetvli x1, x2, e32\nhalt\n");
    CHECK(b.core(0).x[1] == 5);

    Cluster c = run_cl("modeswitch merge 0\nli x2, 16\nvsetvli x1, x2, e32\nhalt\n");
    CHECK(c.core(0).x[1] == 16);  // VLMAX doubles in merge mode
}

TEST_CASE("vsetvli with x0 requests the maximum") {
    Cluster a = run_cl("vsetvli x1, x0, e32\nhalt\n");
    CHECK(a.core(0).x[1] == 8);
}

TEST_CASE("csrr reads vl") {
    Cluster a = run_cl("li x2, 5\nvsetvli x1, x2, e32\ncsrr x3, vl\nhalt\n");
    CHECK(a.core(0).x[3] == 5);
}

TEST_CASE("vsetvl law over random avl and both modes") {
    std::mt19937_64 rng(11);
    ClusterConfig cfg;
    uint32_t vlmax = cfg.vlmax_unit();
    for (int i = 0; i < 400; ++i) {
        uint32_t avl = static_cast<uint32_t>(rng() % (4 * 2 * vlmax + 1));
        bool merge = rng() & 1;
        std::string src;
        if (merge) src += "modeswitch merge 0\n";
        src += "li x2, " + std::to_string(avl) + "\nvsetvli x1, x2, e32\nhalt\n";
        Cluster cl = run_cl(src, cfg);
        uint32_t eff = merge ? 2 * vlmax : vlmax;
        CHECK(static_cast<uint32_t>(cl.core(0).x[1]) == std::min(avl, eff));
    }
}

TEST_CASE("arithmetic occupancy is ceil(owned/NLANES)") {
    Cluster cl = run_cl("vsetvli x1, x0, e32\nvadd.vv v3, v1, v2\nfence.vec\nhalt\n");
    CHECK(cl.counters().unit[0].active_cycle == 2);  // ceil(8/4)

    Cluster c5 = run_cl("li x2, 5\nvsetvli x1, x2, e32\nvadd.vv v3, v1, v2\nfence.vec\nhalt\n");
    CHECK(c5.counters().unit[0].active_cycle == 2);  // ceil(5/4)

    Cluster c1 = run_cl("li x2, 1\nvsetvli x1, x2, e32\nvadd.vv v3, v1, v2\nfence.vec\nhalt\n");
    CHECK(c1.counters().unit[0].active_cycle == 1);
}

TEST_CASE("conflict-free unit-stride load occupancy is ceil(owned/NPORTS)") {
    ClusterConfig cfg;
    cfg.vlen = 512;  // VLMAX 16 in one unit
    Cluster cl = run_cl("li x2, 1024\nvsetvli x1, x0, e32\nvle32.v v1, (x2)\nfence.vec\nhalt\n",
                        cfg);
    CHECK(cl.core(0).x[1] == 16);
    CHECK(cl.counters().unit[0].active_cycle == 4);  // ceil(16/4), no conflicts
    CHECK(cl.counters().unit[0].bank_conflict_stall == 0);
}

TEST_CASE("zero vl vector op costs one cycle and writes nothing") {
    Cluster cl = run_cl(
        "li x2, 0\nvsetvli x1, x2, e32\nvadd.vv v3, v1, v2\nfence.vec\nhalt\n");
    CHECK(cl.core(0).x[1] == 0);
    CHECK(cl.counters().unit[0].active_cycle == 1);
    CHECK(cl.counters().unit[0].vector_lane_op == 0);
}

TEST_CASE("occupancy is non-decreasing in owned element count") {
    uint64_t prev = 0;
    for (uint32_t vl = 1; vl <= 8; ++vl) {
        Cluster cl = run_cl("li x2, " + std::to_string(vl) +
                            "\nvsetvli x1, x2, e32\nvmul.vv v3, v1, v2\nfence.vec\nhalt\n");
        uint64_t cyc = cl.counters().unit[0].active_cycle;
        CHECK(cyc >= prev);
        prev = cyc;
    }
}

TEST_CASE("vfmacc elementwise multiply-accumulate") {
    // v1={1,2,3,4}, v2={10,10,10,10}, vd={5,5,5,5} -> vd={15,25,35,45}
    std::string src = R"(
.data 512 0x3f800000 0x40000000 0x40400000 0x40800000
.data 576 0x41200000 0x41200000 0x41200000 0x41200000
.data 640 0x40a00000 0x40a00000 0x40a00000 0x40a00000
li x2, 512
li x3, 576
li x4, 640
li x5, 704
li x6, 4
vsetvli x1, x6, e32
vle32.v v1, (x2)
vle32.v v2, (x3)
vle32.v v3, (x4)
vfmacc.vv v3, v1, v2
vse32.v v3, (x5)
fence.vec
halt
)";
    Cluster cl = run_cl(src);
    float want[4] = {15.0f, 25.0f, 35.0f, 45.0f};
    for (int i = 0; i < 4; ++i)
        CHECK(std::bit_cast<float>(cl.load_word(704 + 4 * i)) == want[i]);
}

TEST_CASE("vredsum over 1..8 yields 36 in 4 occupancy cycles") {
    std::string src = R"(
.data 512 1 2 3 4 5 6 7 8
li x2, 512
li x3, 576
vsetvli x1, x0, e32
vle32.v v1, (x2)
vmv.v.x v2, x0
vredsum.vs v3, v1, v2
vse32.v v3, (x3)
fence.vec
lw x4, 0(x3)
halt
)";
    Cluster cl = run_cl(src);
    CHECK(cl.core(0).x[4] == 36);
    // active = vle(2) + vmv(2) + vredsum(ceil(8/4)+log2(4)=4) + vse(2)
    CHECK(cl.counters().unit[0].active_cycle == 10);
}

TEST_CASE("vector memory access out of scratchpad faults") {
    ClusterConfig cfg;
    Cluster cl(cfg);
    cl.load(assemble("li x2, " + std::to_string(cfg.scratchpad_bytes - 8) +
                     "\nvsetvli x1, x0, e32\nvle32.v v1, (x2)\nfence.vec\nhalt\n"));
    CHECK_THROWS_AS(cl.run_to_halt(1000), SimFault);
}

TEST_CASE("merge mode splits the element window across both units") {
    // store 16 elements in merge mode; each unit writes its half
    std::string src = R"(
modeswitch merge 0
li x2, 1024
li x3, 7
vsetvli x1, x0, e32
vmv.v.x v1, x3
vse32.v v1, (x2)
fence.vec
halt
)";
    Cluster cl = run_cl(src);
    CHECK(cl.core(0).x[1] == 16);
    for (int i = 0; i < 16; ++i) CHECK(cl.load_word(1024 + 4 * i) == 7);
    CHECK(cl.counters().unit[0].vector_lane_op == cl.counters().unit[1].vector_lane_op);
}

TEST_CASE("strided access functional behavior") {
    std::string src = R"(
.data 512 1 2 3 4 5 6 7 8 9 10 11 12 13 14 15 16
li x2, 512
li x3, 1024
li x4, 4
vsetvli x1, x4, e32
vlse32.v v1, (x2), 16
vse32.v v1, (x3)
fence.vec
halt
)";
    Cluster cl = run_cl(src);
    // stride 16 bytes = every 4th word: 1, 5, 9, 13
    CHECK(cl.load_word(1024) == 1);
    CHECK(cl.load_word(1028) == 5);
    CHECK(cl.load_word(1032) == 9);
    CHECK(cl.load_word(1036) == 13);
}

TEST_CASE("functional mode-independence of generated kernels") {
    RunRequest req;
    for (KernelName kn : {KernelName::Axpy, KernelName::Dotp, KernelName::Matmul,
                          KernelName::Fir, KernelName::Relu, KernelName::Fft}) {
        KernelSpec sp = KernelSpec::defaults(kn);
        sp.n = kn == KernelName::Fft ? 128 : 512;
        if (kn == KernelName::Matmul) sp.m = sp.k = sp.n = 16;
        uint64_t sums[3];
        int i = 0;
        for (Variant v : {Variant::SplitSingle, Variant::SplitDual, Variant::MergeSingle}) {
            sp.variant = v;
            RunResult r = run_kernel(sp, req);
            CHECK(r.oracle_ok);
            sums[i++] = r.stats.result_checksum;
        }
        // bit-exact across modes, fp32 included (fixed reduction order)
        CHECK(sums[0] == sums[1]);
        CHECK(sums[1] == sums[2]);
    }
}
