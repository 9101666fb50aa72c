#include <cassert>
#include <cstdio>

#include "spatzsim/cluster.hpp"

using namespace spatzsim;

int main() {
    Program p = assemble(R"(
        li x1, 5
        li x2, 7
        add x3, x1, x2
        halt
    )");
    ClusterConfig cfg;
    Cluster cl(cfg);
    cl.load(p);
    auto out = cl.run_to_halt(1000);
    std::printf("cycles=%llu x3=%d ifetch=%llu\n",
                (unsigned long long)out.cycles, cl.core(0).x[3],
                (unsigned long long)out.counters.core[0].ifetch_scalar);
    assert(out.cycles == 4);
    assert(cl.core(0).x[3] == 12);
    assert(out.counters.core[0].ifetch_scalar == 4);
    assert(!out.timeout);

    // vector round trip: splat, add, store, reload via scalar
    Program pv = assemble(R"(
        li x5, 1024
        li x6, 10
        vsetvli x7, x0, e32
        vmv.v.x v1, x6
        vadd.vx v2, v1, x7
        vse32.v v2, (x5)
        fence.vec
        lw x8, 0(x5)
        halt
    )");
    cl.load(pv);
    auto out2 = cl.run_to_halt(1000);
    std::printf("cycles=%llu vl=%d mem=%d\n", (unsigned long long)out2.cycles,
                cl.core(0).x[7], cl.core(0).x[8]);
    assert(cl.core(0).x[7] == 8);
    assert(cl.core(0).x[8] == 18);
    assert(!out2.timeout);

    std::puts("smoke ok");
    return 0;
}
