#include <random>
#include <string>

#include "doctest.h"
#include "spatzsim/isa.hpp"
#include "spatzsim/workloads.hpp"

using namespace spatzsim;

TEST_CASE("smallest legal program") {
    Program p = assemble("li x1, 5\nhalt\n");
    CHECK(p.instrs.size() == 2);
    CHECK(p.instrs[0].op == Opcode::Li);
    CHECK(p.instrs[0].rd == 1);
    CHECK(p.instrs[0].imm == 5);
    CHECK(p.instrs[1].op == Opcode::Halt);
    REQUIRE(p.entry[0].has_value());
    CHECK(*p.entry[0] == 0);
}

TEST_CASE("vsetvli field mapping") {
    Program p = assemble("vsetvli x1, x2, e32\n");
    REQUIRE(p.instrs.size() == 1);
    CHECK(p.instrs[0].op == Opcode::Vsetvli);
    CHECK(p.instrs[0].rd == 1);
    CHECK(p.instrs[0].rs1 == 2);
}

TEST_CASE("assembler rejections carry positions") {
    CHECK_THROWS_WITH_AS(assemble("frobnicate x1\n"),
                         doctest::Contains("unknown mnemonic 'frobnicate' at line 1"),
                         AsmError);
    CHECK_THROWS_AS(assemble("jal x0, nowhere\n"), AsmError);     // undefined label
    CHECK_THROWS_AS(assemble("a:\nnop\na:\nhalt\n"), AsmError);   // duplicate label
    CHECK_THROWS_AS(assemble("li x32, 1\n"), AsmError);           // register out of range
    CHECK_THROWS_AS(assemble("addi x1, x2\n"), AsmError);         // missing operand
    CHECK_THROWS_AS(assemble("nop junk\n"), AsmError);            // trailing junk
    try {
        assemble("nop\nnop\nbogus\n");
        FAIL("expected AsmError");
    } catch (const AsmError& e) {
        CHECK(e.line == 3);
    }
}

TEST_CASE("hex immediates and negative immediates") {
    Program p = assemble("li x1, 0x10\naddi x2, x1, -3\n");
    CHECK(p.instrs[0].imm == 16);
    CHECK(p.instrs[1].imm == -3);
}

TEST_CASE("disassemble inverse of assemble") {
    Program p = assemble("li x1, 5\nhalt\n");
    std::string text = disassemble(p);
    CHECK(text.find("li x1, 5") != std::string::npos);
    CHECK(text.find("halt") != std::string::npos);
    Program q = assemble(text);
    CHECK(p.equivalent(q));
}

TEST_CASE("disassemble of the empty program") {
    Program p;
    CHECK(disassemble(p).empty());
}

TEST_CASE("round-trip over generated kernel programs") {
    ClusterConfig cfg;
    for (KernelName kn : {KernelName::Axpy, KernelName::Dotp, KernelName::Matmul,
                          KernelName::Fir, KernelName::Relu, KernelName::Fft}) {
        for (Variant v : {Variant::SplitSingle, Variant::SplitDual, Variant::MergeSingle}) {
            KernelSpec sp = KernelSpec::defaults(kn);
            sp.n = kn == KernelName::Fft ? 64 : 256;
            if (kn == KernelName::Matmul) sp.m = sp.k = sp.n = 8;
            sp.variant = v;
            GeneratedKernel gk = generate_kernel(sp, cfg);
            Program rt = assemble(disassemble(gk.program));
            CHECK(rt.equivalent(gk.program));
        }
    }
}

TEST_CASE("round-trip over random scalar programs") {
    std::mt19937_64 rng(7);
    for (int iter = 0; iter < 50; ++iter) {
        std::string src;
        int n = 3 + static_cast<int>(rng() % 20);
        for (int i = 0; i < n; ++i) {
            switch (rng() % 8) {
                case 0: src += "li x" + std::to_string(rng() % 32) + ", " +
                               std::to_string(static_cast<int32_t>(rng())) + "\n"; break;
                case 1: src += "add x1, x2, x3\n"; break;
                case 2: src += "addi x4, x4, -1\n"; break;
                case 3: src += "xor x5, x6, x7\n"; break;
                case 4: src += "slli x8, x9, " + std::to_string(rng() % 31) + "\n"; break;
                case 5: src += "lw x10, " + std::to_string((rng() % 64) * 4) + "(x0)\n"; break;
                case 6: src += "beq x1, x0, L" + std::to_string(i) + "\nL" +
                               std::to_string(i) + ":\n"; break;
                default: src += "nop\n"; break;
            }
        }
        src += "halt\n";
        Program p = assemble(src);
        Program q = assemble(disassemble(p));
        CHECK(q.equivalent(p));
    }
}
