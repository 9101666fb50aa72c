#include "spatzsim/workloads.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace spatzsim {

namespace {

std::string S(uint64_t v) { return std::to_string(v); }
std::string S(int64_t v) { return std::to_string(v); }
std::string S(uint32_t v) { return std::to_string(v); }
std::string S(int32_t v) { return std::to_string(v); }

uint32_t fbits(float f) { return std::bit_cast<uint32_t>(f); }

uint32_t log2u(uint32_t v) {
    uint32_t l = 0;
    while ((1u << l) < v) ++l;
    return l;
}

std::vector<int32_t> random_i32(std::mt19937_64& rng, size_t n, int32_t lo, int32_t hi) {
    std::uniform_int_distribution<int32_t> d(lo, hi);
    std::vector<int32_t> out(n);
    for (auto& v : out) v = d(rng);
    return out;
}

std::vector<float> random_f32(std::mt19937_64& rng, size_t n, float lo, float hi) {
    std::uniform_real_distribution<float> d(lo, hi);
    std::vector<float> out(n);
    for (auto& v : out) v = d(rng);
    return out;
}

std::vector<uint32_t> words_of(const std::vector<int32_t>& v) {
    std::vector<uint32_t> out(v.size());
    for (size_t i = 0; i < v.size(); ++i) out[i] = static_cast<uint32_t>(v[i]);
    return out;
}

std::vector<uint32_t> words_of(const std::vector<float>& v) {
    std::vector<uint32_t> out(v.size());
    for (size_t i = 0; i < v.size(); ++i) out[i] = fbits(v[i]);
    return out;
}

// ---- assembly emitters ------------------------------------------------------
// Every kernel keeps all of its vector instructions inside the strip-mined
// loops, so the vector fetch count scales exactly with the trip count and
// merge mode halves it.

struct EmitCtx {
    std::string text;
    void line(const std::string& s) { text += "  " + s + "\n"; }
    void label(const std::string& s) { text += s + ":\n"; }
};

void emit_axpy(EmitCtx& e, const std::string& p, Dtype dt, uint32_t xb, uint32_t yb,
               uint32_t cnt, int32_t a_int, uint32_t a_addr) {
    e.line("li x5, " + S(xb));
    e.line("li x6, " + S(yb));
    e.line("li x7, " + S(cnt));
    if (dt == Dtype::Int32) {
        e.line("li x8, " + S(a_int));
    } else {
        e.line("li x9, " + S(a_addr));
        e.line("flw f1, 0(x9)");
    }
    e.line("beq x7, x0, " + p + "done");
    e.label(p + "loop");
    e.line("vsetvli x2, x7, e32");
    e.line("vle32.v v1, (x5)");
    e.line("vle32.v v2, (x6)");
    if (dt == Dtype::Int32) {
        e.line("vmul.vx v3, v1, x8");
        e.line("vadd.vv v2, v2, v3");
    } else {
        e.line("vfmul.vf v3, v1, f1");
        e.line("vfadd.vv v2, v2, v3");
    }
    e.line("vse32.v v2, (x6)");
    e.line("slli x3, x2, 2");
    e.line("add x5, x5, x3");
    e.line("add x6, x6, x3");
    e.line("sub x7, x7, x2");
    e.line("bne x7, x0, " + p + "loop");
    e.label(p + "done");
}

void emit_dotp(EmitCtx& e, const std::string& p, Dtype dt, uint32_t xb, uint32_t yb,
               uint32_t resb, uint32_t cnt) {
    e.line("li x5, " + S(xb));
    e.line("li x6, " + S(yb));
    e.line("li x7, " + S(cnt));
    e.line("li x8, " + S(resb));
    e.line("beq x7, x0, " + p + "done");
    e.label(p + "loop");
    e.line("vsetvli x2, x7, e32");
    e.line("vle32.v v1, (x5)");
    e.line("vle32.v v2, (x6)");
    if (dt == Dtype::Int32) {
        e.line("vmul.vv v3, v1, v2");
        e.line("vredsum.vs v4, v3, v4");
    } else {
        e.line("vfmul.vv v3, v1, v2");
        e.line("vfredsum.vs v4, v3, v4");
    }
    e.line("vse32.v v4, (x8)");
    e.line("slli x3, x2, 2");
    e.line("add x5, x5, x3");
    e.line("add x6, x6, x3");
    e.line("sub x7, x7, x2");
    e.line("bne x7, x0, " + p + "loop");
    e.label(p + "done");
}

void emit_relu(EmitCtx& e, const std::string& p, uint32_t xb, uint32_t yb, uint32_t cnt) {
    e.line("li x5, " + S(xb));
    e.line("li x6, " + S(yb));
    e.line("li x7, " + S(cnt));
    e.line("beq x7, x0, " + p + "done");
    e.label(p + "loop");
    e.line("vsetvli x2, x7, e32");
    e.line("vle32.v v1, (x5)");
    e.line("vmax.vx v2, v1, x0");
    e.line("vse32.v v2, (x6)");
    e.line("slli x3, x2, 2");
    e.line("add x5, x5, x3");
    e.line("add x6, x6, x3");
    e.line("sub x7, x7, x2");
    e.line("bne x7, x0, " + p + "loop");
    e.label(p + "done");
}

void emit_fir(EmitCtx& e, const std::string& p, Dtype dt, uint32_t xb, uint32_t yb,
              uint32_t hb, uint32_t taps, uint32_t cnt) {
    e.line("li x5, " + S(xb));
    e.line("li x6, " + S(yb));
    e.line("li x7, " + S(cnt));
    e.line("beq x7, x0, " + p + "done");
    e.label(p + "loop");
    e.line("vsetvli x2, x7, e32");
    if (dt == Dtype::Int32)
        e.line("vmv.v.x v4, x0");
    else
        e.line("vfmv.v.f v4, f0");
    e.line("mv x3, x5");
    e.line("li x4, " + S(hb));
    e.line("li x10, " + S(taps));
    e.label(p + "tap");
    if (dt == Dtype::Int32) {
        e.line("lw x8, 0(x4)");
        e.line("vle32.v v1, (x3)");
        e.line("vmul.vx v2, v1, x8");
        e.line("vadd.vv v4, v4, v2");
    } else {
        e.line("flw f1, 0(x4)");
        e.line("vle32.v v1, (x3)");
        e.line("vfmul.vf v2, v1, f1");
        e.line("vfadd.vv v4, v4, v2");
    }
    e.line("addi x3, x3, 4");
    e.line("addi x4, x4, 4");
    e.line("addi x10, x10, -1");
    e.line("bne x10, x0, " + p + "tap");
    e.line("vse32.v v4, (x6)");
    e.line("slli x3, x2, 2");
    e.line("add x5, x5, x3");
    e.line("add x6, x6, x3");
    e.line("sub x7, x7, x2");
    e.line("bne x7, x0, " + p + "loop");
    e.label(p + "done");
}

void emit_matmul(EmitCtx& e, const std::string& p, Dtype dt, uint32_t ab, uint32_t bb,
                 uint32_t cb, uint32_t rows, uint32_t k, uint32_t n) {
    e.line("li x5, " + S(ab));
    e.line("li x11, " + S(cb));
    e.line("li x12, " + S(rows));
    e.line("beq x12, x0, " + p + "done");
    e.line("li x17, " + S(n));
    e.line("beq x17, x0, " + p + "done");
    e.label(p + "row");
    e.line("li x7, " + S(n));
    e.line("li x13, 0");
    e.label(p + "col");
    e.line("vsetvli x2, x7, e32");
    if (dt == Dtype::Int32)
        e.line("vmv.v.x v4, x0");
    else
        e.line("vfmv.v.f v4, f0");
    e.line("mv x3, x5");
    e.line("li x14, " + S(bb));
    e.line("add x4, x14, x13");
    e.line("li x10, " + S(k));
    e.line("beq x10, x0, " + p + "kdone");
    e.label(p + "kx");
    if (dt == Dtype::Int32) {
        e.line("lw x8, 0(x3)");
        e.line("vle32.v v1, (x4)");
        e.line("vmul.vx v2, v1, x8");
        e.line("vadd.vv v4, v4, v2");
    } else {
        e.line("flw f1, 0(x3)");
        e.line("vle32.v v1, (x4)");
        e.line("vfmul.vf v2, v1, f1");
        e.line("vfadd.vv v4, v4, v2");
    }
    e.line("addi x3, x3, 4");
    e.line("addi x4, x4, " + S(n * 4));
    e.line("addi x10, x10, -1");
    e.line("bne x10, x0, " + p + "kx");
    e.label(p + "kdone");
    e.line("add x15, x11, x13");
    e.line("vse32.v v4, (x15)");
    e.line("slli x3, x2, 2");
    e.line("add x13, x13, x3");
    e.line("sub x7, x7, x2");
    e.line("bne x7, x0, " + p + "col");
    e.line("addi x5, x5, " + S(k * 4));
    e.line("addi x11, x11, " + S(n * 4));
    e.line("addi x12, x12, -1");
    e.line("bne x12, x0, " + p + "row");
    e.label(p + "done");
}

// One radix-2 DIT stage over the (already bit-reversed) arrays. The strip
// loop is flattened: contiguous stages take one "run" per butterfly group
// (walking j), strided stages take one run per j (walking groups). The
// run-end strip branches to its own copy of the store tail whose pointer
// rewinds all use precomputed deltas (x25/x26) so they fit in the slots
// around the queued stores. The first and last strips are peeled: the first
// carries the stage setup between its vector instructions, and the last
// carries the next stage's three-instruction head in its store slots when
// the caller fuses stages (single-issuer variants only; the dual variant
// must fence and barrier between stages, so it cannot fuse). Every strip
// executes exactly 21 vector instructions (vsetvli, 6 loads, 10 arithmetic
// ops, 4 stores), so fetch counts depend only on the trip count.
void emit_fft_stage(EmitCtx& e, const std::string& p, uint32_t re, uint32_t im,
                    uint32_t twre, uint32_t twim, uint32_t s, bool contiguous,
                    uint32_t g0, uint32_t gc, uint32_t j0, uint32_t jc,
                    uint32_t vlmax, bool fused_in, const uint32_t* next_avl) {
    uint32_t m = 1u << s;
    uint32_t half = m / 2;
    uint32_t runs = contiguous ? gc : jc;
    uint32_t avl = contiguous ? jc : gc;           // elements per run
    uint32_t vl = std::min(avl, vlmax);
    uint32_t sp = avl / vl;                        // strips per run
    uint32_t total = runs * sp;
    std::string ld = contiguous ? "vle32.v" : "vlse32.v";
    std::string st = contiguous ? "vse32.v" : "vsse32.v";
    std::string dsfx = contiguous ? "" : ", " + S(m * 4);
    std::string tsfx = contiguous ? "" : ", 0";  // strided j is fixed per run
    uint32_t shamt = contiguous ? 2 : s + 2;
    uint32_t base_re = re + (g0 * m + j0) * 4;
    uint32_t base_im = im + (g0 * m + j0) * 4;
    uint32_t twr = twre + j0 * 4;
    uint32_t twi = twim + j0 * 4;
    // rewind delta from each pointer's position in the run-end strip to its
    // start position for the next run (same value for all four pointers)
    int64_t delta = contiguous
                        ? static_cast<int64_t>((vl + half) * 4)
                        : 4 - static_cast<int64_t>(sp - 1) * vl * m * 4;

    auto strip_head = [&](bool peeled) {
        e.line("vsetvli x2, x7, e32");
        e.line(ld + " v1, (x8)" + dsfx);
        if (peeled) e.line("addi x10, x8, " + S(half * 4));
        e.line(ld + " v2, (x9)" + dsfx);
        if (peeled) e.line("addi x11, x9, " + S(half * 4));
        e.line(ld + " v3, (x10)" + dsfx);
        if (peeled) e.line("li x20, " + S(twr));
        e.line(ld + " v4, (x11)" + dsfx);
        if (peeled) e.line("li x21, " + S(twi));
        e.line(ld + " v5, (x20)" + tsfx);
        e.line(ld + " v6, (x21)" + tsfx);
        e.line("slli x3, x2, " + S(shamt));
        if (peeled && contiguous)
            e.line("li x26, " + S(-static_cast<int64_t>(sp - 1) * vl * 4));
        e.line("vfmul.vv v7, v5, v3");
        e.line("vfmul.vv v8, v6, v4");
        if (peeled) e.line("li x25, " + S(delta));
        e.line("vfsub.vv v7, v7, v8");
        e.line("vfmul.vv v8, v5, v4");
        if (peeled) e.line("li x24, " + S(sp));
        e.line("vfmul.vv v9, v6, v3");
        e.line("vfadd.vv v8, v8, v9");
        if (peeled) e.line("li x16, " + S(total - 1));
        e.line("vfadd.vv v10, v1, v7");
        e.line("vfadd.vv v11, v2, v8");
        e.line("vfsub.vv v12, v1, v7");
        e.line("vfsub.vv v13, v2, v8");
    };
    // final strip: plain stores, with the next stage's head (data pointers
    // and application vector length) issued in the slots between them
    auto fin_stores = [&] {
        e.line(st + " v10, (x8)" + dsfx);
        if (next_avl) e.line("li x8, " + S(re));
        e.line(st + " v11, (x9)" + dsfx);
        if (next_avl) e.line("li x9, " + S(im));
        e.line(st + " v12, (x10)" + dsfx);
        if (next_avl) e.line("li x7, " + S(*next_avl));
        e.line(st + " v13, (x11)" + dsfx);
    };

    if (!fused_in) {
        e.line("li x8, " + S(base_re));
        e.line("li x9, " + S(base_im));
        e.line("li x7, " + S(avl));
    }
    if (total == 1) {
        strip_head(true);
        fin_stores();
        return;
    }
    strip_head(true);
    e.line("jal x0, " + p + "split");
    e.label(p + "wrapc");
    e.line("li x24, " + S(sp));
    e.label(p + "s");
    strip_head(false);
    e.label(p + "split");
    e.line("addi x24, x24, -1");
    e.line("addi x16, x16, -1");
    e.line("beq x24, x0, " + p + "wrap");
    e.line(st + " v10, (x8)" + dsfx);
    e.line("add x8, x8, x3");
    e.line(st + " v11, (x9)" + dsfx);
    e.line("add x9, x9, x3");
    e.line(st + " v12, (x10)" + dsfx);
    e.line("add x10, x10, x3");
    e.line(st + " v13, (x11)" + dsfx);
    e.line("add x11, x11, x3");
    if (contiguous) {
        e.line("add x20, x20, x3");
        e.line("add x21, x21, x3");
    }
    e.line("bne x16, x0, " + p + "s");
    e.line("jal x0, " + p + "fin");
    e.label(p + "wrap");
    if (contiguous) {
        e.line("add x20, x20, x26");
        e.line("add x21, x21, x26");
    } else {
        e.line("addi x20, x20, 4");
        e.line("addi x21, x21, 4");
    }
    e.line(st + " v10, (x8)" + dsfx);
    e.line("add x8, x8, x25");
    e.line(st + " v11, (x9)" + dsfx);
    e.line("add x9, x9, x25");
    e.line(st + " v12, (x10)" + dsfx);
    e.line("add x10, x10, x25");
    e.line(st + " v13, (x11)" + dsfx);
    e.line("add x11, x11, x25");
    e.line("bne x16, x0, " + p + "wrapc");
    e.label(p + "fin");
    strip_head(false);
    fin_stores();
}

void emit_scalar_workload(EmitCtx& e, const std::string& p, const ScalarWorkloadSpec& spec,
                          uint32_t head, uint32_t msg, uint32_t fsmtab, uint32_t out) {
    e.line("li x30, " + S(spec.iterations));
    e.line("li x28, 24301");
    e.line("beq x30, x0, " + p + "store");
    e.label(p + "iter");
    e.line("li x20, " + S(head));
    e.line("li x21, 0");
    e.line("li x22, 0");
    e.label(p + "node");
    e.line("lw x23, 0(x20)");
    e.line("add x22, x22, x23");
    e.line("addi x21, x21, 1");
    e.line("lw x20, 4(x20)");
    e.line("bne x20, x0, " + p + "node");
    e.line("li x24, 0");
    e.line("li x20, " + S(msg));
    e.line("li x25, " + S(spec.msg_len));
    e.line("beq x25, x0, " + p + "crcdone");
    e.label(p + "byte");
    e.line("lw x23, 0(x20)");
    e.line("slli x23, x23, 8");
    e.line("xor x24, x24, x23");
    e.line("li x26, 8");
    e.label(p + "bit");
    e.line("li x27, 32768");
    e.line("and x29, x24, x27");
    e.line("slli x24, x24, 1");
    e.line("beq x29, x0, " + p + "nb");
    e.line("li x27, 32773");
    e.line("xor x24, x24, x27");
    e.label(p + "nb");
    e.line("li x27, 65535");
    e.line("and x24, x24, x27");
    e.line("addi x26, x26, -1");
    e.line("bne x26, x0, " + p + "bit");
    e.line("addi x20, x20, 4");
    e.line("addi x25, x25, -1");
    e.line("bne x25, x0, " + p + "byte");
    e.label(p + "crcdone");
    e.line("li x19, 0");
    e.line("li x20, " + S(msg));
    e.line("li x25, " + S(spec.msg_len));
    e.line("beq x25, x0, " + p + "fsmdone");
    e.label(p + "fsm");
    e.line("lw x23, 0(x20)");
    e.line("add x27, x19, x23");
    e.line("li x18, 15");
    e.line("and x27, x27, x18");
    e.line("slli x27, x27, 2");
    e.line("li x18, " + S(fsmtab));
    e.line("add x27, x27, x18");
    e.line("lw x19, 0(x27)");
    e.line("addi x20, x20, 4");
    e.line("addi x25, x25, -1");
    e.line("bne x25, x0, " + p + "fsm");
    e.label(p + "fsmdone");
    e.line("li x27, 33");
    e.line("mul x28, x28, x27");
    e.line("add x28, x28, x24");
    e.line("add x28, x28, x19");
    e.line("add x28, x28, x22");
    e.line("xor x28, x28, x21");
    e.line("addi x30, x30, -1");
    e.line("bne x30, x0, " + p + "iter");
    e.label(p + "store");
    e.line("li x20, " + S(out));
    e.line("sw x28, 0(x20)");
}

// scalar workload data image and host mirror
struct ScalarImage {
    std::map<uint32_t, std::vector<uint32_t>> data;
    uint32_t head = 0, msg = 0, fsmtab = 0, out = 0;
    std::vector<uint32_t> msg_bytes;
    std::vector<uint32_t> fsm_table;
    std::vector<uint32_t> node_values;  // in traversal order
};

ScalarImage build_scalar_image(const ScalarWorkloadSpec& spec) {
    ScalarImage img;
    std::mt19937_64 rng(spec.seed ^ 0x5ca1ab1eULL);
    uint32_t base = spec.region_base;
    img.out = base;
    uint32_t list = base + 64;
    img.msg = base + 256;
    img.fsmtab = base + 512;

    std::vector<uint32_t> perm(16);
    for (uint32_t i = 0; i < 16; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    std::uniform_int_distribution<int32_t> dval(-1000, 1000);
    std::vector<uint32_t> nodes(32, 0);
    for (uint32_t i = 0; i < 16; ++i) {
        uint32_t slot = perm[i];
        uint32_t value = static_cast<uint32_t>(dval(rng));
        uint32_t next = i + 1 < 16 ? list + perm[i + 1] * 8 : 0;
        nodes[slot * 2] = value;
        nodes[slot * 2 + 1] = next;
        img.node_values.push_back(value);
    }
    img.head = list + perm[0] * 8;
    img.data[list] = nodes;

    std::uniform_int_distribution<uint32_t> dbyte(0, 255);
    img.msg_bytes.resize(spec.msg_len);
    for (auto& b : img.msg_bytes) b = dbyte(rng);
    if (spec.msg_len > 0) img.data[img.msg] = img.msg_bytes;

    std::uniform_int_distribution<uint32_t> dstate(0, 15);
    img.fsm_table.resize(16);
    for (auto& s : img.fsm_table) s = dstate(rng);
    img.data[img.fsmtab] = img.fsm_table;
    return img;
}

ScalarOracle run_scalar_oracle(const ScalarWorkloadSpec& spec, const ScalarImage& img) {
    ScalarOracle o;
    uint32_t checksum = 24301;
    uint32_t crc = 0, state = 0, visits = 0, list_sum = 0;
    for (uint64_t it = 0; it < spec.iterations; ++it) {
        visits = 0;
        list_sum = 0;
        for (uint32_t v : img.node_values) {
            list_sum += v;
            ++visits;
        }
        crc = 0;
        for (uint32_t byte : img.msg_bytes) {
            crc ^= (byte << 8) & 0xFFFFu;
            for (int b = 0; b < 8; ++b) {
                uint32_t top = crc & 0x8000u;
                crc <<= 1;
                if (top) crc ^= 0x8005u;
                crc &= 0xFFFFu;
            }
        }
        state = 0;
        for (uint32_t byte : img.msg_bytes) state = img.fsm_table[(state + byte) & 15u];
        checksum = checksum * 33u + crc + state + list_sum;
        checksum ^= visits;
    }
    o.checksum = checksum;
    o.crc = crc;
    o.list_visits = spec.iterations > 0 ? visits : 0;
    o.list_sum = list_sum;
    o.fsm_state = state;
    return o;
}

// fft stage plan shared by emitter and generator
struct StagePlan {
    uint32_t s;
    bool contiguous;
};

std::vector<StagePlan> fft_plan(uint32_t n, uint32_t vlmax_eff) {
    std::vector<StagePlan> plan;
    uint32_t stages = log2u(n);
    for (uint32_t s = 1; s <= stages; ++s) {
        uint32_t half = 1u << (s - 1);
        plan.push_back({s, half >= vlmax_eff});
    }
    return plan;
}

}  // namespace

// ---- names ------------------------------------------------------------------

const char* to_string(KernelName k) {
    switch (k) {
        case KernelName::Axpy: return "axpy";
        case KernelName::Dotp: return "dotp";
        case KernelName::Matmul: return "matmul";
        case KernelName::Fir: return "fir";
        case KernelName::Relu: return "relu";
        case KernelName::Fft: return "fft";
    }
    return "?";
}

const char* to_string(Variant v) {
    switch (v) {
        case Variant::SplitSingle: return "split-single";
        case Variant::SplitDual: return "split-dual";
        case Variant::MergeSingle: return "merge";
    }
    return "?";
}

const char* to_string(Dtype d) { return d == Dtype::Int32 ? "int32" : "fp32"; }

std::optional<KernelName> kernel_from_string(const std::string& s) {
    for (KernelName k : {KernelName::Axpy, KernelName::Dotp, KernelName::Matmul,
                         KernelName::Fir, KernelName::Relu, KernelName::Fft})
        if (s == to_string(k)) return k;
    return std::nullopt;
}

std::optional<Variant> variant_from_string(const std::string& s) {
    for (Variant v : {Variant::SplitSingle, Variant::SplitDual, Variant::MergeSingle})
        if (s == to_string(v)) return v;
    return std::nullopt;
}

std::optional<Dtype> dtype_from_string(const std::string& s) {
    if (s == "int32") return Dtype::Int32;
    if (s == "fp32") return Dtype::Fp32;
    return std::nullopt;
}

KernelSpec KernelSpec::defaults(KernelName name) {
    KernelSpec sp;
    sp.name = name;
    switch (name) {
        case KernelName::Axpy:
        case KernelName::Dotp:
        case KernelName::Relu:
            sp.n = 4096;
            sp.dtype = Dtype::Int32;
            break;
        case KernelName::Fir:
            sp.n = 4096;
            sp.taps = 16;
            sp.dtype = Dtype::Fp32;
            break;
        case KernelName::Matmul:
            sp.m = 64;
            sp.k = 64;
            sp.n = 64;
            sp.dtype = Dtype::Int32;
            break;
        case KernelName::Fft:
            sp.n = 1024;
            sp.dtype = Dtype::Fp32;
            break;
    }
    return sp;
}

void KernelSpec::validate() const {
    if (name == KernelName::Fft) {
        if (dtype != Dtype::Fp32)
            throw std::invalid_argument("fft requires fp32");
        if (n < 8 || (n & (n - 1)) != 0)
            throw std::invalid_argument("fft requires n a power of two >= 8");
    }
    if (name == KernelName::Fir && taps == 0)
        throw std::invalid_argument("fir requires taps > 0");
}

std::string KernelSpec::problem() const {
    switch (name) {
        case KernelName::Matmul:
            return "m=" + S(m) + " k=" + S(k) + " n=" + S(n);
        case KernelName::Fir:
            return "n=" + S(n) + " taps=" + S(taps);
        default:
            return "n=" + S(n);
    }
}

// ---- oracles ----------------------------------------------------------------

void oracle_axpy_i32(int32_t a, const std::vector<int32_t>& x, std::vector<int32_t>& y) {
    for (size_t i = 0; i < y.size(); ++i)
        y[i] = static_cast<int32_t>(static_cast<uint32_t>(a) * static_cast<uint32_t>(x[i]) +
                                    static_cast<uint32_t>(y[i]));
}

void oracle_axpy_f32(float a, const std::vector<float>& x, std::vector<float>& y) {
    for (size_t i = 0; i < y.size(); ++i) {
        float prod = a * x[i];
        y[i] = y[i] + prod;
    }
}

int32_t oracle_dotp_i32(const std::vector<int32_t>& x, const std::vector<int32_t>& y) {
    uint32_t acc = 0;
    for (size_t i = 0; i < x.size(); ++i)
        acc += static_cast<uint32_t>(x[i]) * static_cast<uint32_t>(y[i]);
    return static_cast<int32_t>(acc);
}

double oracle_dotp_f64(const std::vector<float>& x, const std::vector<float>& y) {
    double acc = 0.0;
    for (size_t i = 0; i < x.size(); ++i)
        acc += static_cast<double>(x[i]) * static_cast<double>(y[i]);
    return acc;
}

void oracle_matmul_i32(const std::vector<int32_t>& a, const std::vector<int32_t>& b,
                       std::vector<int32_t>& c, uint32_t m, uint32_t k, uint32_t n) {
    c.assign(static_cast<size_t>(m) * n, 0);
    for (uint32_t i = 0; i < m; ++i)
        for (uint32_t j = 0; j < n; ++j) {
            uint32_t acc = 0;
            for (uint32_t p = 0; p < k; ++p)
                acc += static_cast<uint32_t>(a[i * k + p]) *
                       static_cast<uint32_t>(b[p * n + j]);
            c[i * n + j] = static_cast<int32_t>(acc);
        }
}

void oracle_matmul_f32(const std::vector<float>& a, const std::vector<float>& b,
                       std::vector<float>& c, uint32_t m, uint32_t k, uint32_t n) {
    c.assign(static_cast<size_t>(m) * n, 0.0f);
    for (uint32_t i = 0; i < m; ++i)
        for (uint32_t j = 0; j < n; ++j) {
            float acc = 0.0f;
            for (uint32_t p = 0; p < k; ++p) {
                float prod = a[i * k + p] * b[p * n + j];
                acc = acc + prod;
            }
            c[i * n + j] = acc;
        }
}

void oracle_relu_i32(const std::vector<int32_t>& x, std::vector<int32_t>& y) {
    y.resize(x.size());
    for (size_t i = 0; i < x.size(); ++i) y[i] = std::max(x[i], 0);
}

void oracle_relu_f32(const std::vector<float>& x, std::vector<float>& y) {
    y.resize(x.size());
    // matches the integer compare the kernel uses: sign bit set -> zero
    for (size_t i = 0; i < x.size(); ++i)
        y[i] = static_cast<int32_t>(std::bit_cast<uint32_t>(x[i])) < 0 ? 0.0f : x[i];
}

void oracle_fir_i32(const std::vector<int32_t>& x, const std::vector<int32_t>& h,
                    std::vector<int32_t>& y, uint32_t n) {
    y.assign(n, 0);
    for (uint32_t i = 0; i < n; ++i) {
        uint32_t acc = 0;
        for (size_t t = 0; t < h.size(); ++t)
            acc += static_cast<uint32_t>(h[t]) * static_cast<uint32_t>(x[i + t]);
        y[i] = static_cast<int32_t>(acc);
    }
}

void oracle_fir_f32(const std::vector<float>& x, const std::vector<float>& h,
                    std::vector<float>& y, uint32_t n) {
    y.assign(n, 0.0f);
    for (uint32_t i = 0; i < n; ++i) {
        float acc = 0.0f;
        for (size_t t = 0; t < h.size(); ++t) {
            float prod = h[t] * x[i + t];
            acc = acc + prod;
        }
        y[i] = acc;
    }
}

uint32_t bit_reverse(uint32_t v, uint32_t bits) {
    uint32_t out = 0;
    for (uint32_t i = 0; i < bits; ++i)
        if (v & (1u << i)) out |= 1u << (bits - 1 - i);
    return out;
}

std::vector<std::complex<double>> oracle_fft(const std::vector<std::complex<double>>& x) {
    uint32_t n = static_cast<uint32_t>(x.size());
    uint32_t bits = log2u(n);
    std::vector<std::complex<double>> a(n);
    for (uint32_t i = 0; i < n; ++i) a[bit_reverse(i, bits)] = x[i];
    for (uint32_t s = 1; s <= bits; ++s) {
        uint32_t m = 1u << s;
        uint32_t half = m / 2;
        for (uint32_t g = 0; g < n; g += m)
            for (uint32_t j = 0; j < half; ++j) {
                std::complex<double> w =
                    std::polar(1.0, -2.0 * std::numbers::pi * j / m);
                std::complex<double> t = w * a[g + j + half];
                std::complex<double> e = a[g + j];
                a[g + j] = e + t;
                a[g + j + half] = e - t;
            }
    }
    return a;
}

std::vector<std::complex<double>> naive_dft(const std::vector<std::complex<double>>& x) {
    size_t n = x.size();
    std::vector<std::complex<double>> out(n);
    for (size_t k = 0; k < n; ++k) {
        std::complex<double> acc = 0.0;
        for (size_t j = 0; j < n; ++j)
            acc += x[j] * std::polar(1.0, -2.0 * std::numbers::pi *
                                              static_cast<double>(k * j % n) /
                                              static_cast<double>(n));
        out[k] = acc;
    }
    return out;
}

ScalarOracle oracle_scalar(const ScalarWorkloadSpec& spec) {
    ScalarImage img = build_scalar_image(spec);
    return run_scalar_oracle(spec, img);
}

// ---- generators -------------------------------------------------------------

namespace {

struct KernelPieces {
    std::string core_text[2];  // body text per core (no halt/fences)
    bool uses_core1 = false;
    std::map<uint32_t, std::vector<uint32_t>> data;
    std::vector<CheckRegion> checks;
    uint32_t extent = 0;  // bytes used from address 0
    // dual-variant epilogue for core 0 (after the barrier), e.g. dotp combine
    std::string core0_epilogue;
};

void require_fits(uint32_t extent, uint32_t limit, const std::string& what) {
    if (extent > limit)
        throw std::invalid_argument(what + " needs " + S(extent) +
                                    " bytes but only " + S(limit) + " are available");
}

KernelPieces build_kernel(const KernelSpec& spec, const ClusterConfig& cfg,
                          uint32_t mem_limit) {
    spec.validate();
    KernelPieces kp;
    std::mt19937_64 rng(spec.seed);
    bool dual = spec.variant == Variant::SplitDual;
    uint32_t n = spec.n;
    EmitCtx e0, e1;

    switch (spec.name) {
        case KernelName::Axpy: {
            uint32_t xb = 0, yb = 4 * n, aaddr = 8 * n;
            kp.extent = 8 * n + 4;
            require_fits(kp.extent, mem_limit, "axpy");
            if (spec.dtype == Dtype::Int32) {
                auto x = random_i32(rng, n, -64, 63);
                auto y = random_i32(rng, n, -64, 63);
                int32_t a = random_i32(rng, 1, -8, 8)[0];
                if (n) kp.data[xb] = words_of(x);
                if (n) kp.data[yb] = words_of(y);
                auto expect = y;
                oracle_axpy_i32(a, x, expect);
                kp.checks.push_back({"y", yb, words_of(expect), false, 0.0, 0.0});
                uint32_t c0 = dual ? (n + 1) / 2 : n;
                emit_axpy(e0, "k0_", spec.dtype, xb, yb, c0, a, aaddr);
                if (dual)
                    emit_axpy(e1, "k1_", spec.dtype, xb + 4 * c0, yb + 4 * c0, n - c0, a,
                              aaddr);
            } else {
                auto x = random_f32(rng, n, -1.0f, 1.0f);
                auto y = random_f32(rng, n, -1.0f, 1.0f);
                float a = random_f32(rng, 1, -1.0f, 1.0f)[0];
                if (n) kp.data[xb] = words_of(x);
                if (n) kp.data[yb] = words_of(y);
                kp.data[aaddr] = {fbits(a)};
                auto expect = y;
                oracle_axpy_f32(a, x, expect);
                kp.checks.push_back({"y", yb, words_of(expect), true, 1e-5, 1e-6});
                uint32_t c0 = dual ? (n + 1) / 2 : n;
                emit_axpy(e0, "k0_", spec.dtype, xb, yb, c0, 0, aaddr);
                if (dual)
                    emit_axpy(e1, "k1_", spec.dtype, xb + 4 * c0, yb + 4 * c0, n - c0, 0,
                              aaddr);
            }
            break;
        }
        case KernelName::Dotp: {
            uint32_t xb = 0, yb = 4 * n, res = 8 * n, p0 = res + 256, p1 = res + 512;
            kp.extent = res + 768;
            require_fits(kp.extent, mem_limit, "dotp");
            uint32_t c0 = dual ? (n + 1) / 2 : n;
            if (spec.dtype == Dtype::Int32) {
                auto x = random_i32(rng, n, -64, 63);
                auto y = random_i32(rng, n, -64, 63);
                if (n) kp.data[xb] = words_of(x);
                if (n) kp.data[yb] = words_of(y);
                int32_t total = oracle_dotp_i32(x, y);
                kp.checks.push_back(
                    {"result", res, {static_cast<uint32_t>(total)}, false, 0.0, 0.0});
            } else {
                auto x = random_f32(rng, n, 0.0f, 1.0f);
                auto y = random_f32(rng, n, 0.0f, 1.0f);
                if (n) kp.data[xb] = words_of(x);
                if (n) kp.data[yb] = words_of(y);
                float total = static_cast<float>(oracle_dotp_f64(x, y));
                kp.checks.push_back({"result", res, {fbits(total)}, true, 1e-4, 1e-3});
            }
            if (!dual) {
                emit_dotp(e0, "k0_", spec.dtype, xb, yb, res, n);
            } else {
                emit_dotp(e0, "k0_", spec.dtype, xb, yb, p0, c0);
                emit_dotp(e1, "k1_", spec.dtype, xb + 4 * c0, yb + 4 * c0, p1, n - c0);
                EmitCtx ep;
                ep.line("li x9, " + S(p0));
                ep.line("li x10, " + S(p1));
                if (spec.dtype == Dtype::Int32) {
                    ep.line("lw x11, 0(x9)");
                    ep.line("lw x12, 0(x10)");
                    ep.line("add x11, x11, x12");
                    ep.line("li x9, " + S(res));
                    ep.line("sw x11, 0(x9)");
                } else {
                    ep.line("flw f1, 0(x9)");
                    ep.line("flw f2, 0(x10)");
                    ep.line("fadd.s f1, f1, f2");
                    ep.line("li x9, " + S(res));
                    ep.line("fsw f1, 0(x9)");
                }
                kp.core0_epilogue = ep.text;
            }
            break;
        }
        case KernelName::Relu: {
            uint32_t xb = 0, yb = 4 * n;
            kp.extent = 8 * n;
            require_fits(kp.extent, mem_limit, "relu");
            uint32_t c0 = dual ? (n + 1) / 2 : n;
            if (spec.dtype == Dtype::Int32) {
                auto x = random_i32(rng, n, -1000, 1000);
                if (n) kp.data[xb] = words_of(x);
                std::vector<int32_t> expect;
                oracle_relu_i32(x, expect);
                kp.checks.push_back({"y", yb, words_of(expect), false, 0.0, 0.0});
            } else {
                auto x = random_f32(rng, n, -1.0f, 1.0f);
                if (n) kp.data[xb] = words_of(x);
                std::vector<float> expect;
                oracle_relu_f32(x, expect);
                kp.checks.push_back({"y", yb, words_of(expect), true, 0.0, 1e-6});
            }
            emit_relu(e0, "k0_", xb, yb, c0);
            if (dual) emit_relu(e1, "k1_", xb + 4 * c0, yb + 4 * c0, n - c0);
            break;
        }
        case KernelName::Fir: {
            uint32_t taps = spec.taps;
            uint32_t xlen = n + taps;  // one tap of slack keeps halves word-aligned
            uint32_t xb = 0, hb = 4 * xlen, yb = hb + 4 * taps;
            kp.extent = yb + 4 * n;
            require_fits(kp.extent, mem_limit, "fir");
            uint32_t c0 = dual ? (n + 1) / 2 : n;
            if (spec.dtype == Dtype::Int32) {
                auto x = random_i32(rng, xlen, -32, 31);
                auto h = random_i32(rng, taps, -8, 8);
                kp.data[xb] = words_of(x);
                kp.data[hb] = words_of(h);
                std::vector<int32_t> expect;
                oracle_fir_i32(x, h, expect, n);
                kp.checks.push_back({"y", yb, words_of(expect), false, 0.0, 0.0});
            } else {
                auto x = random_f32(rng, xlen, -1.0f, 1.0f);
                auto h = random_f32(rng, taps, -1.0f, 1.0f);
                kp.data[xb] = words_of(x);
                kp.data[hb] = words_of(h);
                std::vector<float> expect;
                oracle_fir_f32(x, h, expect, n);
                kp.checks.push_back({"y", yb, words_of(expect), true, 1e-5, 1e-5});
            }
            emit_fir(e0, "k0_", spec.dtype, xb, yb, hb, taps, c0);
            if (dual)
                emit_fir(e1, "k1_", spec.dtype, xb + 4 * c0, yb + 4 * c0, hb, taps, n - c0);
            break;
        }
        case KernelName::Matmul: {
            uint32_t m = spec.m, k = spec.k, cols = spec.n;
            uint32_t ab = 0, bb = 4 * m * k, cb = bb + 4 * k * cols;
            kp.extent = cb + 4 * m * cols;
            require_fits(kp.extent, mem_limit, "matmul");
            uint32_t r0 = dual ? (m + 1) / 2 : m;
            if (spec.dtype == Dtype::Int32) {
                auto a = random_i32(rng, static_cast<size_t>(m) * k, -16, 15);
                auto b = random_i32(rng, static_cast<size_t>(k) * cols, -16, 15);
                if (!a.empty()) kp.data[ab] = words_of(a);
                if (!b.empty()) kp.data[bb] = words_of(b);
                std::vector<int32_t> expect;
                oracle_matmul_i32(a, b, expect, m, k, cols);
                kp.checks.push_back({"c", cb, words_of(expect), false, 0.0, 0.0});
            } else {
                auto a = random_f32(rng, static_cast<size_t>(m) * k, -1.0f, 1.0f);
                auto b = random_f32(rng, static_cast<size_t>(k) * cols, -1.0f, 1.0f);
                if (!a.empty()) kp.data[ab] = words_of(a);
                if (!b.empty()) kp.data[bb] = words_of(b);
                std::vector<float> expect;
                oracle_matmul_f32(a, b, expect, m, k, cols);
                kp.checks.push_back({"c", cb, words_of(expect), true, 1e-5, 1e-5});
            }
            emit_matmul(e0, "k0_", spec.dtype, ab, bb, cb, r0, k, cols);
            if (dual)
                emit_matmul(e1, "k1_", spec.dtype, ab + 4 * r0 * k, bb, cb + 4 * r0 * cols,
                            m - r0, k, cols);
            break;
        }
        case KernelName::Fft: {
            uint32_t bits = log2u(n);
            uint32_t re = 0, im = 4 * n;
            uint32_t cursor = 8 * n;
            std::vector<uint32_t> twre(bits + 1), twim(bits + 1);
            for (uint32_t s = 1; s <= bits; ++s) {
                uint32_t half = 1u << (s - 1);
                twre[s] = cursor;
                cursor += 4 * half;
                twim[s] = cursor;
                cursor += 4 * half;
            }
            kp.extent = cursor;
            require_fits(kp.extent, mem_limit, "fft");

            auto xr = random_f32(rng, n, -1.0f, 1.0f);
            auto xi = random_f32(rng, n, -1.0f, 1.0f);
            std::vector<std::complex<double>> input(n);
            for (uint32_t i = 0; i < n; ++i) input[i] = {xr[i], xi[i]};
            // program sees the input already bit-reverse permuted
            std::vector<float> br_re(n), br_im(n);
            for (uint32_t i = 0; i < n; ++i) {
                uint32_t d = bit_reverse(i, bits);
                br_re[d] = xr[i];
                br_im[d] = xi[i];
            }
            kp.data[re] = words_of(br_re);
            kp.data[im] = words_of(br_im);
            for (uint32_t s = 1; s <= bits; ++s) {
                uint32_t half = 1u << (s - 1);
                std::vector<float> wr(half), wi(half);
                for (uint32_t j = 0; j < half; ++j) {
                    auto w = std::polar(1.0, -2.0 * std::numbers::pi * j / (1u << s));
                    wr[j] = static_cast<float>(w.real());
                    wi[j] = static_cast<float>(w.imag());
                }
                kp.data[twre[s]] = words_of(wr);
                kp.data[twim[s]] = words_of(wi);
            }

            auto spectrum = oracle_fft(input);
            std::vector<float> er(n), ei(n);
            double maxabs = 0.0;
            for (uint32_t i = 0; i < n; ++i) {
                er[i] = static_cast<float>(spectrum[i].real());
                ei[i] = static_cast<float>(spectrum[i].imag());
                maxabs = std::max({maxabs, std::abs(spectrum[i].real()),
                                   std::abs(spectrum[i].imag())});
            }
            double floor = std::max(1e-3 * maxabs, 1e-4);
            kp.checks.push_back({"bin", re, words_of(er), true, 1e-5, floor, im,
                                 words_of(ei)});

            uint32_t vlmax_eff = cfg.vlmax_unit() *
                                 (spec.variant == Variant::MergeSingle ? 2 : 1);
            auto plan = fft_plan(n, vlmax_eff);
            for (size_t pi = 0; pi < plan.size(); ++pi) {
                const auto& st = plan[pi];
                uint32_t m2 = 1u << st.s;
                uint32_t half = m2 / 2;
                uint32_t groups = n / m2;
                std::string tag0 = "k0_s" + S(st.s) + "_";
                std::string tag1 = "k1_s" + S(st.s) + "_";
                if (!dual) {
                    // chain the stages: the next stage's head rides in the
                    // final strip's store slots, so the issue stream never
                    // breaks between stages
                    uint32_t next_avl = 0;
                    bool have_next = pi + 1 < plan.size();
                    if (have_next) {
                        const auto& nx = plan[pi + 1];
                        uint32_t nhalf = (1u << nx.s) / 2;
                        next_avl = nx.contiguous ? nhalf : n / (1u << nx.s);
                    }
                    emit_fft_stage(e0, tag0, re, im, twre[st.s], twim[st.s], st.s,
                                   st.contiguous, 0, groups, 0, half, vlmax_eff,
                                   pi > 0, have_next ? &next_avl : nullptr);
                } else {
                    // partition each stage's butterfly groups between the
                    // cores (each core keeps whole groups so its loop body
                    // and twiddle walk match the single-core code), then
                    // synchronize before the next stage; the final stage is
                    // a single group and falls to core 0 alone
                    if (groups >= 2) {
                        emit_fft_stage(e0, tag0, re, im, twre[st.s], twim[st.s], st.s,
                                       st.contiguous, 0, groups / 2, 0, half, vlmax_eff, false, nullptr);
                        emit_fft_stage(e1, tag1, re, im, twre[st.s], twim[st.s], st.s,
                                       st.contiguous, groups / 2, groups / 2, 0, half, vlmax_eff, false, nullptr);
                    } else {
                        emit_fft_stage(e0, tag0, re, im, twre[st.s], twim[st.s], st.s,
                                       st.contiguous, 0, 1, 0, half, vlmax_eff, false, nullptr);
                    }
                    e0.line("fence.vec");
                    e0.line("barrier");
                    e1.line("fence.vec");
                    e1.line("barrier");
                }
            }
            break;
        }
    }

    kp.core_text[0] = e0.text;
    kp.core_text[1] = e1.text;
    kp.uses_core1 = dual;
    return kp;
}

Program assemble_pieces(const std::string& source,
                        const std::map<uint32_t, std::vector<uint32_t>>& data) {
    Program prog = assemble(source);
    prog.data = data;
    return prog;
}

}  // namespace

GeneratedKernel generate_kernel(const KernelSpec& spec, const ClusterConfig& cfg) {
    KernelPieces kp = build_kernel(spec, cfg, cfg.scratchpad_bytes);
    GeneratedKernel out;
    std::string src = ".entry 0 k0_entry\n";
    if (kp.uses_core1) src += ".entry 1 k1_entry\n";
    src += "k0_entry:\n" + kp.core_text[0];
    if (kp.uses_core1) {
        bool fft = spec.name == KernelName::Fft;  // fft already barriers per stage
        if (!fft) src += "  fence.vec\n  barrier\n";
        src += kp.core0_epilogue;
        src += "  halt\n";
        src += "k1_entry:\n" + kp.core_text[1];
        if (!fft) src += "  fence.vec\n  barrier\n";
        src += "  halt\n";
    } else {
        src += "  halt\n";
    }
    out.program = assemble_pieces(src, kp.data);
    out.checks = std::move(kp.checks);
    out.required_mode =
        spec.variant == Variant::MergeSingle ? Mode::merge(0) : Mode::split();
    out.problem = spec.problem();
    out.dtype = to_string(spec.dtype);
    return out;
}

GeneratedScalar generate_scalar_workload(const ScalarWorkloadSpec& spec) {
    ScalarImage img = build_scalar_image(spec);
    EmitCtx e;
    emit_scalar_workload(e, "s0_", spec, img.head, img.msg, img.fsmtab, img.out);
    std::string src = ".entry 0 s0_entry\ns0_entry:\n" + e.text + "  halt\n";
    GeneratedScalar out;
    out.program = assemble_pieces(src, img.data);
    out.out_addr = img.out;
    out.oracle = run_scalar_oracle(spec, img);
    out.checks.push_back({"scalar_checksum", img.out, {out.oracle.checksum}, false, 0.0, 0.0});
    return out;
}

GeneratedMixed generate_mixed(const KernelSpec& kernel, const ScalarWorkloadSpec& scalar,
                              const ClusterConfig& cfg) {
    if (scalar.region_base + 1024 > cfg.scratchpad_bytes)
        throw std::invalid_argument("scalar workload region does not fit the scratchpad");
    ScalarImage img = build_scalar_image(scalar);
    EmitCtx es;
    emit_scalar_workload(es, "s1_", scalar, img.head, img.msg, img.fsmtab, img.out);
    ScalarOracle so = run_scalar_oracle(scalar, img);

    GeneratedMixed out;
    out.problem = kernel.problem() + " iters=" + S(scalar.iterations);

    if (kernel.n == 0) {
        // degenerate: no vector work, both layouts run only the scalar task
        std::string src = ".entry 0 k0_entry\n.entry 1 c1_entry\nk0_entry:\n  halt\n"
                          "c1_entry:\n" + es.text + "  halt\n";
        out.split_program = assemble_pieces(src, img.data);
        out.merge_program = out.split_program;
        out.checks.push_back({"scalar_checksum", img.out, {so.checksum}, false, 0.0, 0.0});
        return out;
    }

    for (int layout = 0; layout < 2; ++layout) {
        KernelSpec ks = kernel;
        ks.variant = layout == 0 ? Variant::SplitDual : Variant::MergeSingle;
        KernelPieces kp = build_kernel(ks, cfg, scalar.region_base);
        for (const auto& [addr, words] : img.data)
            if (kp.data.count(addr))
                throw std::invalid_argument("kernel and scalar regions overlap");
        bool fft = kernel.name == KernelName::Fft;  // fft barriers per stage already
        std::string src = ".entry 0 k0_entry\n.entry 1 c1_entry\n";
        src += "k0_entry:\n";
        if (layout == 1) src += "  modeswitch merge 0\n";
        src += kp.core_text[0];
        if (layout == 0) {
            if (!fft) src += "  fence.vec\n  barrier\n";
            src += kp.core0_epilogue;
        }
        src += "  halt\n";
        src += "c1_entry:\n";
        if (layout == 0) {
            src += kp.core_text[1];
            if (!fft) src += "  fence.vec\n  barrier\n";
        }
        src += es.text + "  halt\n";
        auto data = kp.data;
        for (const auto& [addr, words] : img.data) data[addr] = words;
        Program prog = assemble_pieces(src, data);
        if (layout == 0) {
            out.split_program = std::move(prog);
            out.checks = kp.checks;
            out.checks.push_back(
                {"scalar_checksum", img.out, {so.checksum}, false, 0.0, 0.0});
        } else {
            out.merge_program = std::move(prog);
        }
    }
    return out;
}

uint32_t crc16(const std::vector<uint8_t>& bytes) {
    uint32_t crc = 0;
    for (uint8_t byte : bytes) {
        crc ^= (static_cast<uint32_t>(byte) << 8) & 0xFFFFu;
        for (int b = 0; b < 8; ++b) {
            uint32_t top = crc & 0x8000u;
            crc <<= 1;
            if (top) crc ^= 0x8005u;
            crc &= 0xFFFFu;
        }
    }
    return crc;
}

}  // namespace spatzsim
