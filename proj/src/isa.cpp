#include "spatzsim/isa.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>
#include <sstream>

namespace spatzsim {

namespace {

// Operand layout classes; one per textual shape.
enum class Fmt {
    None,     // halt
    Li,       // li xd, imm
    Mv,       // mv xd, xs
    R3x,      // add xd, xs, xs
    R3f,      // fadd.s fd, fs, fs
    I2,       // addi xd, xs, imm (also slli/srli/jalr)
    MemL,     // lw xd, imm(xs)
    MemS,     // sw xs2, imm(xs1)
    MemLf,    // flw fd, imm(xs)
    MemSf,    // fsw fs2, imm(xs1)
    Br,       // beq xs, xs, label
    Jal,      // jal xd, label
    Csr,      // csrr xd, vl
    ModeSw,   // modeswitch split | merge <core>
    Vset,     // vsetvli xd, xs, e32
    VMemU,    // vle32.v vd, (xs)
    VMemS,    // vlse32.v vd, (xs), stride
    Vvv,      // vadd.vv vd, va, vb
    Vvx,      // vadd.vx vd, va, xs
    Vvf,      // vfmul.vf vd, va, fs
    Vmvx,     // vmv.v.x vd, xs
    Vmvf,     // vfmv.v.f vd, fs
    Vred,     // vredsum.vs vd, vs, vseed
};

struct OpInfo {
    Opcode op;
    const char* name;
    Fmt fmt;
};

constexpr OpInfo kOps[] = {
    {Opcode::Li, "li", Fmt::Li},
    {Opcode::Mv, "mv", Fmt::Mv},
    {Opcode::Add, "add", Fmt::R3x},
    {Opcode::Addi, "addi", Fmt::I2},
    {Opcode::Sub, "sub", Fmt::R3x},
    {Opcode::Mul, "mul", Fmt::R3x},
    {Opcode::And, "and", Fmt::R3x},
    {Opcode::Or, "or", Fmt::R3x},
    {Opcode::Xor, "xor", Fmt::R3x},
    {Opcode::Slli, "slli", Fmt::I2},
    {Opcode::Srli, "srli", Fmt::I2},
    {Opcode::Lw, "lw", Fmt::MemL},
    {Opcode::Sw, "sw", Fmt::MemS},
    {Opcode::Beq, "beq", Fmt::Br},
    {Opcode::Bne, "bne", Fmt::Br},
    {Opcode::Blt, "blt", Fmt::Br},
    {Opcode::Bge, "bge", Fmt::Br},
    {Opcode::Jal, "jal", Fmt::Jal},
    {Opcode::Jalr, "jalr", Fmt::I2},
    {Opcode::CsrrVl, "csrr", Fmt::Csr},
    {Opcode::FaddS, "fadd.s", Fmt::R3f},
    {Opcode::FmulS, "fmul.s", Fmt::R3f},
    {Opcode::Flw, "flw", Fmt::MemLf},
    {Opcode::Fsw, "fsw", Fmt::MemSf},
    {Opcode::FenceVec, "fence.vec", Fmt::None},
    {Opcode::Barrier, "barrier", Fmt::None},
    {Opcode::Modeswitch, "modeswitch", Fmt::ModeSw},
    {Opcode::Halt, "halt", Fmt::None},
    {Opcode::Nop, "nop", Fmt::None},
    {Opcode::Vsetvli, "vsetvli", Fmt::Vset},
    {Opcode::Vle32, "vle32.v", Fmt::VMemU},
    {Opcode::Vse32, "vse32.v", Fmt::VMemU},
    {Opcode::Vlse32, "vlse32.v", Fmt::VMemS},
    {Opcode::Vsse32, "vsse32.v", Fmt::VMemS},
    {Opcode::VaddVV, "vadd.vv", Fmt::Vvv},
    {Opcode::VsubVV, "vsub.vv", Fmt::Vvv},
    {Opcode::VmulVV, "vmul.vv", Fmt::Vvv},
    {Opcode::VmaccVV, "vmacc.vv", Fmt::Vvv},
    {Opcode::VaddVX, "vadd.vx", Fmt::Vvx},
    {Opcode::VmulVX, "vmul.vx", Fmt::Vvx},
    {Opcode::VfaddVV, "vfadd.vv", Fmt::Vvv},
    {Opcode::VfsubVV, "vfsub.vv", Fmt::Vvv},
    {Opcode::VfmulVV, "vfmul.vv", Fmt::Vvv},
    {Opcode::VfmaccVV, "vfmacc.vv", Fmt::Vvv},
    {Opcode::VfmulVF, "vfmul.vf", Fmt::Vvf},
    {Opcode::VmvVX, "vmv.v.x", Fmt::Vmvx},
    {Opcode::VfmvVF, "vfmv.v.f", Fmt::Vmvf},
    {Opcode::VredsumVS, "vredsum.vs", Fmt::Vred},
    {Opcode::VfredsumVS, "vfredsum.vs", Fmt::Vred},
    {Opcode::VmaxVX, "vmax.vx", Fmt::Vvx},
};

const OpInfo& info(Opcode op) {
    for (const auto& i : kOps)
        if (i.op == op) return i;
    throw std::logic_error("unknown opcode");
}

const OpInfo* lookup(const std::string& name) {
    for (const auto& i : kOps)
        if (name == i.name) return &i;
    return nullptr;
}

}  // namespace

const char* mnemonic(Opcode op) { return info(op).name; }

bool is_vector(Opcode op) { return op >= Opcode::Vsetvli; }

bool is_vector_mem(Opcode op) {
    return op == Opcode::Vle32 || op == Opcode::Vse32 || op == Opcode::Vlse32 ||
           op == Opcode::Vsse32;
}

bool is_vector_load(Opcode op) {
    return op == Opcode::Vle32 || op == Opcode::Vlse32;
}

bool is_vector_store(Opcode op) {
    return op == Opcode::Vse32 || op == Opcode::Vsse32;
}

bool is_vector_strided(Opcode op) {
    return op == Opcode::Vlse32 || op == Opcode::Vsse32;
}

bool is_reduction(Opcode op) {
    return op == Opcode::VredsumVS || op == Opcode::VfredsumVS;
}

namespace {

struct Cursor {
    const std::string& s;
    size_t pos = 0;
    int line;

    void skip_ws() {
        while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
    }
    bool done() {
        skip_ws();
        return pos >= s.size();
    }
    [[noreturn]] void fail(const std::string& msg) const {
        throw AsmError(msg + " at line " + std::to_string(line), line,
                       static_cast<int>(pos) + 1);
    }
    std::string token() {
        skip_ws();
        size_t start = pos;
        while (pos < s.size() && !std::isspace(static_cast<unsigned char>(s[pos])) &&
               s[pos] != ',' && s[pos] != '(' && s[pos] != ')' && s[pos] != ':')
            ++pos;
        if (pos == start) fail("expected operand");
        return s.substr(start, pos - start);
    }
    void expect(char c) {
        skip_ws();
        if (pos >= s.size() || s[pos] != c)
            fail(std::string("expected '") + c + "'");
        ++pos;
    }
    bool accept(char c) {
        skip_ws();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
};

uint8_t parse_reg(Cursor& c, char cls) {
    std::string t = c.token();
    if (t.size() < 2 || t[0] != cls)
        c.fail(std::string("expected ") + cls + "-register, got '" + t + "'");
    int v = 0;
    auto [p, ec] = std::from_chars(t.data() + 1, t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size() || v < 0 || v > 31)
        c.fail("register index out of range in '" + t + "'");
    return static_cast<uint8_t>(v);
}

int64_t parse_int(Cursor& c) {
    c.skip_ws();
    std::string t = c.token();
    bool neg = false;
    size_t i = 0;
    if (i < t.size() && (t[i] == '-' || t[i] == '+')) {
        neg = t[i] == '-';
        ++i;
    }
    int base = 10;
    if (t.size() >= i + 2 && t[i] == '0' && (t[i + 1] == 'x' || t[i + 1] == 'X')) {
        base = 16;
        i += 2;
    }
    uint64_t v = 0;
    auto [p, ec] = std::from_chars(t.data() + i, t.data() + t.size(), v, base);
    if (ec != std::errc() || p != t.data() + t.size())
        c.fail("bad number '" + t + "'");
    int64_t sv = neg ? -static_cast<int64_t>(v) : static_cast<int64_t>(v);
    if (sv > 0xFFFFFFFFll || sv < -0x80000000ll)
        c.fail("immediate out of range '" + t + "'");
    return sv;
}

int32_t parse_imm(Cursor& c) { return static_cast<int32_t>(parse_int(c)); }

struct PendingLabel {
    size_t instr_idx;
    std::string name;
    int line;
};

}  // namespace

Program assemble(const std::string& source) {
    Program prog;
    std::vector<PendingLabel> pending;
    std::vector<std::pair<std::string, int>> entry_labels[2];

    std::istringstream in(source);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        if (auto h = raw.find('#'); h != std::string::npos) raw = raw.substr(0, h);
        Cursor c{raw, 0, lineno};
        while (!c.done()) {
            // label definition(s) at line start
            size_t save = c.pos;
            std::string t = c.token();
            if (c.accept(':')) {
                if (prog.symbols.count(t))
                    c.fail("duplicate label '" + t + "'");
                prog.symbols[t] = static_cast<uint32_t>(prog.instrs.size());
                continue;
            }
            c.pos = save;
            break;
        }
        if (c.done()) continue;

        std::string mn = c.token();
        if (mn == ".data") {
            uint32_t addr = static_cast<uint32_t>(parse_int(c));
            std::vector<uint32_t> words;
            while (!c.done()) words.push_back(static_cast<uint32_t>(parse_int(c)));
            auto& seg = prog.data[addr];
            seg.insert(seg.end(), words.begin(), words.end());
            continue;
        }
        if (mn == ".entry") {
            int32_t core = parse_imm(c);
            if (core != 0 && core != 1) c.fail("core id must be 0 or 1");
            std::string lbl = c.token();
            entry_labels[core].emplace_back(lbl, lineno);
            continue;
        }

        const OpInfo* oi = lookup(mn);
        if (!oi) c.fail("unknown mnemonic '" + mn + "'");
        Instr ins;
        ins.op = oi->op;
        switch (oi->fmt) {
            case Fmt::None:
                break;
            case Fmt::Li:
                ins.rd = parse_reg(c, 'x');
                c.expect(',');
                ins.imm = parse_imm(c);
                break;
            case Fmt::Mv:
                ins.rd = parse_reg(c, 'x');
                c.expect(',');
                ins.rs1 = parse_reg(c, 'x');
                break;
            case Fmt::R3x:
                ins.rd = parse_reg(c, 'x');
                c.expect(',');
                ins.rs1 = parse_reg(c, 'x');
                c.expect(',');
                ins.rs2 = parse_reg(c, 'x');
                break;
            case Fmt::R3f:
                ins.rd = parse_reg(c, 'f');
                c.expect(',');
                ins.rs1 = parse_reg(c, 'f');
                c.expect(',');
                ins.rs2 = parse_reg(c, 'f');
                break;
            case Fmt::I2:
                ins.rd = parse_reg(c, 'x');
                c.expect(',');
                ins.rs1 = parse_reg(c, 'x');
                c.expect(',');
                ins.imm = parse_imm(c);
                break;
            case Fmt::MemL:
            case Fmt::MemLf:
                ins.rd = parse_reg(c, oi->fmt == Fmt::MemL ? 'x' : 'f');
                c.expect(',');
                ins.imm = parse_imm(c);
                c.expect('(');
                ins.rs1 = parse_reg(c, 'x');
                c.expect(')');
                break;
            case Fmt::MemS:
            case Fmt::MemSf:
                ins.rs2 = parse_reg(c, oi->fmt == Fmt::MemS ? 'x' : 'f');
                c.expect(',');
                ins.imm = parse_imm(c);
                c.expect('(');
                ins.rs1 = parse_reg(c, 'x');
                c.expect(')');
                break;
            case Fmt::Br: {
                ins.rs1 = parse_reg(c, 'x');
                c.expect(',');
                ins.rs2 = parse_reg(c, 'x');
                c.expect(',');
                std::string lbl = c.token();
                pending.push_back({prog.instrs.size(), lbl, lineno});
                break;
            }
            case Fmt::Jal: {
                ins.rd = parse_reg(c, 'x');
                c.expect(',');
                std::string lbl = c.token();
                pending.push_back({prog.instrs.size(), lbl, lineno});
                break;
            }
            case Fmt::Csr: {
                ins.rd = parse_reg(c, 'x');
                c.expect(',');
                std::string csr = c.token();
                if (csr != "vl") c.fail("only the vl CSR is supported");
                break;
            }
            case Fmt::ModeSw: {
                std::string tgt = c.token();
                if (tgt == "split") {
                    ins.imm = 0;
                } else if (tgt == "merge") {
                    ins.imm = 1;
                    int32_t drv = parse_imm(c);
                    if (drv != 0 && drv != 1) c.fail("driver core must be 0 or 1");
                    ins.rd = static_cast<uint8_t>(drv);
                } else {
                    c.fail("modeswitch target must be split or merge");
                }
                break;
            }
            case Fmt::Vset: {
                ins.rd = parse_reg(c, 'x');
                c.expect(',');
                ins.rs1 = parse_reg(c, 'x');
                c.expect(',');
                std::string ew = c.token();
                if (ew != "e32") c.fail("only e32 element width is supported");
                break;
            }
            case Fmt::VMemU:
                ins.rd = parse_reg(c, 'v');
                c.expect(',');
                c.expect('(');
                ins.rs1 = parse_reg(c, 'x');
                c.expect(')');
                break;
            case Fmt::VMemS:
                ins.rd = parse_reg(c, 'v');
                c.expect(',');
                c.expect('(');
                ins.rs1 = parse_reg(c, 'x');
                c.expect(')');
                c.expect(',');
                ins.stride = parse_imm(c);
                break;
            case Fmt::Vvv:
            case Fmt::Vred:
                ins.rd = parse_reg(c, 'v');
                c.expect(',');
                ins.rs1 = parse_reg(c, 'v');
                c.expect(',');
                ins.rs2 = parse_reg(c, 'v');
                break;
            case Fmt::Vvx:
                ins.rd = parse_reg(c, 'v');
                c.expect(',');
                ins.rs1 = parse_reg(c, 'v');
                c.expect(',');
                ins.rs2 = parse_reg(c, 'x');
                break;
            case Fmt::Vvf:
                ins.rd = parse_reg(c, 'v');
                c.expect(',');
                ins.rs1 = parse_reg(c, 'v');
                c.expect(',');
                ins.rs2 = parse_reg(c, 'f');
                break;
            case Fmt::Vmvx:
                ins.rd = parse_reg(c, 'v');
                c.expect(',');
                ins.rs1 = parse_reg(c, 'x');
                break;
            case Fmt::Vmvf:
                ins.rd = parse_reg(c, 'v');
                c.expect(',');
                ins.rs1 = parse_reg(c, 'f');
                break;
        }
        if (!c.done()) c.fail("trailing junk on line");
        prog.instrs.push_back(ins);
    }

    for (const auto& p : pending) {
        auto it = prog.symbols.find(p.name);
        if (it == prog.symbols.end())
            throw AsmError("undefined label '" + p.name + "' at line " +
                               std::to_string(p.line),
                           p.line, 1);
        prog.instrs[p.instr_idx].imm = static_cast<int32_t>(it->second);
    }
    for (int core = 0; core < 2; ++core) {
        for (const auto& [lbl, ln] : entry_labels[core]) {
            auto it = prog.symbols.find(lbl);
            if (it == prog.symbols.end())
                throw AsmError("undefined entry label '" + lbl + "' at line " +
                                   std::to_string(ln),
                               ln, 1);
            prog.entry[core] = it->second;
        }
    }
    if (!prog.entry[0] && !prog.entry[1] && !prog.instrs.empty())
        prog.entry[0] = 0;

    for (const auto& ins : prog.instrs) {
        if (ins.op == Opcode::Beq || ins.op == Opcode::Bne ||
            ins.op == Opcode::Blt || ins.op == Opcode::Bge ||
            ins.op == Opcode::Jal) {
            if (ins.imm < 0 || static_cast<size_t>(ins.imm) >= prog.instrs.size())
                throw AsmError("branch target out of range", 0, 0);
        }
    }
    return prog;
}

std::string disassemble(const Program& program) {
    std::set<uint32_t> targets;
    for (const auto& ins : program.instrs) {
        if (ins.op == Opcode::Beq || ins.op == Opcode::Bne ||
            ins.op == Opcode::Blt || ins.op == Opcode::Bge ||
            ins.op == Opcode::Jal)
            targets.insert(static_cast<uint32_t>(ins.imm));
    }
    for (int core = 0; core < 2; ++core)
        if (program.entry[core]) targets.insert(*program.entry[core]);

    auto label = [](uint32_t idx) { return "L" + std::to_string(idx); };

    std::ostringstream out;
    for (int core = 0; core < 2; ++core)
        if (program.entry[core])
            out << ".entry " << core << " " << label(*program.entry[core]) << "\n";
    for (const auto& [addr, words] : program.data) {
        out << ".data " << addr;
        for (uint32_t w : words) out << " 0x" << std::hex << w << std::dec;
        out << "\n";
    }

    auto x = [](uint8_t r) { return "x" + std::to_string(r); };
    auto f = [](uint8_t r) { return "f" + std::to_string(r); };
    auto v = [](uint8_t r) { return "v" + std::to_string(r); };

    for (size_t i = 0; i < program.instrs.size(); ++i) {
        if (targets.count(static_cast<uint32_t>(i)))
            out << label(static_cast<uint32_t>(i)) << ":\n";
        const Instr& ins = program.instrs[i];
        const OpInfo& oi = info(ins.op);
        out << oi.name;
        switch (oi.fmt) {
            case Fmt::None:
                break;
            case Fmt::Li:
                out << " " << x(ins.rd) << ", " << ins.imm;
                break;
            case Fmt::Mv:
                out << " " << x(ins.rd) << ", " << x(ins.rs1);
                break;
            case Fmt::R3x:
                out << " " << x(ins.rd) << ", " << x(ins.rs1) << ", " << x(ins.rs2);
                break;
            case Fmt::R3f:
                out << " " << f(ins.rd) << ", " << f(ins.rs1) << ", " << f(ins.rs2);
                break;
            case Fmt::I2:
                out << " " << x(ins.rd) << ", " << x(ins.rs1) << ", " << ins.imm;
                break;
            case Fmt::MemL:
                out << " " << x(ins.rd) << ", " << ins.imm << "(" << x(ins.rs1) << ")";
                break;
            case Fmt::MemLf:
                out << " " << f(ins.rd) << ", " << ins.imm << "(" << x(ins.rs1) << ")";
                break;
            case Fmt::MemS:
                out << " " << x(ins.rs2) << ", " << ins.imm << "(" << x(ins.rs1) << ")";
                break;
            case Fmt::MemSf:
                out << " " << f(ins.rs2) << ", " << ins.imm << "(" << x(ins.rs1) << ")";
                break;
            case Fmt::Br:
                out << " " << x(ins.rs1) << ", " << x(ins.rs2) << ", "
                    << label(static_cast<uint32_t>(ins.imm));
                break;
            case Fmt::Jal:
                out << " " << x(ins.rd) << ", " << label(static_cast<uint32_t>(ins.imm));
                break;
            case Fmt::Csr:
                out << " " << x(ins.rd) << ", vl";
                break;
            case Fmt::ModeSw:
                if (ins.imm == 0)
                    out << " split";
                else
                    out << " merge " << static_cast<int>(ins.rd);
                break;
            case Fmt::Vset:
                out << " " << x(ins.rd) << ", " << x(ins.rs1) << ", e32";
                break;
            case Fmt::VMemU:
                out << " " << v(ins.rd) << ", (" << x(ins.rs1) << ")";
                break;
            case Fmt::VMemS:
                out << " " << v(ins.rd) << ", (" << x(ins.rs1) << "), " << ins.stride;
                break;
            case Fmt::Vvv:
            case Fmt::Vred:
                out << " " << v(ins.rd) << ", " << v(ins.rs1) << ", " << v(ins.rs2);
                break;
            case Fmt::Vvx:
                out << " " << v(ins.rd) << ", " << v(ins.rs1) << ", " << x(ins.rs2);
                break;
            case Fmt::Vvf:
                out << " " << v(ins.rd) << ", " << v(ins.rs1) << ", " << f(ins.rs2);
                break;
            case Fmt::Vmvx:
                out << " " << v(ins.rd) << ", " << x(ins.rs1);
                break;
            case Fmt::Vmvf:
                out << " " << v(ins.rd) << ", " << f(ins.rs1);
                break;
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace spatzsim
