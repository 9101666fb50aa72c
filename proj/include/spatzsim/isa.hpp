#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace spatzsim {

// Closed instruction subset. Scalar side is a small RV32-style core plus the
// cluster-control instructions (barrier, modeswitch, fence.vec); vector side
// is an e32-only RVV-style subset.
enum class Opcode : uint8_t {
    // scalar
    Li,
    Mv,
    Add,
    Addi,
    Sub,
    Mul,
    And,
    Or,
    Xor,
    Slli,
    Srli,
    Lw,
    Sw,
    Beq,
    Bne,
    Blt,
    Bge,
    Jal,
    Jalr,
    CsrrVl,
    FaddS,
    FmulS,
    Flw,
    Fsw,
    FenceVec,
    Barrier,
    Modeswitch,
    Halt,
    Nop,
    // vector
    Vsetvli,
    Vle32,
    Vse32,
    Vlse32,
    Vsse32,
    VaddVV,
    VsubVV,
    VmulVV,
    VmaccVV,
    VaddVX,
    VmulVX,
    VfaddVV,
    VfsubVV,
    VfmulVV,
    VfmaccVV,
    VfmulVF,
    VmvVX,
    VfmvVF,
    VredsumVS,
    VfredsumVS,
    VmaxVX,
};

const char* mnemonic(Opcode op);

bool is_vector(Opcode op);
bool is_vector_mem(Opcode op);
bool is_vector_load(Opcode op);
bool is_vector_store(Opcode op);
bool is_vector_strided(Opcode op);
bool is_reduction(Opcode op);

// One decoded instruction. Field use depends on the opcode: rd/rs1/rs2 index
// the x, f, or v file, imm carries immediates and resolved branch targets
// (instruction index), stride is in bytes for the strided memory ops.
// For modeswitch: imm = 0 (split) or 1 (merge), rd = driver core id.
struct Instr {
    Opcode op{Opcode::Nop};
    uint8_t rd = 0;
    uint8_t rs1 = 0;
    uint8_t rs2 = 0;
    int32_t imm = 0;
    int32_t stride = 0;

    bool operator==(const Instr&) const = default;
};

struct Program {
    std::vector<Instr> instrs;
    // data segments: base address -> words
    std::map<uint32_t, std::vector<uint32_t>> data;
    // per-core start index; a core without an entry starts halted
    std::array<std::optional<uint32_t>, 2> entry{};
    std::map<std::string, uint32_t> symbols;

    bool equivalent(const Program& o) const {
        return instrs == o.instrs && data == o.data && entry == o.entry;
    }
};

struct AsmError : std::runtime_error {
    int line;
    int col;
    AsmError(const std::string& msg, int line_, int col_)
        : std::runtime_error(msg), line(line_), col(col_) {}
};

// Assembles source text. Grammar: one instruction per line, '#' comments,
// 'label:' definitions, '.data <addr> <word>*' and '.entry <core> <label>'
// directives. Throws AsmError with position on any malformed input.
Program assemble(const std::string& source);

// Canonical text form; assemble(disassemble(p)) reproduces p instruction for
// instruction (labels are renamed L<index>).
std::string disassemble(const Program& program);

}  // namespace spatzsim
