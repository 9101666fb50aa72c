#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <vector>

#include "spatzsim/isa.hpp"

namespace spatzsim {

// vl rule: vl = min(avl, VLMAX_effective)
inline uint32_t vsetvl_rule(uint32_t avl, uint32_t vlmax_effective) {
    return avl < vlmax_effective ? avl : vlmax_effective;
}

// Occupancy rules. Zero owned elements always costs one cycle.
inline uint32_t arith_cycles(uint32_t owned, uint32_t nlanes) {
    return owned == 0 ? 1 : (owned + nlanes - 1) / nlanes;
}

inline uint32_t reduction_cycles(uint32_t owned, uint32_t nlanes) {
    if (owned == 0) return 1;
    uint32_t log2l = 0;
    while ((1u << (log2l + 1)) <= nlanes) ++log2l;
    return (owned + nlanes - 1) / nlanes + log2l;
}

// Deterministic reduction: ascending element index, pairwise tree. Keeps fp32
// results identical between split and merge execution of the same element set.
float reduce_tree_f32(const std::vector<float>& elems, size_t lo, size_t hi);
uint64_t reduce_tree_i32(const std::vector<uint32_t>& elems, size_t lo, size_t hi);

// A vector instruction captured at offload time: the scalar operands, the vl
// in force, and the element window this unit owns for timing purposes.
struct VuOp {
    Instr instr;
    uint32_t vl = 0;
    uint32_t win_lo = 0;
    uint32_t win_hi = 0;
    int32_t sbase = 0;  // memory base address
    int32_t sx = 0;     // captured x operand
    float sf = 0.0f;    // captured f operand

    uint32_t owned() const { return win_hi - win_lo; }
    bool operator==(const VuOp&) const = default;
};

// One vector unit: VRF storage, current vl, and the offload queue. Execution
// timing and memory arbitration are driven by the cluster.
struct VectorUnit {
    int id = 0;
    uint32_t vlmax = 8;             // elements per register in this unit
    std::vector<uint32_t> vrf;      // 32 * vlmax words, zero at reset
    std::array<bool, 32> invalid{}; // set when a modeswitch invalidates state
    std::deque<VuOp> queue;
    uint32_t vl = 0;

    void reset(uint32_t vlmax_elems) {
        vlmax = vlmax_elems;
        vrf.assign(32u * vlmax, 0);
        invalid.fill(false);
        queue.clear();
        vl = 0;
    }

    uint32_t reg(uint8_t r, uint32_t e) const { return vrf[r * vlmax + e]; }
    void set_reg(uint8_t r, uint32_t e, uint32_t bits) { vrf[r * vlmax + e] = bits; }

    void invalidate_all() {
        std::fill(vrf.begin(), vrf.end(), 0);
        invalid.fill(true);
    }
};

}  // namespace spatzsim
