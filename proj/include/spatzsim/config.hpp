#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace spatzsim {

enum class ModeKind : uint8_t { Split, Merge };

// Cluster operating mode. In merge mode `driver` is the scalar core that
// issues vector instructions to both units.
struct Mode {
    ModeKind kind = ModeKind::Split;
    int driver = 0;

    static Mode split() { return {ModeKind::Split, 0}; }
    static Mode merge(int driver) { return {ModeKind::Merge, driver}; }
    bool operator==(const Mode&) const = default;
};

inline std::string to_string(Mode m) {
    return m.kind == ModeKind::Split ? "split"
                                     : "merge" + std::to_string(m.driver);
}

struct ClusterConfig {
    uint32_t vlen = 256;            // bits per vector register per unit
    uint32_t nlanes = 4;            // ALUs per vector unit
    uint32_t nports = 4;            // memory ports per vector unit
    uint32_t n_banks = 128;          // word-interleaved scratchpad banks
    uint32_t scratchpad_bytes = 128 * 1024;
    uint32_t offload_depth = 4;     // offload queue entries per unit
    uint32_t modeswitch_latency = 4;
    bool debug_vrf_check = false;   // fault on reads of invalidated registers
    Mode initial_mode = Mode::split();

    // elements per vector register in one unit (e32 only)
    uint32_t vlmax_unit() const { return vlen / 32; }
    uint32_t vlmax(Mode m) const {
        return m.kind == ModeKind::Merge ? 2 * vlmax_unit() : vlmax_unit();
    }

    void validate() const {
        auto pow2 = [](uint32_t v) { return v != 0 && (v & (v - 1)) == 0; };
        if (!pow2(vlen) || vlen < 64)
            throw std::invalid_argument("vlen must be a power of two >= 64");
        if (!pow2(n_banks))
            throw std::invalid_argument("n_banks must be a power of two");
        if (nlanes == 0 || nports == 0 || offload_depth == 0)
            throw std::invalid_argument("nlanes/nports/offload_depth must be > 0");
        if (scratchpad_bytes % 4 != 0 || scratchpad_bytes == 0)
            throw std::invalid_argument("scratchpad_bytes must be a positive word multiple");
    }

    bool operator==(const ClusterConfig&) const = default;
};

}  // namespace spatzsim
