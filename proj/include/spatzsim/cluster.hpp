#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "spatzsim/config.hpp"
#include "spatzsim/isa.hpp"
#include "spatzsim/metrics.hpp"
#include "spatzsim/vector_unit.hpp"

namespace spatzsim {

struct SimFault : std::runtime_error {
    uint64_t cycle;
    int core;
    int32_t pc;
    SimFault(const std::string& msg, uint64_t cycle_, int core_, int32_t pc_)
        : std::runtime_error(msg + " (cycle " + std::to_string(cycle_) + ", core " +
                             std::to_string(core_) + ", pc " + std::to_string(pc_) + ")"),
          cycle(cycle_),
          core(core_),
          pc(pc_) {}
};

struct ScalarCore {
    enum class Status { Running, WaitingBarrier, Halted };

    int id = 0;
    std::array<int32_t, 32> x{};
    std::array<float, 32> f{};
    uint32_t pc = 0;
    Status status = Status::Halted;
};

struct RunOutcome {
    uint64_t cycles = 0;
    bool timeout = false;
    PerfCounters counters;
    uint64_t degenerate_barriers = 0;
};

// The simulation core: two scalar cores, two vector units, a word-interleaved
// banked scratchpad, and the split/merge mode controller, advanced one cycle
// at a time. Execution is strictly sequential and deterministic.
class Cluster {
  public:
    explicit Cluster(const ClusterConfig& cfg);

    // Loads a program (shared image, per-core entry points) and the data
    // segments; resets all architectural state.
    void load(const Program& program);

    void step();
    RunOutcome run_to_halt(uint64_t max_cycles);

    bool all_halted() const;
    Mode mode() const { return mode_; }

    // Switches the operating mode directly (same contract as `modeswitch`):
    // faults unless both units are idle with empty queues.
    void reconfigure(Mode target);

    const ScalarCore& core(int id) const { return cores_[id]; }
    ScalarCore& core(int id) { return cores_[id]; }
    const VectorUnit& unit(int id) const { return units_[id]; }
    const PerfCounters& counters() const { return counters_; }
    uint64_t cycle() const { return cycle_; }
    uint64_t degenerate_barriers() const { return degenerate_barriers_; }

    std::vector<uint8_t>& memory() { return mem_; }
    const std::vector<uint8_t>& memory() const { return mem_; }
    uint32_t load_word(uint32_t addr) const;
    void store_word(uint32_t addr, uint32_t value);

    // vector units owned by a core under the current mode
    std::vector<int> owned_units(int core_id) const;

    void set_trace(std::ostream* os) { trace_ = os; }

    const ClusterConfig& config() const { return cfg_; }

  private:
    struct Access {
        uint32_t elem;
        uint32_t addr;
        bool done = false;
    };

    // One vector instruction occupying one unit. Stream `u` always executes
    // unit u's queue; in merge mode both queues carry the same instruction
    // sequence and the unit that dequeues an instruction first applies its
    // architectural effects, so the two units may drift apart in time without
    // changing results.
    struct Stream {
        bool busy = false;
        VuOp op;
        int unit = -1;
        bool wide = false;  // merge mode: logical registers span both units
        uint32_t cycles_left = 0;
        bool is_mem = false;
        bool is_store = false;
        std::vector<Access> acc;  // this unit's pending scratchpad accesses
    };

    struct CoreMemReq {
        bool requested = false;
        bool granted = false;
        bool store = false;
        uint32_t addr = 0;
        uint32_t store_value = 0;
        uint32_t load_value = 0;
    };

    uint32_t vlmax_effective() const { return cfg_.vlmax(mode_); }
    uint32_t bank_of(uint32_t addr) const { return (addr / 4) % cfg_.n_banks; }

    void start_streams();
    void memory_phase();
    void advance_streams();
    void core_phase();
    void exec_core(int cid);
    void issue_vector(int cid, const Instr& ins);
    void start_stream_op(Stream& st, bool architectural);
    void apply_op(const Stream& st);
    void exec_modeswitch(int cid, const Instr& ins);
    void apply_mode(Mode target);

    // logical vector register access; `wide` maps elements across both units
    uint32_t velem_read(bool wide, int unit, uint8_t r, uint32_t e) const;
    void velem_write(bool wide, int unit, uint8_t r, uint32_t e, uint32_t bits);
    void check_valid(const Stream& st, uint8_t r) const;
    void clear_invalid(const Stream& st, uint8_t r);

    bool units_drained(int cid) const;
    void trace_line(int cid, const std::string& text);

    ClusterConfig cfg_;
    Program prog_;
    Mode mode_;
    std::array<ScalarCore, 2> cores_;
    std::array<VectorUnit, 2> units_;
    std::array<Stream, 2> streams_;
    std::vector<uint8_t> mem_;
    std::vector<uint8_t> bank_rr_;  // per-bank round-robin grant pointer
    uint64_t cycle_ = 0;
    uint32_t freeze_cycles_ = 0;
    std::array<uint64_t, 2> popped_{};  // per-unit dequeue counts (merge mode)
    PerfCounters counters_;
    uint64_t degenerate_barriers_ = 0;
    std::array<CoreMemReq, 2> core_req_;
    std::ostream* trace_ = nullptr;
};

}  // namespace spatzsim
