#include "spatzsim/cluster.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <ostream>
#include <set>

namespace spatzsim {

float reduce_tree_f32(const std::vector<float>& elems, size_t lo, size_t hi) {
    size_t n = hi - lo;
    if (n == 0) return 0.0f;
    if (n == 1) return elems[lo];
    size_t mid = lo + (n + 1) / 2;
    return reduce_tree_f32(elems, lo, mid) + reduce_tree_f32(elems, mid, hi);
}

uint64_t reduce_tree_i32(const std::vector<uint32_t>& elems, size_t lo, size_t hi) {
    size_t n = hi - lo;
    if (n == 0) return 0;
    if (n == 1) return elems[lo];
    size_t mid = lo + (n + 1) / 2;
    return reduce_tree_i32(elems, lo, mid) + reduce_tree_i32(elems, mid, hi);
}

namespace {

float as_f32(uint32_t bits) { return std::bit_cast<float>(bits); }
uint32_t as_bits(float f) { return std::bit_cast<uint32_t>(f); }

// VRF accesses per element, by operand shape
uint32_t vrf_access_factor(Opcode op) {
    switch (op) {
        case Opcode::VmaccVV:
        case Opcode::VfmaccVV:
            return 4;
        case Opcode::VaddVV:
        case Opcode::VsubVV:
        case Opcode::VmulVV:
        case Opcode::VfaddVV:
        case Opcode::VfsubVV:
        case Opcode::VfmulVV:
            return 3;
        case Opcode::VaddVX:
        case Opcode::VmulVX:
        case Opcode::VmaxVX:
        case Opcode::VfmulVF:
        case Opcode::VredsumVS:
        case Opcode::VfredsumVS:
            return 2;
        default:
            return 1;  // moves, loads, stores
    }
}

}  // namespace

Cluster::Cluster(const ClusterConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    mem_.assign(cfg_.scratchpad_bytes, 0);
    bank_rr_.assign(cfg_.n_banks, 0);
    for (int i = 0; i < 2; ++i) {
        cores_[i].id = i;
        units_[i].id = i;
        units_[i].reset(cfg_.vlmax_unit());
    }
    mode_ = cfg_.initial_mode;
}

void Cluster::load(const Program& program) {
    prog_ = program;
    mode_ = cfg_.initial_mode;
    std::fill(mem_.begin(), mem_.end(), 0);
    std::fill(bank_rr_.begin(), bank_rr_.end(), 0);
    for (const auto& [addr, words] : prog_.data) {
        uint64_t end = static_cast<uint64_t>(addr) + 4ull * words.size();
        if (addr % 4 != 0 || end > mem_.size())
            throw std::runtime_error("data segment at " + std::to_string(addr) +
                                     " does not fit the scratchpad");
        for (size_t i = 0; i < words.size(); ++i) {
            uint32_t w = words[i];
            uint32_t a = addr + 4 * static_cast<uint32_t>(i);
            mem_[a] = w & 0xFF;
            mem_[a + 1] = (w >> 8) & 0xFF;
            mem_[a + 2] = (w >> 16) & 0xFF;
            mem_[a + 3] = (w >> 24) & 0xFF;
        }
    }
    for (int i = 0; i < 2; ++i) {
        cores_[i] = ScalarCore{};
        cores_[i].id = i;
        if (prog_.entry[i]) {
            cores_[i].pc = *prog_.entry[i];
            cores_[i].status = ScalarCore::Status::Running;
        }
        units_[i].reset(cfg_.vlmax_unit());
        streams_[i] = Stream{};
    }
    cycle_ = 0;
    freeze_cycles_ = 0;
    popped_ = {0, 0};
    counters_ = PerfCounters{};
    degenerate_barriers_ = 0;
}

uint32_t Cluster::load_word(uint32_t addr) const {
    return static_cast<uint32_t>(mem_[addr]) | (static_cast<uint32_t>(mem_[addr + 1]) << 8) |
           (static_cast<uint32_t>(mem_[addr + 2]) << 16) |
           (static_cast<uint32_t>(mem_[addr + 3]) << 24);
}

void Cluster::store_word(uint32_t addr, uint32_t value) {
    mem_[addr] = value & 0xFF;
    mem_[addr + 1] = (value >> 8) & 0xFF;
    mem_[addr + 2] = (value >> 16) & 0xFF;
    mem_[addr + 3] = (value >> 24) & 0xFF;
}

std::vector<int> Cluster::owned_units(int core_id) const {
    if (mode_.kind == ModeKind::Split) return {core_id};
    if (mode_.driver == core_id) return {0, 1};
    return {};
}

bool Cluster::all_halted() const {
    return cores_[0].status == ScalarCore::Status::Halted &&
           cores_[1].status == ScalarCore::Status::Halted;
}

bool Cluster::units_drained(int cid) const {
    for (int u : owned_units(cid)) {
        if (!units_[u].queue.empty()) return false;
        if (streams_[u].busy) return false;
    }
    return true;
}

uint32_t Cluster::velem_read(bool wide, int unit, uint8_t r, uint32_t e) const {
    if (!wide) return units_[unit].reg(r, e);
    uint32_t per = cfg_.vlmax_unit();
    return units_[e / per].reg(r, e % per);
}

void Cluster::velem_write(bool wide, int unit, uint8_t r, uint32_t e, uint32_t bits) {
    if (!wide) {
        units_[unit].set_reg(r, e, bits);
        return;
    }
    uint32_t per = cfg_.vlmax_unit();
    units_[e / per].set_reg(r, e % per, bits);
}

void Cluster::check_valid(const Stream& st, uint8_t r) const {
    if (!cfg_.debug_vrf_check) return;
    bool bad = st.wide ? (units_[0].invalid[r] || units_[1].invalid[r])
                       : units_[st.unit].invalid[r];
    if (bad)
        throw SimFault("read of invalidated vector register v" + std::to_string(r),
                       cycle_, -1, -1);
}

void Cluster::clear_invalid(const Stream& st, uint8_t r) {
    if (st.wide) {
        units_[0].invalid[r] = false;
        units_[1].invalid[r] = false;
    } else {
        units_[st.unit].invalid[r] = false;
    }
}

// Applies the full architectural effect of one vector instruction across all
// vl elements: VRF writes, scratchpad loads and stores. Called exactly once
// per instruction, by the first stream that dequeues it; timing (occupancy,
// bank arbitration) is tracked separately per unit.
void Cluster::apply_op(const Stream& st) {
    const Instr& ins = st.op.instr;
    uint32_t vl = st.op.vl;
    bool wide = st.wide;
    int u = st.unit;
    if (vl == 0) return;
    auto src = [&](uint8_t r, uint32_t e) { return velem_read(wide, u, r, e); };

    if (is_vector_mem(ins.op)) {
        int32_t stride = is_vector_strided(ins.op) ? ins.stride : 4;
        bool store = is_vector_store(ins.op);
        if (store) check_valid(st, ins.rd);
        for (uint32_t e = 0; e < vl; ++e) {
            int64_t addr =
                static_cast<int64_t>(st.op.sbase) + static_cast<int64_t>(stride) * e;
            if (addr < 0 || addr % 4 != 0 || addr + 4 > static_cast<int64_t>(mem_.size()))
                throw SimFault(std::string(mnemonic(ins.op)) +
                                   " access out of scratchpad at address " +
                                   std::to_string(addr),
                               cycle_, -1, -1);
        }
        for (uint32_t e = 0; e < vl; ++e) {
            uint32_t addr =
                static_cast<uint32_t>(st.op.sbase + static_cast<int64_t>(stride) * e);
            if (store)
                store_word(addr, src(ins.rd, e));
            else
                velem_write(wide, u, ins.rd, e, load_word(addr));
        }
        if (!store) clear_invalid(st, ins.rd);
        return;
    }

    if (is_reduction(ins.op)) {
        check_valid(st, ins.rs1);
        check_valid(st, ins.rs2);
        uint32_t seed = velem_read(wide, u, ins.rs2, 0);
        uint32_t out;
        if (ins.op == Opcode::VredsumVS) {
            std::vector<uint32_t> elems(vl);
            for (uint32_t e = 0; e < vl; ++e) elems[e] = src(ins.rs1, e);
            out = seed + static_cast<uint32_t>(reduce_tree_i32(elems, 0, vl));
        } else {
            std::vector<float> elems(vl);
            for (uint32_t e = 0; e < vl; ++e) elems[e] = as_f32(src(ins.rs1, e));
            out = as_bits(as_f32(seed) + reduce_tree_f32(elems, 0, vl));
        }
        velem_write(wide, u, ins.rd, 0, out);
        clear_invalid(st, ins.rd);
        return;
    }

    switch (ins.op) {
        case Opcode::VmvVX:
        case Opcode::VfmvVF:
            break;  // no vector sources
        case Opcode::VmaccVV:
        case Opcode::VfmaccVV:
            check_valid(st, ins.rd);
            [[fallthrough]];
        case Opcode::VaddVV:
        case Opcode::VsubVV:
        case Opcode::VmulVV:
        case Opcode::VfaddVV:
        case Opcode::VfsubVV:
        case Opcode::VfmulVV:
            check_valid(st, ins.rs1);
            check_valid(st, ins.rs2);
            break;
        default:
            check_valid(st, ins.rs1);
            break;
    }
    std::vector<uint32_t> result(vl);
    for (uint32_t e = 0; e < vl; ++e) {
        uint32_t out = 0;
        switch (ins.op) {
            case Opcode::VaddVV:
                out = src(ins.rs1, e) + src(ins.rs2, e);
                break;
            case Opcode::VsubVV:
                out = src(ins.rs1, e) - src(ins.rs2, e);
                break;
            case Opcode::VmulVV:
                out = src(ins.rs1, e) * src(ins.rs2, e);
                break;
            case Opcode::VmaccVV:
                out = src(ins.rd, e) + src(ins.rs1, e) * src(ins.rs2, e);
                break;
            case Opcode::VaddVX:
                out = src(ins.rs1, e) + static_cast<uint32_t>(st.op.sx);
                break;
            case Opcode::VmulVX:
                out = src(ins.rs1, e) * static_cast<uint32_t>(st.op.sx);
                break;
            case Opcode::VmaxVX: {
                int32_t a = static_cast<int32_t>(src(ins.rs1, e));
                out = static_cast<uint32_t>(std::max(a, st.op.sx));
                break;
            }
            case Opcode::VfaddVV:
                out = as_bits(as_f32(src(ins.rs1, e)) + as_f32(src(ins.rs2, e)));
                break;
            case Opcode::VfsubVV:
                out = as_bits(as_f32(src(ins.rs1, e)) - as_f32(src(ins.rs2, e)));
                break;
            case Opcode::VfmulVV:
                out = as_bits(as_f32(src(ins.rs1, e)) * as_f32(src(ins.rs2, e)));
                break;
            case Opcode::VfmaccVV:
                out = as_bits(as_f32(src(ins.rd, e)) +
                              as_f32(src(ins.rs1, e)) * as_f32(src(ins.rs2, e)));
                break;
            case Opcode::VfmulVF:
                out = as_bits(as_f32(src(ins.rs1, e)) * st.op.sf);
                break;
            case Opcode::VmvVX:
                out = static_cast<uint32_t>(st.op.sx);
                break;
            case Opcode::VfmvVF:
                out = as_bits(st.op.sf);
                break;
            default:
                throw std::logic_error("unhandled vector opcode");
        }
        result[e] = out;
    }
    for (uint32_t e = 0; e < vl; ++e) velem_write(wide, u, ins.rd, e, result[e]);
    clear_invalid(st, ins.rd);
}

void Cluster::start_stream_op(Stream& st, bool architectural) {
    const Instr& ins = st.op.instr;
    uint32_t lo = st.op.win_lo, hi = st.op.win_hi;
    uint32_t owned = hi - lo;
    st.busy = true;
    st.is_mem = false;
    st.is_store = false;
    st.acc.clear();

    auto& uc = counters_.unit[st.unit];
    uc.vector_lane_op += owned;
    uc.vrf_access += static_cast<uint64_t>(owned) * vrf_access_factor(ins.op);

    if (architectural) apply_op(st);

    if (is_vector_mem(ins.op) && st.op.vl > 0) {
        st.is_mem = true;
        st.is_store = is_vector_store(ins.op);
        int32_t stride = is_vector_strided(ins.op) ? ins.stride : 4;
        for (uint32_t e = lo; e < hi; ++e)
            st.acc.push_back(
                {e, static_cast<uint32_t>(st.op.sbase + static_cast<int64_t>(stride) * e)});
        if (st.acc.empty()) {
            st.is_mem = false;
            st.cycles_left = 1;
        }
        return;
    }

    st.cycles_left = is_reduction(ins.op) ? reduction_cycles(owned, cfg_.nlanes)
                                          : arith_cycles(owned, cfg_.nlanes);
}

void Cluster::start_streams() {
    bool wide = mode_.kind == ModeKind::Merge;
    for (int u = 0; u < 2; ++u) {
        Stream& st = streams_[u];
        if (st.busy || units_[u].queue.empty()) continue;
        st.op = units_[u].queue.front();
        units_[u].queue.pop_front();
        st.unit = u;
        st.wide = wide;
        bool architectural = true;
        if (wide) {
            // both queues carry the same sequence; the first unit to dequeue
            // an instruction applies its architectural effects
            uint64_t n = ++popped_[u];
            architectural = n > popped_[1 - u];
        }
        start_stream_op(st, architectural);
    }
}

void Cluster::memory_phase() {
    struct BankReq {
        int requester;  // 0,1 = units; 2,3 = cores
        Stream* st = nullptr;
        int unit = -1;
        std::vector<size_t> acc_idx;
        uint32_t addr = 0;
        bool store = false;
        int core = -1;
    };
    std::vector<std::vector<BankReq>> per_bank(cfg_.n_banks);

    for (auto& st : streams_) {
        if (!st.busy || !st.is_mem) continue;
        int u = st.unit;
        auto& list = st.acc;
        std::set<uint32_t> used_banks;
        std::vector<BankReq*> picked;
        uint32_t ports = 0;
        bool truncated = false;
        for (size_t i = 0; i < list.size(); ++i) {
            if (list[i].done) continue;
            uint32_t b = bank_of(list[i].addr);
            // loads to an identical address coalesce onto one port
            if (!st.is_store) {
                bool joined = false;
                for (BankReq* pr : picked)
                    if (pr->addr == list[i].addr) {
                        pr->acc_idx.push_back(i);
                        joined = true;
                        break;
                    }
                if (joined) continue;
            }
            if (ports == cfg_.nports) break;
            if (used_banks.count(b)) {
                truncated = true;
                break;
            }
            used_banks.insert(b);
            ++ports;
            per_bank[b].push_back(BankReq{u, &st, u, {i}, list[i].addr, st.is_store, -1});
            picked.push_back(&per_bank[b].back());
        }
        if (truncated) counters_.unit[u].bank_conflict_stall++;
    }

    core_req_ = {};
    if (freeze_cycles_ == 0) {
        for (int cid = 0; cid < 2; ++cid) {
            ScalarCore& c = cores_[cid];
            if (c.status != ScalarCore::Status::Running) continue;
            if (c.pc >= prog_.instrs.size()) continue;  // fault raised in core phase
            const Instr& ins = prog_.instrs[c.pc];
            if (ins.op != Opcode::Lw && ins.op != Opcode::Sw && ins.op != Opcode::Flw &&
                ins.op != Opcode::Fsw)
                continue;
            int64_t addr = static_cast<int64_t>(c.x[ins.rs1]) + ins.imm;
            if (addr < 0 || addr % 4 != 0 || addr + 4 > static_cast<int64_t>(mem_.size()))
                throw SimFault("scalar memory access out of scratchpad at address " +
                                   std::to_string(addr),
                               cycle_, cid, static_cast<int32_t>(c.pc));
            auto& rq = core_req_[cid];
            rq.requested = true;
            rq.addr = static_cast<uint32_t>(addr);
            if (ins.op == Opcode::Sw) {
                rq.store = true;
                rq.store_value = static_cast<uint32_t>(c.x[ins.rs2]);
            } else if (ins.op == Opcode::Fsw) {
                rq.store = true;
                rq.store_value = std::bit_cast<uint32_t>(c.f[ins.rs2]);
            }
            per_bank[bank_of(rq.addr)].push_back(
                BankReq{2 + cid, nullptr, -1, {}, rq.addr, rq.store, cid});
        }
    }

    // per-bank round-robin grant, then apply all loads before all stores
    std::vector<BankReq*> granted;
    for (uint32_t b = 0; b < cfg_.n_banks; ++b) {
        auto& reqs = per_bank[b];
        if (reqs.empty()) continue;
        int start = bank_rr_[b];
        BankReq* win = nullptr;
        for (int off = 0; off < 4 && !win; ++off) {
            int want = (start + off) % 4;
            for (auto& r : reqs)
                if (r.requester == want) {
                    win = &r;
                    break;
                }
        }
        bank_rr_[b] = static_cast<uint8_t>((win->requester + 1) % 4);
        granted.push_back(win);
        for (auto& r : reqs) {
            if (&r == win) continue;
            if (r.unit >= 0)
                counters_.unit[r.unit].bank_conflict_stall++;
            // denied core requests are counted in the core phase
        }
    }
    // unit grants only track timing (data moved at dispatch); scalar loads
    // are applied before scalar stores
    for (BankReq* g : granted) {
        if (g->unit >= 0) {
            for (size_t i : g->acc_idx) g->st->acc[i].done = true;
            counters_.unit[g->unit].tcdm_access++;
        } else if (!g->store) {
            core_req_[g->core].granted = true;
            core_req_[g->core].load_value = load_word(g->addr);
        }
    }
    for (BankReq* g : granted) {
        if (g->unit >= 0 || !g->store) continue;
        core_req_[g->core].granted = true;
        store_word(g->addr, core_req_[g->core].store_value);
    }
}

void Cluster::advance_streams() {
    std::array<bool, 2> unit_active{false, false};
    for (auto& st : streams_)
        if (st.busy) unit_active[st.unit] = true;

    for (auto& st : streams_) {
        if (!st.busy) continue;
        if (st.is_mem) {
            bool done = true;
            for (const auto& a : st.acc)
                if (!a.done) done = false;
            if (done) st.busy = false;
        } else {
            if (--st.cycles_left == 0) st.busy = false;
        }
    }
    for (int u = 0; u < 2; ++u) {
        if (unit_active[u])
            counters_.unit[u].active_cycle++;
        else
            counters_.unit[u].idle_cycle++;
    }
}

void Cluster::issue_vector(int cid, const Instr& ins) {
    ScalarCore& c = cores_[cid];
    auto& cc = counters_.core[cid];
    std::vector<int> owned = owned_units(cid);
    if (owned.empty())
        throw SimFault("vector instruction on detached core", cycle_, cid,
                       static_cast<int32_t>(c.pc));
    for (int u : owned)
        if (units_[u].queue.size() >= cfg_.offload_depth) {
            cc.offload_stall_cycle++;
            cc.idle_cycle++;
            trace_line(cid, std::string(mnemonic(ins.op)) + " stall=offload_queue");
            return;
        }

    VuOp op;
    op.instr = ins;
    op.vl = units_[owned[0]].vl;
    if (is_vector_mem(ins.op)) {
        op.sbase = c.x[ins.rs1];
    } else if (ins.op == Opcode::VmvVX) {
        op.sx = c.x[ins.rs1];
    } else if (ins.op == Opcode::VfmvVF) {
        op.sf = c.f[ins.rs1];
    } else if (ins.op == Opcode::VaddVX || ins.op == Opcode::VmulVX ||
               ins.op == Opcode::VmaxVX) {
        op.sx = c.x[ins.rs2];
    } else if (ins.op == Opcode::VfmulVF) {
        op.sf = c.f[ins.rs2];
    }
    for (size_t i = 0; i < owned.size(); ++i) {
        VuOp per = op;
        if (owned.size() == 1) {
            per.win_lo = 0;
            per.win_hi = op.vl;
        } else {
            uint32_t mid = (op.vl + 1) / 2;
            per.win_lo = i == 0 ? 0 : mid;
            per.win_hi = i == 0 ? mid : op.vl;
        }
        units_[owned[i]].queue.push_back(per);
    }
    cc.ifetch_vector++;
    cc.active_cycle++;
    trace_line(cid, mnemonic(ins.op));
    c.pc++;
}

void Cluster::apply_mode(Mode target) {
    mode_ = target;
    units_[1].invalidate_all();
    units_[0].vl = 0;
    units_[1].vl = 0;
    popped_ = {0, 0};
}

void Cluster::reconfigure(Mode target) {
    if (target == mode_) return;
    for (const auto& st : streams_)
        if (st.busy) throw SimFault("modeswitch with busy vector unit", cycle_, -1, -1);
    for (const auto& u : units_)
        if (!u.queue.empty())
            throw SimFault("modeswitch with busy vector unit", cycle_, -1, -1);
    apply_mode(target);
}

void Cluster::exec_modeswitch(int cid, const Instr& ins) {
    ScalarCore& c = cores_[cid];
    auto& cc = counters_.core[cid];
    Mode target = ins.imm == 0 ? Mode::split() : Mode::merge(ins.rd);
    cc.ifetch_scalar++;
    cc.active_cycle++;
    trace_line(cid, mnemonic(ins.op));
    if (target == mode_) {  // no-op switch, one cycle
        c.pc++;
        return;
    }
    for (const auto& st : streams_)
        if (st.busy)
            throw SimFault("modeswitch with busy vector unit", cycle_, cid,
                           static_cast<int32_t>(c.pc));
    for (const auto& u : units_)
        if (!u.queue.empty())
            throw SimFault("modeswitch with busy vector unit", cycle_, cid,
                           static_cast<int32_t>(c.pc));
    apply_mode(target);
    cc.modeswitch_count++;
    c.pc++;
    freeze_cycles_ = cfg_.modeswitch_latency;
}

void Cluster::exec_core(int cid) {
    ScalarCore& c = cores_[cid];
    auto& cc = counters_.core[cid];
    if (c.status == ScalarCore::Status::Halted) {
        cc.idle_cycle++;
        return;
    }
    if (c.status == ScalarCore::Status::WaitingBarrier) {
        cc.barrier_stall_cycle++;
        cc.idle_cycle++;
        trace_line(cid, "barrier stall=barrier");
        return;
    }
    if (c.pc >= prog_.instrs.size())
        throw SimFault("pc out of range", cycle_, cid, static_cast<int32_t>(c.pc));
    const Instr& ins = prog_.instrs[c.pc];

    if (is_vector(ins.op)) {
        if (ins.op == Opcode::Vsetvli) {
            std::vector<int> owned = owned_units(cid);
            if (owned.empty())
                throw SimFault("vector instruction on detached core", cycle_, cid,
                               static_cast<int32_t>(c.pc));
            uint32_t vlmax = vlmax_effective();
            uint32_t avl = ins.rs1 == 0 ? vlmax : static_cast<uint32_t>(c.x[ins.rs1]);
            uint32_t vl = vsetvl_rule(avl, vlmax);
            for (int u : owned) units_[u].vl = vl;
            if (ins.rd != 0) c.x[ins.rd] = static_cast<int32_t>(vl);
            cc.ifetch_vector++;
            cc.active_cycle++;
            trace_line(cid, mnemonic(ins.op));
            c.pc++;
        } else {
            issue_vector(cid, ins);
        }
        c.x[0] = 0;
        return;
    }

    switch (ins.op) {
        case Opcode::Lw:
        case Opcode::Sw:
        case Opcode::Flw:
        case Opcode::Fsw: {
            auto& rq = core_req_[cid];
            if (!rq.granted) {
                cc.bank_conflict_stall++;
                cc.idle_cycle++;
                trace_line(cid, std::string(mnemonic(ins.op)) + " stall=bank_conflict");
                return;
            }
            if (ins.op == Opcode::Lw)
                c.x[ins.rd] = static_cast<int32_t>(rq.load_value);
            else if (ins.op == Opcode::Flw)
                c.f[ins.rd] = std::bit_cast<float>(rq.load_value);
            cc.ifetch_scalar++;
            cc.scalar_mem_access++;
            counters_.scalar_tcdm_access++;
            cc.active_cycle++;
            trace_line(cid, mnemonic(ins.op));
            c.pc++;
            break;
        }
        case Opcode::FenceVec:
        case Opcode::Halt: {
            if (!units_drained(cid)) {
                cc.offload_stall_cycle++;
                cc.idle_cycle++;
                trace_line(cid, std::string(mnemonic(ins.op)) + " stall=vector_drain");
                return;
            }
            cc.ifetch_scalar++;
            cc.active_cycle++;
            trace_line(cid, mnemonic(ins.op));
            if (ins.op == Opcode::Halt)
                c.status = ScalarCore::Status::Halted;
            else
                c.pc++;
            break;
        }
        case Opcode::Barrier: {
            cc.ifetch_scalar++;
            cc.active_cycle++;
            cc.barrier_count++;
            trace_line(cid, mnemonic(ins.op));
            c.status = ScalarCore::Status::WaitingBarrier;
            c.pc++;
            break;
        }
        case Opcode::Modeswitch:
            exec_modeswitch(cid, ins);
            break;
        case Opcode::CsrrVl: {
            if (!units_drained(cid)) {
                cc.offload_stall_cycle++;
                cc.idle_cycle++;
                trace_line(cid, std::string(mnemonic(ins.op)) + " stall=vector_drain");
                return;
            }
            std::vector<int> owned = owned_units(cid);
            c.x[ins.rd] = owned.empty() ? 0 : static_cast<int32_t>(units_[owned[0]].vl);
            cc.ifetch_scalar++;
            cc.active_cycle++;
            trace_line(cid, mnemonic(ins.op));
            c.pc++;
            break;
        }
        case Opcode::Nop:
            cc.ifetch_scalar++;
            cc.active_cycle++;
            trace_line(cid, mnemonic(ins.op));
            c.pc++;
            break;
        default: {
            uint32_t a = static_cast<uint32_t>(c.x[ins.rs1]);
            uint32_t b = static_cast<uint32_t>(c.x[ins.rs2]);
            uint32_t next_pc = c.pc + 1;
            switch (ins.op) {
                case Opcode::Li:
                    c.x[ins.rd] = ins.imm;
                    break;
                case Opcode::Mv:
                    c.x[ins.rd] = c.x[ins.rs1];
                    break;
                case Opcode::Add:
                    c.x[ins.rd] = static_cast<int32_t>(a + b);
                    break;
                case Opcode::Addi:
                    c.x[ins.rd] = static_cast<int32_t>(a + static_cast<uint32_t>(ins.imm));
                    break;
                case Opcode::Sub:
                    c.x[ins.rd] = static_cast<int32_t>(a - b);
                    break;
                case Opcode::Mul:
                    c.x[ins.rd] = static_cast<int32_t>(a * b);
                    break;
                case Opcode::And:
                    c.x[ins.rd] = static_cast<int32_t>(a & b);
                    break;
                case Opcode::Or:
                    c.x[ins.rd] = static_cast<int32_t>(a | b);
                    break;
                case Opcode::Xor:
                    c.x[ins.rd] = static_cast<int32_t>(a ^ b);
                    break;
                case Opcode::Slli:
                    c.x[ins.rd] = static_cast<int32_t>(a << (ins.imm & 31));
                    break;
                case Opcode::Srli:
                    c.x[ins.rd] = static_cast<int32_t>(a >> (ins.imm & 31));
                    break;
                case Opcode::Beq:
                    if (c.x[ins.rs1] == c.x[ins.rs2]) next_pc = static_cast<uint32_t>(ins.imm);
                    break;
                case Opcode::Bne:
                    if (c.x[ins.rs1] != c.x[ins.rs2]) next_pc = static_cast<uint32_t>(ins.imm);
                    break;
                case Opcode::Blt:
                    if (c.x[ins.rs1] < c.x[ins.rs2]) next_pc = static_cast<uint32_t>(ins.imm);
                    break;
                case Opcode::Bge:
                    if (c.x[ins.rs1] >= c.x[ins.rs2]) next_pc = static_cast<uint32_t>(ins.imm);
                    break;
                case Opcode::Jal:
                    c.x[ins.rd] = static_cast<int32_t>(c.pc + 1);
                    next_pc = static_cast<uint32_t>(ins.imm);
                    break;
                case Opcode::Jalr: {
                    int64_t tgt = static_cast<int64_t>(c.x[ins.rs1]) + ins.imm;
                    if (tgt < 0 || tgt >= static_cast<int64_t>(prog_.instrs.size()))
                        throw SimFault("jalr target out of range", cycle_, cid,
                                       static_cast<int32_t>(c.pc));
                    c.x[ins.rd] = static_cast<int32_t>(c.pc + 1);
                    next_pc = static_cast<uint32_t>(tgt);
                    break;
                }
                case Opcode::FaddS:
                    c.f[ins.rd] = c.f[ins.rs1] + c.f[ins.rs2];
                    break;
                case Opcode::FmulS:
                    c.f[ins.rd] = c.f[ins.rs1] * c.f[ins.rs2];
                    break;
                default:
                    throw std::logic_error("unhandled scalar opcode");
            }
            cc.ifetch_scalar++;
            cc.scalar_alu_op++;
            cc.active_cycle++;
            trace_line(cid, mnemonic(ins.op));
            c.pc = next_pc;
            break;
        }
    }
    c.x[0] = 0;
}

void Cluster::core_phase() {
    for (int cid = 0; cid < 2; ++cid) exec_core(cid);

    int waiting = 0, nonhalted = 0;
    for (const auto& c : cores_) {
        if (c.status != ScalarCore::Status::Halted) ++nonhalted;
        if (c.status == ScalarCore::Status::WaitingBarrier) ++waiting;
    }
    if (waiting > 0 && waiting == nonhalted) {
        for (auto& c : cores_)
            if (c.status == ScalarCore::Status::WaitingBarrier)
                c.status = ScalarCore::Status::Running;
        if (nonhalted == 1) degenerate_barriers_++;  // logged as a warning, not a fault
    }
}

void Cluster::trace_line(int cid, const std::string& text) {
    if (!trace_) return;
    *trace_ << "cycle=" << cycle_ << " core=" << cid << " pc=" << cores_[cid].pc << " "
            << text << "\n";
}

void Cluster::step() {
    ++cycle_;
    if (freeze_cycles_ > 0) {
        --freeze_cycles_;
        for (auto& cc : counters_.core) cc.idle_cycle++;
        for (auto& uc : counters_.unit) uc.idle_cycle++;
        return;
    }
    start_streams();
    memory_phase();
    advance_streams();
    core_phase();
}

RunOutcome Cluster::run_to_halt(uint64_t max_cycles) {
    while (!all_halted() && cycle_ < max_cycles) step();
    RunOutcome out;
    out.cycles = cycle_;
    out.timeout = !all_halted();
    out.counters = counters_;
    out.degenerate_barriers = degenerate_barriers_;
    return out;
}

}  // namespace spatzsim
