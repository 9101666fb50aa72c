#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spatzsim/config.hpp"
#include "spatzsim/isa.hpp"

namespace spatzsim {

enum class KernelName { Axpy, Dotp, Matmul, Fir, Relu, Fft };
enum class Variant { SplitSingle, SplitDual, MergeSingle };
enum class Dtype { Int32, Fp32 };

const char* to_string(KernelName k);
const char* to_string(Variant v);
const char* to_string(Dtype d);
std::optional<KernelName> kernel_from_string(const std::string& s);
std::optional<Variant> variant_from_string(const std::string& s);
std::optional<Dtype> dtype_from_string(const std::string& s);

// A kernel request. `n` is the vector length (or fft size, or matmul column
// count); matmul additionally uses m and k.
struct KernelSpec {
    KernelName name = KernelName::Axpy;
    uint32_t n = 4096;
    uint32_t m = 64;
    uint32_t k = 64;
    uint32_t taps = 16;
    Dtype dtype = Dtype::Int32;
    Variant variant = Variant::SplitSingle;
    uint64_t seed = 1;

    // default problem size and datatype for a kernel
    static KernelSpec defaults(KernelName name);
    void validate() const;
    std::string problem() const;
};

// An output region to verify against the host oracle. For fp regions the
// check is |sim - expected| / max(|expected|, floor) <= tol per element.
// When expected_im is non-empty the region holds complex bins split across
// two arrays (real at addr, imaginary at addr_im) and the relative error is
// measured bin-wise on the complex value.
struct CheckRegion {
    std::string label;
    uint32_t addr = 0;
    std::vector<uint32_t> expected;
    bool fp = false;
    double tol = 0.0;
    double floor = 1e-6;
    uint32_t addr_im = 0;
    std::vector<uint32_t> expected_im;
};

struct GeneratedKernel {
    Program program;
    std::vector<CheckRegion> checks;
    Mode required_mode = Mode::split();  // initial cluster mode for this variant
    std::string problem;
    std::string dtype;
};

GeneratedKernel generate_kernel(const KernelSpec& spec, const ClusterConfig& cfg);

// CoreMark-style scalar control task: linked-list walk, bitwise CRC-16
// (poly 0x8005, MSB first), and a 16-state table-driven state machine,
// iterated and folded into one checksum.
struct ScalarWorkloadSpec {
    uint64_t iterations = 8;
    uint32_t msg_len = 4;             // bytes fed to CRC and FSM per iteration
    uint64_t seed = 1;
    uint32_t region_base = 96 * 1024; // scratchpad placement
};

struct ScalarOracle {
    uint32_t checksum = 0;
    uint32_t crc = 0;
    uint32_t list_visits = 0;
    uint32_t list_sum = 0;
    uint32_t fsm_state = 0;
};

struct GeneratedScalar {
    Program program;
    uint32_t out_addr = 0;
    ScalarOracle oracle;
    std::vector<CheckRegion> checks;
};

GeneratedScalar generate_scalar_workload(const ScalarWorkloadSpec& spec);

// Mixed experiment layouts. Split: both cores drive their own units through
// the data-parallel kernel, so the scalar task has no core until the kernel
// finishes and runs on core 1 afterwards. Merge: core 0 switches to merge
// mode and drives both units while the freed core 1 runs the scalar task
// concurrently. Both programs start in split mode.
struct GeneratedMixed {
    Program split_program;
    Program merge_program;
    std::vector<CheckRegion> checks;
    std::string problem;
};

GeneratedMixed generate_mixed(const KernelSpec& kernel, const ScalarWorkloadSpec& scalar,
                              const ClusterConfig& cfg);

// Host-side reference oracles (no simulator involvement).
void oracle_axpy_i32(int32_t a, const std::vector<int32_t>& x, std::vector<int32_t>& y);
void oracle_axpy_f32(float a, const std::vector<float>& x, std::vector<float>& y);
int32_t oracle_dotp_i32(const std::vector<int32_t>& x, const std::vector<int32_t>& y);
double oracle_dotp_f64(const std::vector<float>& x, const std::vector<float>& y);
void oracle_matmul_i32(const std::vector<int32_t>& a, const std::vector<int32_t>& b,
                       std::vector<int32_t>& c, uint32_t m, uint32_t k, uint32_t n);
void oracle_matmul_f32(const std::vector<float>& a, const std::vector<float>& b,
                       std::vector<float>& c, uint32_t m, uint32_t k, uint32_t n);
void oracle_relu_i32(const std::vector<int32_t>& x, std::vector<int32_t>& y);
void oracle_relu_f32(const std::vector<float>& x, std::vector<float>& y);
void oracle_fir_i32(const std::vector<int32_t>& x, const std::vector<int32_t>& h,
                    std::vector<int32_t>& y, uint32_t n);
void oracle_fir_f32(const std::vector<float>& x, const std::vector<float>& h,
                    std::vector<float>& y, uint32_t n);
// Forward DFT of the natural-order input, natural-order spectrum out.
std::vector<std::complex<double>> oracle_fft(const std::vector<std::complex<double>>& x);
// Naive O(n^2) DFT, used to cross-check the fft oracle itself.
std::vector<std::complex<double>> naive_dft(const std::vector<std::complex<double>>& x);
ScalarOracle oracle_scalar(const ScalarWorkloadSpec& spec);

// MSB-first bitwise CRC-16, poly 0x8005, init 0 (the scalar workload's CRC).
uint32_t crc16(const std::vector<uint8_t>& bytes);

uint32_t bit_reverse(uint32_t v, uint32_t bits);

}  // namespace spatzsim
