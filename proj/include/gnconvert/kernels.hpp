#pragma once

// Data-parallel inner loops of the engine. Each instruction set provides the
// same table of kernels; every variant must reproduce the scalar reference
// bit-for-bit (same operation order, no fused multiply-add), which the
// equivalence tests enforce. The active table is picked once at startup from
// the CPU's capabilities, or from GNCONVERT_KERNELS=scalar|avx2|neon.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gnc::kernels {

struct KernelTable {
    const char* name;

    // y[o] = (sum over i, in increasing order, of w[o*n_in + i] * x[i]) + bias[o].
    // `bias` may be empty. n_in = x.size(), w.size() == y.size() * n_in.
    void (*dense)(std::span<const double> w, std::span<const double> bias, std::span<const double> x,
                  std::span<double> y);

    // out[j] = qcfs(z[j]) with threshold lambda and level L.
    void (*qcfs)(std::span<const double> z, double lambda, int L, std::span<double> out);

    // One IF time-step for a whole layer; v is updated in place.
    void (*if_step)(std::span<double> v, std::span<const double> current, double theta,
                    std::span<std::int32_t> counts, std::span<double> psp);

    // One GN time-step (closed-form count) for a whole layer; v is updated in place.
    void (*gn_step)(std::span<double> v, std::span<const double> current, double theta, int tau,
                    std::span<std::int32_t> counts, std::span<double> psp);

    // acc[j] += x[j]
    void (*accumulate)(std::span<double> acc, std::span<const double> x);
};

const KernelTable& scalar();

/// Tables compiled into this build and usable on this CPU, scalar first.
std::vector<const KernelTable*> available();

/// Table used by the network; defaults to the widest available ISA.
const KernelTable& active();

/// Select a table by name ("scalar", "avx2", "neon", or "auto").
/// Throws std::invalid_argument if it is not available.
void set_active(std::string_view name);

}  // namespace gnc::kernels
