#include "gnconvert/activation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace gnc {

void QCFSParams::validate() const {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw std::invalid_argument("QCFS lambda must be finite and > 0, got " + std::to_string(lambda));
    }
    if (L < 1) {
        throw std::invalid_argument("QCFS quantization level L must be >= 1, got " + std::to_string(L));
    }
}

// The SIMD kernels replicate this exact operation order; keep them in sync.
double qcfs(double z, const QCFSParams& params) {
    const double L = static_cast<double>(params.L);
    double level = std::floor((z * L) / params.lambda + 0.5) / L;
    level = std::clamp(level, 0.0, 1.0);
    return params.lambda * level;
}

double relu(double z) {
    return z > 0.0 ? z : 0.0;
}

double qcfs_ste_grad(double z, const QCFSParams& params) {
    return (z > 0.0 && z < params.lambda) ? 1.0 : 0.0;
}

}  // namespace gnc
