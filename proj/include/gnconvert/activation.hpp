#pragma once

namespace gnc {

// Quantization clip-floor-shift activation parameters: output threshold
// lambda and quantization level L.
struct QCFSParams {
    double lambda = 1.0;
    int L = 4;

    void validate() const;
};

/// lambda * clip(floor(z*L/lambda + 0.5) / L, 0, 1). The output is one of
/// 0, lambda/L, ..., lambda; inputs sitting exactly on a step boundary take
/// the upper step.
double qcfs(double z, const QCFSParams& params);

double relu(double z);

/// Straight-through gradient of qcfs with respect to z: the derivative of the
/// clip(z, 0, lambda) envelope, 1 on (0, lambda) and 0 elsewhere.
double qcfs_ste_grad(double z, const QCFSParams& params);

}  // namespace gnc
