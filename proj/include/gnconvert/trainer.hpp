#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gnconvert/dataset.hpp"
#include "gnconvert/model.hpp"

namespace gnc {

struct TrainConfig {
    std::vector<std::size_t> arch{2, 16, 2};  // input width, hidden widths..., classes
    int epochs = 60;
    double learning_rate = 0.05;
    std::size_t batch_size = 32;
    int L = 4;
    std::uint64_t seed = 0;
    // Samples used to re-fit lambda at the start of every epoch and after training.
    std::size_t calibration_samples = 1024;

    void validate() const;
};

struct TrainResult {
    ModelSpec model;
    std::vector<double> epoch_loss;  // mean cross-entropy seen during each epoch
};

/// Mini-batch SGD on softmax cross-entropy for a dense QCFS network. The
/// quantizer is bypassed in the backward pass (straight-through, see
/// qcfs_ste_grad). lambda is not learned: it is recalibrated from the data.
/// Throws std::runtime_error if the loss becomes non-finite.
TrainResult train(const Dataset& data, const TrainConfig& cfg);

struct SampleGradient {
    double loss = 0.0;
    std::vector<std::vector<double>> weights;  // per layer, row-major like LayerSpec::weights
    std::vector<std::vector<double>> bias;
};

/// Softmax cross-entropy of one labelled sample under a dense QCFS model and
/// its gradient as used by train(): exact through the affine layers,
/// straight-through across each quantizer.
SampleGradient loss_gradient(const ModelSpec& model, std::span<const double> input, int label);

inline constexpr double kLambdaFloor = 1e-3;

/// Sets each activated layer's lambda to the largest pre-activation it sees
/// over `sample` (at least `floor`), layer by layer, so every layer is fitted
/// to the quantized outputs of the layers before it.
ModelSpec calibrate_lambda(const ModelSpec& model, const Dataset& sample, double floor = kLambdaFloor);

}  // namespace gnc
