#include "gnconvert/conversion.hpp"

#include <stdexcept>
#include <string>

namespace gnc {

ModelSpec ann_to_snn(const ModelSpec& model) {
    model.validate();
    ModelSpec out = model;
    for (std::size_t i = 0; i < out.layers.size(); ++i) {
        LayerSpec& layer = out.layers[i];
        if (!layer.activated) continue;
        if (!layer.lambda) {
            throw std::invalid_argument("layer " + std::to_string(i) + " (" + to_string(layer.kind) +
                                        "): activated layer has no lambda to map onto a threshold");
        }
        layer.theta = *layer.lambda;
        layer.tau.reset();
    }
    out.metadata["snn"] = "if";
    out.metadata.erase("tau");
    return out;
}

ModelSpec replace_if_with_gn(const ModelSpec& model, int tau) {
    if (tau < 1) {
        throw std::invalid_argument("tau must be >= 1, got " + std::to_string(tau));
    }
    model.validate();
    ModelSpec out = model;
    for (std::size_t i = 0; i < out.layers.size(); ++i) {
        LayerSpec& layer = out.layers[i];
        if (!layer.activated) continue;
        if (!layer.theta) {
            throw std::invalid_argument("layer " + std::to_string(i) + " (" + to_string(layer.kind) +
                                        "): not an IF-converted layer (no theta)");
        }
        // theta stays the IF threshold; theta_gn and the member thresholds follow from (theta, tau).
        layer.tau = tau;
    }
    out.metadata["snn"] = "gn";
    out.metadata["tau"] = std::to_string(tau);
    return out;
}

}  // namespace gnc
