#pragma once

#include "gnconvert/model.hpp"

namespace gnc {

/// IF conversion: every activated layer gets theta = lambda. Weights and
/// biases are untouched. Throws if an activated layer has no lambda.
ModelSpec ann_to_snn(const ModelSpec& model);

/// Group Neuron replacement with one global tau: every spiking layer keeps
/// theta and gains tau, i.e. theta_gn = theta/tau and member thresholds
/// theta*i/tau for i = 1..tau. Requires an IF-converted model and tau >= 1.
ModelSpec replace_if_with_gn(const ModelSpec& model, int tau);

}  // namespace gnc
