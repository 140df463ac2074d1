#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gnconvert/model.hpp"

namespace gnc {

enum class NeuronKind { if_neuron, group };

const char* to_string(NeuronKind kind);

// Initial membrane potential of every spiking neuron: 0, or half of the
// per-spike threshold (theta/2 for IF, theta_gn/2 for GN).
enum class V0Policy { zero, half_threshold };

const char* to_string(V0Policy p);
V0Policy v0_policy_from_string(const std::string& s);

// The raw input is injected as a constant current at every step.
enum class Encoding { direct_constant };
// The output layer does not spike; its affine output is averaged over T.
enum class Decoding { accumulate_output };

struct SimConfig {
    int T = 4;
    NeuronKind neuron = NeuronKind::if_neuron;
    int tau = 1;
    V0Policy v0 = V0Policy::half_threshold;
    Encoding encoding = Encoding::direct_constant;
    Decoding decoding = Decoding::accumulate_output;

    void validate() const;
    /// Members per neuron: 1 for IF.
    int members() const { return neuron == NeuronKind::group ? tau : 1; }
};

/// Simulation settings implied by a converted model's tags: GN(tau) when its
/// spiking layers carry tau, IF otherwise.
SimConfig sim_for_model(const ModelSpec& model, int T, V0Policy v0 = V0Policy::half_threshold);

struct LayerTrace {
    bool spiking = false;
    std::size_t neurons = 0;
    double theta = 0.0;             // IF threshold of the layer
    double per_spike_weight = 0.0;  // theta (IF) or theta/tau (GN)
    std::vector<std::int32_t> counts;  // T x neurons, row t holds step t+1
    std::vector<double> v0;
    std::vector<double> vT;

    std::span<const std::int32_t> step_counts(int t) const;
};

struct Trace {
    int T = 0;
    std::vector<LayerTrace> layers;  // one entry per model layer
    // Running sum of the output layer's affine output after each step, T x n_out.
    std::vector<double> output_accumulated;
    std::size_t n_out = 0;
};

struct SnnResult {
    std::vector<double> logits;
    Trace trace;
};

/// QCFS network: activated layers apply qcfs to W*a + b, the final layer
/// returns its raw affine output.
std::vector<double> ann_forward(const ModelSpec& model, std::span<const double> input);

/// Time-stepped spiking network. Every activated layer must carry theta.
/// Neuron kind and tau come from `sim`; thresholds from the model.
SnnResult snn_forward(const ModelSpec& model, std::span<const double> input, const SimConfig& sim);

/// Average postsynaptic potential per neuron of `layer` over the first T
/// steps: (sum of counts) * per_spike_weight / T.
std::vector<double> phi(const Trace& trace, std::size_t layer, double per_spike_weight, int T);

/// Class with the largest logit; ties go to the lowest index.
std::size_t argmax(std::span<const double> logits);

}  // namespace gnc
