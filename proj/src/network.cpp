#include "gnconvert/network.hpp"

#include <stdexcept>

#include "gnconvert/kernels.hpp"
#include "gnconvert/neuron.hpp"

namespace gnc {

const char* to_string(NeuronKind kind) {
    return kind == NeuronKind::group ? "gn" : "if";
}

const char* to_string(V0Policy p) {
    return p == V0Policy::zero ? "zero" : "half_threshold";
}

V0Policy v0_policy_from_string(const std::string& s) {
    if (s == "zero") return V0Policy::zero;
    if (s == "half" || s == "half_threshold") return V0Policy::half_threshold;
    throw std::invalid_argument("unknown v0 policy '" + s + "' (expected zero|half_threshold)");
}

void SimConfig::validate() const {
    if (T < 1) throw std::invalid_argument("time-steps T must be >= 1, got " + std::to_string(T));
    if (tau < 1) throw std::invalid_argument("tau must be >= 1, got " + std::to_string(tau));
}

SimConfig sim_for_model(const ModelSpec& model, int T, V0Policy v0) {
    SimConfig sim;
    sim.T = T;
    sim.v0 = v0;
    for (const LayerSpec& layer : model.layers) {
        if (layer.tau) {
            sim.neuron = NeuronKind::group;
            sim.tau = *layer.tau;
            break;
        }
    }
    return sim;
}

std::span<const std::int32_t> LayerTrace::step_counts(int t) const {
    return std::span<const std::int32_t>(counts).subspan(static_cast<std::size_t>(t) * neurons, neurons);
}

namespace {

void check_input(const ModelSpec& model, std::span<const double> input) {
    if (input.size() != numel(model.input_shape)) {
        throw std::invalid_argument("input has " + std::to_string(input.size()) + " values, model expects shape " +
                                    to_string(model.input_shape));
    }
}

}  // namespace

std::vector<double> ann_forward(const ModelSpec& model, std::span<const double> input) {
    const std::vector<Shape> shapes = model.validate();
    check_input(model, input);
    const auto& k = kernels::active();

    Tensor cur(model.input_shape, std::vector<double>(input.begin(), input.end()));
    for (std::size_t i = 0; i < model.layers.size(); ++i) {
        const LayerSpec& layer = model.layers[i];
        Tensor z = apply_linear(layer, cur, shapes[i]);
        if (layer.activated) {
            const QCFSParams params = layer.qcfs_params(model.L);
            k.qcfs(z.data, params.lambda, params.L, z.data);
        }
        cur = std::move(z);
    }
    return std::move(cur.data);
}

SnnResult snn_forward(const ModelSpec& model, std::span<const double> input, const SimConfig& sim) {
    const std::vector<Shape> shapes = model.validate();
    check_input(model, input);
    sim.validate();
    const auto& k = kernels::active();
    const std::size_t n_layers = model.layers.size();

    SnnResult result;
    Trace& trace = result.trace;
    trace.T = sim.T;
    trace.layers.resize(n_layers);
    trace.n_out = numel(shapes.back());
    trace.output_accumulated.assign(static_cast<std::size_t>(sim.T) * trace.n_out, 0.0);

    std::vector<std::vector<double>> v(n_layers);
    for (std::size_t i = 0; i + 1 < n_layers; ++i) {
        const LayerSpec& layer = model.layers[i];
        if (!layer.activated) continue;
        if (!layer.theta) {
            throw std::invalid_argument("layer " + std::to_string(i) + " (" + to_string(layer.kind) +
                                        "): model is not converted (no theta)");
        }
        LayerTrace& lt = trace.layers[i];
        lt.spiking = true;
        lt.neurons = numel(shapes[i]);
        lt.theta = *layer.theta;
        lt.per_spike_weight =
            sim.neuron == NeuronKind::group ? GNConfig(lt.theta, sim.tau).theta_gn() : lt.theta;
        lt.counts.assign(static_cast<std::size_t>(sim.T) * lt.neurons, 0);
        const double v_init = sim.v0 == V0Policy::half_threshold ? lt.per_spike_weight / 2.0 : 0.0;
        lt.v0.assign(lt.neurons, v_init);
        v[i] = lt.v0;
    }

    std::vector<double> acc(trace.n_out, 0.0);
    const Tensor input_tensor(model.input_shape, std::vector<double>(input.begin(), input.end()));
    for (int t = 0; t < sim.T; ++t) {
        Tensor cur = input_tensor;
        for (std::size_t i = 0; i < n_layers; ++i) {
            const LayerSpec& layer = model.layers[i];
            Tensor z = apply_linear(layer, cur, shapes[i]);
            if (i + 1 == n_layers) {
                k.accumulate(acc, z.data);
                std::copy(acc.begin(), acc.end(),
                          trace.output_accumulated.begin() + static_cast<std::ptrdiff_t>(t * trace.n_out));
            } else if (trace.layers[i].spiking) {
                LayerTrace& lt = trace.layers[i];
                std::span<std::int32_t> counts(lt.counts.data() + static_cast<std::size_t>(t) * lt.neurons, lt.neurons);
                Tensor psp(shapes[i]);
                if (sim.neuron == NeuronKind::group) {
                    k.gn_step(v[i], z.data, lt.theta, sim.tau, counts, psp.data);
                } else {
                    k.if_step(v[i], z.data, lt.theta, counts, psp.data);
                }
                cur = std::move(psp);
            } else {
                cur = std::move(z);
            }
        }
    }

    for (std::size_t i = 0; i < n_layers; ++i) {
        if (trace.layers[i].spiking) trace.layers[i].vT = v[i];
    }
    result.logits.resize(trace.n_out);
    for (std::size_t j = 0; j < trace.n_out; ++j) {
        result.logits[j] = acc[j] / static_cast<double>(sim.T);
    }
    return result;
}

std::vector<double> phi(const Trace& trace, std::size_t layer, double per_spike_weight, int T) {
    if (layer >= trace.layers.size()) {
        throw std::out_of_range("trace has no layer " + std::to_string(layer));
    }
    if (T < 1 || T > trace.T) {
        throw std::invalid_argument("phi over " + std::to_string(T) + " steps, trace covers " + std::to_string(trace.T));
    }
    const LayerTrace& lt = trace.layers[layer];
    std::vector<double> out(lt.neurons, 0.0);
    for (std::size_t j = 0; j < lt.neurons; ++j) {
        std::int64_t total = 0;
        for (int t = 0; t < T; ++t) {
            total += lt.counts[static_cast<std::size_t>(t) * lt.neurons + j];
        }
        out[j] = (static_cast<double>(total) * per_spike_weight) / static_cast<double>(T);
    }
    return out;
}

std::size_t argmax(std::span<const double> logits) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < logits.size(); ++j) {
        if (logits[j] > logits[best]) best = j;
    }
    return best;
}

}  // namespace gnc
