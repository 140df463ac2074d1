#include "gnconvert/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>

#include "gnconvert/activation.hpp"
#include "gnconvert/rng.hpp"

namespace gnc {

void TrainConfig::validate() const {
    if (arch.size() < 2) throw std::invalid_argument("architecture needs at least input and output widths");
    for (std::size_t w : arch) {
        if (w == 0) throw std::invalid_argument("architecture widths must be positive");
    }
    if (epochs < 0) throw std::invalid_argument("epochs must be >= 0");
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
        throw std::invalid_argument("learning rate must be finite and >= 0");
    }
    if (batch_size < 1) throw std::invalid_argument("batch size must be >= 1");
    if (L < 1) throw std::invalid_argument("quantization level L must be >= 1");
    if (calibration_samples < 1) throw std::invalid_argument("calibration needs at least one sample");
}

ModelSpec calibrate_lambda(const ModelSpec& model, const Dataset& sample, double floor) {
    const std::vector<Shape> shapes = model.validate();
    if (sample.size() == 0) throw std::invalid_argument("calibration sample is empty");
    if (sample.input_shape != model.input_shape) {
        throw std::invalid_argument("calibration sample shape " + to_string(sample.input_shape) +
                                    " does not match model input " + to_string(model.input_shape));
    }
    ModelSpec out = model;
    std::vector<Tensor> acts;
    acts.reserve(sample.size());
    for (std::size_t n = 0; n < sample.size(); ++n) {
        const auto x = sample.sample(n);
        acts.emplace_back(model.input_shape, std::vector<double>(x.begin(), x.end()));
    }
    for (std::size_t i = 0; i < out.layers.size(); ++i) {
        LayerSpec& layer = out.layers[i];
        double peak = floor;
        for (Tensor& a : acts) {
            a = apply_linear(layer, a, shapes[i]);
            for (double z : a.data) peak = std::max(peak, z);
        }
        if (!layer.activated) continue;
        layer.lambda = peak;
        const QCFSParams params{peak, out.L};
        for (Tensor& a : acts) {
            for (double& z : a.data) z = qcfs(z, params);
        }
    }
    return out;
}

namespace {

struct DenseParams {
    std::size_t in = 0, out = 0;
    std::vector<double> w;  // out x in
    std::vector<double> b;
};

// Dense QCFS network in the trainer's working form.
struct Net {
    std::vector<DenseParams> layers;
    std::vector<double> lambda;  // per activated layer
    int L = 4;
};

struct Workspace {
    std::vector<std::vector<double>> z, a, delta;

    explicit Workspace(const Net& net) {
        const std::size_t n = net.layers.size();
        z.resize(n);
        a.resize(n + 1);
        delta.resize(n);
        for (std::size_t l = 0; l < n; ++l) {
            z[l].resize(net.layers[l].out);
            a[l + 1].resize(net.layers[l].out);
            delta[l].resize(net.layers[l].out);
        }
    }
};

// Forward and backward pass for one sample. Adds the gradient of the softmax
// cross-entropy into `grad` and returns the loss.
double accumulate_sample(const Net& net, std::span<const double> x, int label, Workspace& ws,
                         std::vector<DenseParams>& grad) {
    const std::size_t n_layers = net.layers.size();
    ws.a[0].assign(x.begin(), x.end());
    for (std::size_t l = 0; l < n_layers; ++l) {
        const DenseParams& p = net.layers[l];
        for (std::size_t o = 0; o < p.out; ++o) {
            double acc = 0.0;
            for (std::size_t i = 0; i < p.in; ++i) acc += p.w[o * p.in + i] * ws.a[l][i];
            ws.z[l][o] = acc + p.b[o];
            ws.a[l + 1][o] = l + 1 < n_layers ? qcfs(ws.z[l][o], QCFSParams{net.lambda[l], net.L}) : ws.z[l][o];
        }
    }

    const std::vector<double>& logits = ws.z.back();
    const double peak = *std::max_element(logits.begin(), logits.end());
    double denom = 0.0;
    for (double v : logits) denom += std::exp(v - peak);
    const double loss = -(logits[static_cast<std::size_t>(label)] - peak - std::log(denom));
    for (std::size_t o = 0; o < logits.size(); ++o) {
        ws.delta.back()[o] = std::exp(logits[o] - peak) / denom - (static_cast<int>(o) == label ? 1.0 : 0.0);
    }

    for (std::size_t l = n_layers; l-- > 0;) {
        const DenseParams& p = net.layers[l];
        DenseParams& g = grad[l];
        for (std::size_t o = 0; o < p.out; ++o) {
            g.b[o] += ws.delta[l][o];
            for (std::size_t i = 0; i < p.in; ++i) g.w[o * p.in + i] += ws.delta[l][o] * ws.a[l][i];
        }
        if (l == 0) break;
        const QCFSParams prev{net.lambda[l - 1], net.L};
        for (std::size_t i = 0; i < p.in; ++i) {
            double back = 0.0;
            for (std::size_t o = 0; o < p.out; ++o) back += p.w[o * p.in + i] * ws.delta[l][o];
            ws.delta[l - 1][i] = back * qcfs_ste_grad(ws.z[l - 1][i], prev);
        }
    }
    return loss;
}

std::vector<DenseParams> zeros_like(const std::vector<DenseParams>& layers) {
    std::vector<DenseParams> out = layers;
    for (DenseParams& g : out) {
        std::fill(g.w.begin(), g.w.end(), 0.0);
        std::fill(g.b.begin(), g.b.end(), 0.0);
    }
    return out;
}

Net net_from_model(const ModelSpec& model) {
    model.validate();
    Net net;
    net.L = model.L;
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        const LayerSpec& layer = model.layers[l];
        if (layer.kind != LayerKind::dense) throw std::invalid_argument("the trainer handles dense layers only");
        DenseParams p;
        p.out = layer.shape[0];
        p.in = layer.shape[1];
        p.w = layer.weights;
        p.b = layer.bias.empty() ? std::vector<double>(p.out, 0.0) : layer.bias;
        net.layers.push_back(std::move(p));
        if (l + 1 < model.layers.size()) {
            if (!layer.activated || !layer.lambda) {
                throw std::invalid_argument("hidden layer " + std::to_string(l) + " needs QCFS with lambda");
            }
            net.lambda.push_back(*layer.lambda);
        }
    }
    return net;
}

std::string join(const std::vector<std::size_t>& v) {
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    return os.str();
}

}  // namespace

SampleGradient loss_gradient(const ModelSpec& model, std::span<const double> input, int label) {
    const Net net = net_from_model(model);
    if (input.size() != net.layers.front().in) throw std::invalid_argument("input width does not match the model");
    if (label < 0 || static_cast<std::size_t>(label) >= net.layers.back().out) {
        throw std::invalid_argument("label out of range");
    }
    Workspace ws(net);
    std::vector<DenseParams> grad = zeros_like(net.layers);
    SampleGradient out;
    out.loss = accumulate_sample(net, input, label, ws, grad);
    for (DenseParams& g : grad) {
        out.weights.push_back(std::move(g.w));
        out.bias.push_back(std::move(g.b));
    }
    return out;
}

TrainResult train(const Dataset& data, const TrainConfig& cfg) {
    cfg.validate();
    data.validate();
    if (data.input_shape != Shape{cfg.arch.front()}) {
        throw std::invalid_argument("dataset input shape " + to_string(data.input_shape) +
                                    " does not match architecture input width " + std::to_string(cfg.arch.front()));
    }
    if (data.num_classes > cfg.arch.back()) {
        throw std::invalid_argument("dataset has " + std::to_string(data.num_classes) + " classes, output layer has " +
                                    std::to_string(cfg.arch.back()));
    }

    Rng rng(cfg.seed);
    const std::size_t n_layers = cfg.arch.size() - 1;
    Net net;
    net.L = cfg.L;
    net.layers.resize(n_layers);
    net.lambda.assign(n_layers - 1, 1.0);
    for (std::size_t l = 0; l < n_layers; ++l) {
        DenseParams& p = net.layers[l];
        p.in = cfg.arch[l];
        p.out = cfg.arch[l + 1];
        const double limit = std::sqrt(6.0 / static_cast<double>(p.in + p.out));
        p.w.resize(p.in * p.out);
        for (double& w : p.w) w = rng.uniform(-limit, limit);
        p.b.assign(p.out, 0.0);
    }

    ModelSpec model;
    model.input_shape = {cfg.arch.front()};
    model.L = cfg.L;
    model.metadata = {
        {"arch", join(cfg.arch)},
        {"batch_size", std::to_string(cfg.batch_size)},
        {"epochs", std::to_string(cfg.epochs)},
        {"learning_rate", std::to_string(cfg.learning_rate)},
        {"seed", std::to_string(cfg.seed)},
        {"trainer", "minibatch-sgd, softmax cross-entropy, straight-through QCFS"},
    };
    auto sync_model = [&] {
        model.layers.resize(n_layers);
        for (std::size_t l = 0; l < n_layers; ++l) {
            LayerSpec& layer = model.layers[l];
            layer.kind = LayerKind::dense;
            layer.shape = {net.layers[l].out, net.layers[l].in};
            layer.weights = net.layers[l].w;
            layer.bias = net.layers[l].b;
            layer.activated = l + 1 < n_layers;
        }
    };
    sync_model();

    const Dataset calib = data.head(cfg.calibration_samples);
    auto recalibrate = [&] {
        model = calibrate_lambda(model, calib);
        for (std::size_t l = 0; l + 1 < n_layers; ++l) net.lambda[l] = *model.layers[l].lambda;
    };

    Workspace ws(net);
    std::vector<DenseParams> grad = zeros_like(net.layers);
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    TrainResult result;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        recalibrate();
        rng.shuffle(std::span<std::size_t>(order));
        double loss_sum = 0.0;

        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
            for (DenseParams& g : grad) {
                std::fill(g.w.begin(), g.w.end(), 0.0);
                std::fill(g.b.begin(), g.b.end(), 0.0);
            }
            for (std::size_t s = start; s < stop; ++s) {
                const std::size_t n = order[s];
                loss_sum += accumulate_sample(net, data.sample(n), data.labels[n], ws, grad);
            }
            const double step = cfg.learning_rate / static_cast<double>(stop - start);
            for (std::size_t l = 0; l < n_layers; ++l) {
                DenseParams& p = net.layers[l];
                for (std::size_t k = 0; k < p.w.size(); ++k) p.w[k] -= step * grad[l].w[k];
                for (std::size_t k = 0; k < p.b.size(); ++k) p.b[k] -= step * grad[l].b[k];
            }
        }

        const double mean_loss = loss_sum / static_cast<double>(data.size());
        if (!std::isfinite(mean_loss)) {
            throw std::runtime_error("training diverged: non-finite loss in epoch " + std::to_string(epoch + 1) +
                                     " (try a smaller learning rate)");
        }
        result.epoch_loss.push_back(mean_loss);
        sync_model();
    }

    sync_model();
    recalibrate();
    if (!result.epoch_loss.empty()) {
        std::ostringstream os;
        os.precision(17);
        os << result.epoch_loss.back();
        model.metadata["final_train_loss"] = os.str();
    }
    result.model = std::move(model);
    return result;
}

}  // namespace gnc
