#include "gnconvert/model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "gnconvert/kernels.hpp"

namespace gnc {

std::size_t numel(const Shape& shape) {
    std::size_t n = 1;
    for (std::size_t d : shape) {
        n *= d;
    }
    return n;
}

std::string to_string(const Shape& shape) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < shape.size(); ++i) {
        os << (i ? "," : "") << shape[i];
    }
    os << ']';
    return os.str();
}

Tensor::Tensor(Shape s, std::vector<double> d) : shape(std::move(s)), data(std::move(d)) {
    if (data.size() != numel(shape)) {
        throw std::invalid_argument("tensor data size " + std::to_string(data.size()) + " does not match shape " +
                                    gnc::to_string(shape));
    }
}

const char* to_string(LayerKind kind) {
    switch (kind) {
        case LayerKind::dense: return "dense";
        case LayerKind::conv2d: return "conv2d";
        case LayerKind::avgpool2d: return "avgpool2d";
        case LayerKind::flatten: return "flatten";
    }
    return "?";
}

LayerKind layer_kind_from_string(const std::string& s) {
    if (s == "dense") return LayerKind::dense;
    if (s == "conv2d") return LayerKind::conv2d;
    if (s == "avgpool2d") return LayerKind::avgpool2d;
    if (s == "flatten") return LayerKind::flatten;
    throw std::invalid_argument("unknown layer kind '" + s + "'");
}

QCFSParams LayerSpec::qcfs_params(int L) const {
    if (!lambda) {
        throw std::invalid_argument("activated layer has no lambda");
    }
    QCFSParams p{*lambda, L};
    p.validate();
    return p;
}

namespace {

[[noreturn]] void layer_error(std::size_t index, const LayerSpec& layer, const std::string& what) {
    throw std::invalid_argument("layer " + std::to_string(index) + " (" + to_string(layer.kind) + "): " + what);
}

Shape infer_output(std::size_t index, const LayerSpec& layer, const Shape& in) {
    const auto& s = layer.shape;
    switch (layer.kind) {
        case LayerKind::dense: {
            if (s.size() != 2) layer_error(index, layer, "shape must be {out, in}");
            if (in.size() != 1 || in[0] != s[1]) {
                layer_error(index, layer, "expects input " + to_string(Shape{s[1]}) + ", got " + to_string(in));
            }
            return {s[0]};
        }
        case LayerKind::conv2d: {
            if (s.size() != 4) layer_error(index, layer, "shape must be {out_c, in_c, kh, kw}");
            if (in.size() != 3 || in[0] != s[1]) {
                layer_error(index, layer, "expects input {" + std::to_string(s[1]) + ", H, W}, got " + to_string(in));
            }
            if (layer.stride < 1) layer_error(index, layer, "stride must be >= 1");
            const std::size_t h = in[1] + 2 * layer.padding;
            const std::size_t w = in[2] + 2 * layer.padding;
            if (h < s[2] || w < s[3]) layer_error(index, layer, "kernel larger than padded input");
            return {s[0], (h - s[2]) / layer.stride + 1, (w - s[3]) / layer.stride + 1};
        }
        case LayerKind::avgpool2d: {
            if (s.size() != 1 || s[0] < 1) layer_error(index, layer, "shape must be {k} with k >= 1");
            if (in.size() != 3) layer_error(index, layer, "expects input {C, H, W}, got " + to_string(in));
            if (in[1] < s[0] || in[2] < s[0]) layer_error(index, layer, "window larger than input");
            return {in[0], in[1] / s[0], in[2] / s[0]};
        }
        case LayerKind::flatten:
            return {numel(in)};
    }
    layer_error(index, layer, "unknown kind");
}

}  // namespace

std::vector<Shape> ModelSpec::validate() const {
    if (L < 1) throw std::invalid_argument("model quantization level L must be >= 1");
    if (layers.empty()) throw std::invalid_argument("model has no layers");
    if (input_shape.empty() || numel(input_shape) == 0) throw std::invalid_argument("model input shape is empty");

    std::vector<Shape> shapes;
    shapes.reserve(layers.size());
    Shape cur = input_shape;
    std::optional<int> common_tau;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const LayerSpec& layer = layers[i];
        cur = infer_output(i, layer, cur);

        if (layer.has_weights()) {
            const std::size_t expected = numel(layer.shape);
            if (layer.weights.size() != expected) {
                layer_error(i, layer, "has " + std::to_string(layer.weights.size()) + " weights, shape needs " +
                                          std::to_string(expected));
            }
            if (!layer.bias.empty() && layer.bias.size() != layer.shape[0]) {
                layer_error(i, layer, "bias length must equal " + std::to_string(layer.shape[0]));
            }
        } else if (!layer.weights.empty() || !layer.bias.empty()) {
            layer_error(i, layer, "carries no parameters");
        }

        if (layer.activated && !layer.has_weights()) layer_error(i, layer, "only dense/conv2d layers can be activated");
        if (!layer.activated && (layer.lambda || layer.theta || layer.tau)) {
            layer_error(i, layer, "lambda/theta/tau given on a non-activated layer");
        }
        if (layer.lambda && !(*layer.lambda > 0.0 && std::isfinite(*layer.lambda))) {
            layer_error(i, layer, "lambda must be finite and > 0");
        }
        if (layer.theta && !(*layer.theta > 0.0 && std::isfinite(*layer.theta))) {
            layer_error(i, layer, "theta must be finite and > 0");
        }
        if (layer.tau) {
            if (*layer.tau < 1) layer_error(i, layer, "tau must be >= 1");
            if (!layer.theta) layer_error(i, layer, "tau requires theta");
            if (common_tau && *common_tau != *layer.tau) layer_error(i, layer, "tau differs from earlier layers");
            common_tau = layer.tau;
        }
        shapes.push_back(cur);
    }
    if (layers.back().activated) {
        throw std::invalid_argument("layer " + std::to_string(layers.size() - 1) +
                                    ": the final layer must not be activated");
    }
    return shapes;
}

std::size_t ModelSpec::output_size() const {
    return numel(validate().back());
}

namespace {

void conv2d_naive(const LayerSpec& layer, const Tensor& in, Tensor& out) {
    const std::size_t oc_n = layer.shape[0], ic_n = layer.shape[1], kh = layer.shape[2], kw = layer.shape[3];
    const std::size_t ih = in.shape[1], iw = in.shape[2];
    const std::size_t oh = out.shape[1], ow = out.shape[2];
    const auto pad = static_cast<std::ptrdiff_t>(layer.padding);
    for (std::size_t oc = 0; oc < oc_n; ++oc) {
        for (std::size_t oy = 0; oy < oh; ++oy) {
            for (std::size_t ox = 0; ox < ow; ++ox) {
                double acc = 0.0;
                for (std::size_t ic = 0; ic < ic_n; ++ic) {
                    for (std::size_t ky = 0; ky < kh; ++ky) {
                        const auto y = static_cast<std::ptrdiff_t>(oy * layer.stride + ky) - pad;
                        if (y < 0 || y >= static_cast<std::ptrdiff_t>(ih)) continue;
                        for (std::size_t kx = 0; kx < kw; ++kx) {
                            const auto x = static_cast<std::ptrdiff_t>(ox * layer.stride + kx) - pad;
                            if (x < 0 || x >= static_cast<std::ptrdiff_t>(iw)) continue;
                            const double w = layer.weights[((oc * ic_n + ic) * kh + ky) * kw + kx];
                            acc += w * in.data[(ic * ih + static_cast<std::size_t>(y)) * iw + static_cast<std::size_t>(x)];
                        }
                    }
                }
                out.data[(oc * oh + oy) * ow + ox] = layer.bias.empty() ? acc : acc + layer.bias[oc];
            }
        }
    }
}

void avgpool2d_naive(const LayerSpec& layer, const Tensor& in, Tensor& out) {
    const std::size_t k = layer.shape[0];
    const std::size_t ih = in.shape[1], iw = in.shape[2];
    const std::size_t oh = out.shape[1], ow = out.shape[2];
    const auto window = static_cast<double>(k * k);
    for (std::size_t c = 0; c < out.shape[0]; ++c) {
        for (std::size_t oy = 0; oy < oh; ++oy) {
            for (std::size_t ox = 0; ox < ow; ++ox) {
                double acc = 0.0;
                for (std::size_t dy = 0; dy < k; ++dy) {
                    for (std::size_t dx = 0; dx < k; ++dx) {
                        acc += in.data[(c * ih + oy * k + dy) * iw + ox * k + dx];
                    }
                }
                out.data[(c * oh + oy) * ow + ox] = acc / window;
            }
        }
    }
}

}  // namespace

Tensor apply_linear(const LayerSpec& layer, const Tensor& in, const Shape& out_shape) {
    Tensor out(out_shape);
    switch (layer.kind) {
        case LayerKind::dense:
            kernels::active().dense(layer.weights, layer.bias, in.data, out.data);
            break;
        case LayerKind::conv2d:
            conv2d_naive(layer, in, out);
            break;
        case LayerKind::avgpool2d:
            avgpool2d_naive(layer, in, out);
            break;
        case LayerKind::flatten:
            out.data = in.data;
            break;
    }
    return out;
}

}  // namespace gnc
