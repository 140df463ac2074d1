#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gnconvert/activation.hpp"

namespace gnc {

using Shape = std::vector<std::size_t>;

std::size_t numel(const Shape& shape);
std::string to_string(const Shape& shape);

struct Tensor {
    Shape shape;
    std::vector<double> data;

    Tensor() = default;
    explicit Tensor(Shape s) : shape(std::move(s)), data(numel(shape), 0.0) {}
    Tensor(Shape s, std::vector<double> d);

    std::size_t size() const { return data.size(); }
};

enum class LayerKind { dense, conv2d, avgpool2d, flatten };

const char* to_string(LayerKind kind);
LayerKind layer_kind_from_string(const std::string& s);

// One stage of the weight graph.
//
//   dense      shape {out, in}, weights row-major out x in, bias {out}; input rank 1
//   conv2d     shape {out_c, in_c, kh, kw}, bias {out_c}, stride/padding; input {C, H, W}
//   avgpool2d  shape {k}: k x k window, stride k; input {C, H, W}
//   flatten    shape {}: {C, H, W} -> {C*H*W}
//
// A layer is activated when it is followed by QCFS in the ANN and by a spiking
// neuron layer in the SNN. Conversion adds `theta` (IF threshold) and, for
// Group Neurons, `tau`.
struct LayerSpec {
    LayerKind kind = LayerKind::dense;
    Shape shape;
    std::vector<double> weights;
    std::vector<double> bias;
    std::size_t stride = 1;
    std::size_t padding = 0;

    bool activated = false;
    std::optional<double> lambda;
    std::optional<double> theta;
    std::optional<int> tau;

    bool has_weights() const { return kind == LayerKind::dense || kind == LayerKind::conv2d; }
    bool spiking() const { return activated && theta.has_value(); }
    QCFSParams qcfs_params(int L) const;
};

struct ModelSpec {
    Shape input_shape;
    int L = 4;
    std::vector<LayerSpec> layers;
    std::map<std::string, std::string> metadata;

    /// Checks every structural invariant and returns the output shape of each
    /// layer. Throws std::invalid_argument naming the offending layer.
    std::vector<Shape> validate() const;

    std::size_t output_size() const;
};

// Affine or linear part of one layer: W * in + b for dense/conv2d, the plain
// reshaping/averaging for avgpool2d/flatten. `out_shape` comes from validate().
Tensor apply_linear(const LayerSpec& layer, const Tensor& in, const Shape& out_shape);

}  // namespace gnc
