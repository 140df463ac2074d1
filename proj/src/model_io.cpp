#include "gnconvert/model_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "gnconvert/neuron.hpp"
#include "json.hpp"

namespace gnc {

using nlohmann::json;

namespace {

json layer_to_json(const LayerSpec& layer) {
    json j;
    j["kind"] = to_string(layer.kind);
    j["shape"] = layer.shape;
    j["weights"] = layer.weights;
    j["bias"] = layer.bias;
    if (layer.kind == LayerKind::conv2d) {
        j["stride"] = layer.stride;
        j["padding"] = layer.padding;
    }
    if (layer.activated) {
        j["act"] = "qcfs";
    }
    if (layer.lambda) j["lambda"] = *layer.lambda;
    if (layer.theta) j["theta"] = *layer.theta;
    if (layer.tau) {
        const GNConfig cfg(*layer.theta, *layer.tau);
        j["tau"] = *layer.tau;
        j["theta_gn"] = cfg.theta_gn();
        j["member_thresholds"] = cfg.member_thresholds();
    }
    return j;
}

template <typename T>
T required(const json& j, const char* key, std::size_t index) {
    if (!j.contains(key)) {
        throw std::invalid_argument("layer " + std::to_string(index) + ": missing field '" + key + "'");
    }
    return j.at(key).get<T>();
}

LayerSpec layer_from_json(const json& j, std::size_t index) {
    LayerSpec layer;
    layer.kind = layer_kind_from_string(required<std::string>(j, "kind", index));
    layer.shape = required<Shape>(j, "shape", index);
    layer.weights = j.value("weights", std::vector<double>{});
    layer.bias = j.value("bias", std::vector<double>{});
    layer.stride = j.value("stride", std::size_t{1});
    layer.padding = j.value("padding", std::size_t{0});
    if (j.contains("lambda")) layer.lambda = j.at("lambda").get<double>();
    if (j.contains("theta")) layer.theta = j.at("theta").get<double>();
    if (j.contains("tau")) layer.tau = j.at("tau").get<int>();
    if (j.contains("act")) {
        const auto act = j.at("act").get<std::string>();
        if (act != "qcfs") {
            throw std::invalid_argument("layer " + std::to_string(index) + ": unsupported activation '" + act + "'");
        }
        layer.activated = true;
    } else {
        layer.activated = layer.lambda.has_value() || layer.theta.has_value();
    }
    return layer;
}

}  // namespace

std::string model_to_json(const ModelSpec& model) {
    model.validate();
    json j;
    j["version"] = kModelFormatVersion;
    j["input_shape"] = model.input_shape;
    j["L"] = model.L;
    j["metadata"] = model.metadata;
    j["layers"] = json::array();
    for (const LayerSpec& layer : model.layers) {
        j["layers"].push_back(layer_to_json(layer));
    }
    return j.dump(1) + "\n";
}

ModelSpec model_from_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("model file is not valid JSON: ") + e.what());
    }
    try {
        const int version = j.at("version").get<int>();
        if (version != kModelFormatVersion) {
            throw std::invalid_argument("unsupported model format version " + std::to_string(version));
        }
        ModelSpec model;
        model.input_shape = j.at("input_shape").get<Shape>();
        model.L = j.at("L").get<int>();
        if (j.contains("metadata")) {
            model.metadata = j.at("metadata").get<std::map<std::string, std::string>>();
        }
        const json& layers = j.at("layers");
        for (std::size_t i = 0; i < layers.size(); ++i) {
            model.layers.push_back(layer_from_json(layers[i], i));
        }
        model.validate();
        return model;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed model file: ") + e.what());
    }
}

void save_model(const ModelSpec& model, const std::filesystem::path& path) {
    const std::string text = model_to_json(model);
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    }
    out << text;
    if (!out) {
        throw std::runtime_error("failed writing '" + path.string() + "'");
    }
}

ModelSpec load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open model file '" + path.string() + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return model_from_json(ss.str());
}

std::string model_hash(const ModelSpec& model) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : model_to_json(model)) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace gnc
