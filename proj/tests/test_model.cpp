#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <stdexcept>
#include <string>

#include "gnconvert/model.hpp"
#include "gnconvert/model_io.hpp"
#include "json.hpp"
#include "test_support.hpp"

namespace {

using gnc::LayerKind;
using gnc::LayerSpec;
using gnc::ModelSpec;
using gnc::Shape;

LayerSpec dense(std::size_t out, std::size_t in, double fill = 0.5) {
    LayerSpec l;
    l.kind = LayerKind::dense;
    l.shape = {out, in};
    l.weights.assign(out * in, fill);
    l.bias.assign(out, 0.0);
    return l;
}

std::string error_of(const ModelSpec& m) {
    try {
        m.validate();
    } catch (const std::invalid_argument& e) {
        return e.what();
    }
    return "";
}

TEST(ModelValidate, AcceptsDenseChain) {
    ModelSpec m;
    m.input_shape = {3};
    m.layers = {dense(4, 3), dense(2, 4)};
    m.layers[0].activated = true;
    m.layers[0].lambda = 1.0;
    const auto shapes = m.validate();
    EXPECT_EQ(shapes, (std::vector<Shape>{{4}, {2}}));
    EXPECT_EQ(m.output_size(), 2u);
}

TEST(ModelValidate, DiagnosticsNameTheLayer) {
    ModelSpec m;
    m.input_shape = {3};
    EXPECT_NE(error_of(m).find("no layers"), std::string::npos);

    m.layers = {dense(4, 3), dense(2, 5)};
    EXPECT_NE(error_of(m).find("layer 1 (dense)"), std::string::npos) << error_of(m);

    m.layers = {dense(4, 3), dense(2, 4)};
    m.layers[1].activated = true;
    m.layers[1].lambda = 1.0;
    EXPECT_NE(error_of(m).find("final layer"), std::string::npos);

    m.layers = {dense(4, 3), dense(2, 4)};
    m.layers[0].weights.pop_back();
    EXPECT_NE(error_of(m).find("layer 0"), std::string::npos);

    m.layers = {dense(4, 3), dense(2, 4)};
    m.layers[0].lambda = 1.0;  // not activated
    EXPECT_NE(error_of(m).find("non-activated"), std::string::npos);

    m.layers = {dense(4, 3), dense(2, 4)};
    m.layers[0].activated = true;
    m.layers[0].lambda = -1.0;
    EXPECT_NE(error_of(m).find("lambda"), std::string::npos);
}

TEST(ModelValidate, TauNeedsThetaAndMustBeGlobal) {
    ModelSpec m;
    m.input_shape = {2};
    m.layers = {dense(2, 2), dense(2, 2), dense(1, 2)};
    for (int i : {0, 1}) {
        m.layers[i].activated = true;
        m.layers[i].lambda = 1.0;
        m.layers[i].theta = 1.0;
    }
    m.layers[0].tau = 4;
    m.layers[1].tau = 2;
    EXPECT_NE(error_of(m).find("tau differs"), std::string::npos);
    m.layers[1].tau = 4;
    EXPECT_EQ(error_of(m), "");
    m.layers[1].theta.reset();
    EXPECT_NE(error_of(m).find("tau requires theta"), std::string::npos);
}

TEST(ModelValidate, PoolAndFlattenCannotBeActivated) {
    ModelSpec m;
    m.input_shape = {1, 4, 4};
    LayerSpec pool;
    pool.kind = LayerKind::avgpool2d;
    pool.shape = {2};
    pool.activated = true;
    LayerSpec flat;
    flat.kind = LayerKind::flatten;
    m.layers = {pool, flat, dense(1, 4)};
    EXPECT_NE(error_of(m).find("only dense/conv2d"), std::string::npos);
}

TEST(ApplyLinear, DenseRowsPlusBias) {
    LayerSpec l = dense(2, 3);
    l.weights = {1, 2, 3, 4, 5, 6};
    l.bias = {0.5, -1};
    const gnc::Tensor in({3}, {1, 0, -1});
    const gnc::Tensor out = gnc::apply_linear(l, in, {2});
    EXPECT_EQ(out.data, (std::vector<double>{1 - 3 + 0.5, 4 - 6 - 1}));
}

TEST(ApplyLinear, Conv2dHandExample) {
    // 1x3x3 input, one 2x2 kernel of ones, stride 1, no padding: window sums.
    LayerSpec c;
    c.kind = LayerKind::conv2d;
    c.shape = {1, 1, 2, 2};
    c.weights = {1, 1, 1, 1};
    c.bias = {10};
    const gnc::Tensor in({1, 3, 3}, {1, 2, 3, 4, 5, 6, 7, 8, 9});
    const gnc::Tensor out = gnc::apply_linear(c, in, {1, 2, 2});
    EXPECT_EQ(out.data, (std::vector<double>{22, 26, 34, 38}));

    // Padding 1, stride 2: each window keeps one input corner region.
    c.padding = 1;
    c.stride = 2;
    ModelSpec m;
    m.input_shape = {1, 3, 3};
    m.layers = {c};
    const auto shapes = m.validate();
    EXPECT_EQ(shapes[0], (Shape{1, 2, 2}));
    const gnc::Tensor padded = gnc::apply_linear(c, in, shapes[0]);
    EXPECT_EQ(padded.data, (std::vector<double>{10 + 1, 10 + 2 + 3, 10 + 4 + 7, 10 + 5 + 6 + 8 + 9}));
}

TEST(ApplyLinear, Conv2dMatchesExplicitPaddedReference) {
    std::mt19937_64 gen(4);
    std::uniform_real_distribution<double> u(-1, 1);
    for (std::size_t stride : {1u, 2u}) {
        for (std::size_t pad : {0u, 1u, 2u}) {
            LayerSpec c;
            c.kind = LayerKind::conv2d;
            c.shape = {3, 2, 3, 2};
            c.stride = stride;
            c.padding = pad;
            c.weights.resize(3 * 2 * 3 * 2);
            for (double& w : c.weights) w = u(gen);
            c.bias = {u(gen), u(gen), u(gen)};
            ModelSpec m;
            m.input_shape = {2, 5, 6};
            m.layers = {c};
            const Shape os = m.validate()[0];
            gnc::Tensor in(m.input_shape);
            for (double& x : in.data) x = u(gen);

            // Zero-padded copy, then a plain correlation over it.
            const std::size_t ph = 5 + 2 * pad, pw = 6 + 2 * pad;
            std::vector<double> p(2 * ph * pw, 0.0);
            for (std::size_t ch = 0; ch < 2; ++ch)
                for (std::size_t y = 0; y < 5; ++y)
                    for (std::size_t x = 0; x < 6; ++x) p[(ch * ph + y + pad) * pw + x + pad] = in.data[(ch * 5 + y) * 6 + x];
            const gnc::Tensor out = gnc::apply_linear(c, in, os);
            for (std::size_t oc = 0; oc < 3; ++oc)
                for (std::size_t oy = 0; oy < os[1]; ++oy)
                    for (std::size_t ox = 0; ox < os[2]; ++ox) {
                        double ref = c.bias[oc];
                        for (std::size_t ic = 0; ic < 2; ++ic)
                            for (std::size_t ky = 0; ky < 3; ++ky)
                                for (std::size_t kx = 0; kx < 2; ++kx)
                                    ref += c.weights[((oc * 2 + ic) * 3 + ky) * 2 + kx] *
                                           p[(ic * ph + oy * stride + ky) * pw + ox * stride + kx];
                        EXPECT_NEAR(out.data[(oc * os[1] + oy) * os[2] + ox], ref, 1e-12);
                    }
        }
    }
}

TEST(ApplyLinear, AvgPoolAndFlatten) {
    LayerSpec pool;
    pool.kind = LayerKind::avgpool2d;
    pool.shape = {2};
    const gnc::Tensor in({1, 2, 4}, {1, 2, 3, 4, 5, 6, 7, 8});
    const gnc::Tensor out = gnc::apply_linear(pool, in, {1, 1, 2});
    EXPECT_EQ(out.data, (std::vector<double>{3.5, 5.5}));

    LayerSpec flat;
    flat.kind = LayerKind::flatten;
    const gnc::Tensor f = gnc::apply_linear(flat, in, {8});
    EXPECT_EQ(f.data, in.data);
    EXPECT_EQ(f.shape, (Shape{8}));
}

TEST(ModelJson, RoundTripIsExact) {
    ModelSpec m = gnc::testing::random_dense_model({3, 5, 4, 2}, 8, 42);
    m.layers[0].theta = 1.25;
    m.layers[0].tau = 4;
    m.layers[1].theta = 0.1 + 0.2;
    m.layers[1].tau = 4;
    m.metadata["seed"] = "42";
    const ModelSpec back = gnc::model_from_json(gnc::model_to_json(m));
    ASSERT_EQ(back.layers.size(), m.layers.size());
    EXPECT_EQ(back.input_shape, m.input_shape);
    EXPECT_EQ(back.L, m.L);
    EXPECT_EQ(back.metadata, m.metadata);
    for (std::size_t i = 0; i < m.layers.size(); ++i) {
        EXPECT_EQ(back.layers[i].weights, m.layers[i].weights);
        EXPECT_EQ(back.layers[i].bias, m.layers[i].bias);
        EXPECT_EQ(back.layers[i].lambda, m.layers[i].lambda);
        EXPECT_EQ(back.layers[i].theta, m.layers[i].theta);
        EXPECT_EQ(back.layers[i].tau, m.layers[i].tau);
        EXPECT_EQ(back.layers[i].activated, m.layers[i].activated);
    }
    EXPECT_EQ(gnc::model_to_json(back), gnc::model_to_json(m));
    EXPECT_EQ(gnc::model_hash(back), gnc::model_hash(m));
    EXPECT_EQ(gnc::model_hash(m).size(), 16u);
}

TEST(ModelJson, ConvRoundTripAndFileIo) {
    ModelSpec m;
    m.input_shape = {1, 4, 4};
    LayerSpec c;
    c.kind = LayerKind::conv2d;
    c.shape = {2, 1, 3, 3};
    c.weights.assign(18, 0.25);
    c.bias = {0.0, 1.0};
    c.padding = 1;
    c.activated = true;
    c.lambda = 2.0;
    LayerSpec pool;
    pool.kind = LayerKind::avgpool2d;
    pool.shape = {2};
    LayerSpec flat;
    flat.kind = LayerKind::flatten;
    m.layers = {c, pool, flat, dense(3, 8)};
    const auto path = std::filesystem::temp_directory_path() / "gnconvert_model_io_test.json";
    gnc::save_model(m, path);
    const ModelSpec back = gnc::load_model(path);
    std::filesystem::remove(path);
    EXPECT_EQ(gnc::model_to_json(back), gnc::model_to_json(m));
    EXPECT_EQ(back.layers[0].padding, 1u);
    EXPECT_EQ(back.layers[1].kind, LayerKind::avgpool2d);
}

TEST(ModelJson, WritesDerivedGroupFields) {
    ModelSpec m;
    m.input_shape = {1};
    m.layers = {dense(1, 1), dense(1, 1)};
    m.layers[0].activated = true;
    m.layers[0].lambda = 2.0;
    m.layers[0].theta = 2.0;
    m.layers[0].tau = 4;
    const auto j = nlohmann::json::parse(gnc::model_to_json(m));
    EXPECT_EQ(j["version"], 1);
    EXPECT_EQ(j["layers"][0]["theta_gn"], 0.5);
    EXPECT_EQ(j["layers"][0]["member_thresholds"], nlohmann::json({0.5, 1.0, 1.5, 2.0}));
    EXPECT_FALSE(j["layers"][1].contains("theta"));
}

TEST(ModelJson, RejectsMalformedDocuments) {
    EXPECT_ANY_THROW(gnc::model_from_json("not json"));
    EXPECT_ANY_THROW(gnc::model_from_json(R"({"version": 2, "input_shape": [1], "L": 4, "layers": []})"));
    EXPECT_ANY_THROW(gnc::model_from_json(
        R"({"version": 1, "input_shape": [1], "L": 4, "layers": [{"kind": "dense", "shape": [1, 2], "weights": [1], "bias": [0]}]})"));
    EXPECT_ANY_THROW(gnc::model_from_json(
        R"({"version": 1, "input_shape": [1], "L": 4, "layers": [{"kind": "maxpool", "shape": [2]}]})"));
    EXPECT_ANY_THROW(gnc::load_model("/nonexistent/model.json"));
}

}  // namespace
