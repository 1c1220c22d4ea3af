// Copyright (c) 2026, The smsfilter Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include <gtest/gtest.h>

#include <smsfilter/sda.hpp>

#include "support/gradient_check.hpp"
#include "support/oracles.hpp"

namespace smsfilter::sda {
namespace {

std::vector<Vector> random_inputs(std::size_t n, std::size_t d, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Vector> out(n, Vector(d));
    for (auto& x : out) {
        for (auto& v : x) v = rng.uniform();
    }
    return out;
}

SdaConfig quick(std::size_t epochs = 5) {
    SdaConfig c;
    c.epochs = epochs;
    c.seed = 17;
    return c;
}

TEST(Sigmoid, Identities) {
    EXPECT_EQ(sigmoid(0.0), 0.5);
    for (double x = -40.0; x <= 40.0; x += 0.37) EXPECT_NEAR(sigmoid(x) + sigmoid(-x), 1.0, 1e-12);
    const double big = sigmoid(710.0);
    EXPECT_TRUE(std::isfinite(big));
    EXPECT_LE(big, 1.0);
    EXPECT_GE(big, 1.0 - 1e-300);
    EXPECT_GE(sigmoid(-710.0), 0.0);
    EXPECT_TRUE(std::isfinite(sigmoid(-1e308)));
}

TEST(Corrupt, ZeroesExactCount) {
    Rng rng(1);
    const Vector x(10, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const auto y = corrupt(x, 0.3, rng);
        EXPECT_EQ(std::count(y.begin(), y.end(), 0.0), 3);
    }
    const Vector odd(7, 2.0);
    const auto y = corrupt(odd, 0.3, rng);  // round(2.1) = 2
    EXPECT_EQ(std::count(y.begin(), y.end(), 0.0), 2);
    EXPECT_EQ(corrupt(x, 0.0, rng), x);
    EXPECT_THROW(corrupt(x, 1.0, rng), ContractViolation);
}

TEST(Corrupt, DeterministicForSeed) {
    const auto x = random_inputs(1, 60, 3).front();
    Rng r1(99), r2(99);
    for (int i = 0; i < 20; ++i) EXPECT_EQ(corrupt(x, 0.3, r1), corrupt(x, 0.3, r2));
}

TEST(Layer, EncodeDecodeExamples) {
    auto zero = DaLayer::zeros(3, 2);
    EXPECT_EQ(encode(zero, Vector{0.3, -2.0, 9.0}), Vector(2, 0.5));
    EXPECT_EQ(decode(zero, Vector{0.1, 0.9}), Vector(3, 0.5));

    auto one = DaLayer::zeros(1, 1);
    one.a[0] = std::log(3.0);
    EXPECT_NEAR(encode(one, Vector{0.7})[0], 0.75, 1e-15);

    EXPECT_THROW(encode(zero, Vector{1.0}), ContractViolation);
    EXPECT_THROW(decode(zero, Vector{1.0}), ContractViolation);
}

TEST(Layer, TiedWeightsDriveBothPaths) {
    Rng rng(4);
    auto layer = init_layer(4, 3, rng);
    const Vector x{0.2, 0.4, 0.6, 0.8};
    const auto y = encode(layer, x);
    const auto z = decode(layer, y);
    layer.w(1, 2) += 0.5;
    EXPECT_NE(encode(layer, x), y);
    EXPECT_NE(decode(layer, y), z);
}

TEST(Layer, OutputsStayInUnitInterval) {
    Rng rng(5);
    for (int t = 0; t < 50; ++t) {
        const auto layer = init_layer(6, 5, rng);
        Vector x(6);
        for (auto& v : x) v = rng.uniform(-5, 5);
        for (const double v : encode(layer, x)) EXPECT_TRUE(v > 0.0 && v < 1.0);
        for (const double v : decode(layer, encode(layer, x))) EXPECT_TRUE(v > 0.0 && v < 1.0);
    }
}

TEST(Layer, InitRange) {
    Rng rng(6);
    const auto layer = init_layer(60, 100, rng);
    const double r = 4.0 * std::sqrt(6.0 / 160.0);
    for (const double w : layer.W) EXPECT_LE(std::abs(w), r);
    EXPECT_EQ(layer.a, Vector(100, 0.0));
    EXPECT_EQ(layer.b, Vector(60, 0.0));
}

TEST(Loss, Examples) {
    const Vector x{0.1, 0.5, 0.9};
    EXPECT_EQ(loss(x, x), 0.0);
    EXPECT_EQ(loss(Vector{1, 0}, Vector{0, 1}), 2.0);
    const Vector z{0.3, 0.2, 0.0};
    EXPECT_EQ(loss(x, z), loss(z, x));
}

TEST(Gradient, MatchesFiniteDifferences) {
    Rng rng(2026);
    for (int t = 0; t < 20; ++t) {
        EXPECT_LT(testing::gradient_check(4, 3, rng), 1e-5);
        EXPECT_LT(testing::gradient_check(6, 5, rng), 1e-5);
    }
}

TEST(Gradient, LossFieldMatchesForwardPass) {
    Rng rng(8);
    const auto layer = init_layer(5, 4, rng);
    const Vector x{0.1, 0.2, 0.3, 0.4, 0.5};
    const auto noisy = corrupt(x, 0.4, rng);
    EXPECT_DOUBLE_EQ(gradient(layer, x, noisy).loss, loss(x, decode(layer, encode(layer, noisy))));
    EXPECT_NEAR(gradient(layer, x, noisy).loss,
                static_cast<double>(testing::tied_ae_loss(layer.W, layer.a, layer.b, x, noisy)), 1e-12);
}

TEST(TrainLayer, ConstantDatasetLossDecreases) {
    const std::vector<Vector> data(20, Vector{0.9, 0.1, 0.8, 0.2});
    SdaConfig c = quick(10);
    c.corruption = 0.0;
    std::vector<double> curve;
    train_layer(data, 3, c, [&](std::size_t, const DaLayer&, double mean) { curve.push_back(mean); });
    ASSERT_EQ(curve.size(), 10u);
    for (std::size_t i = 1; i < curve.size(); ++i) EXPECT_LT(curve[i], curve[i - 1]) << "epoch " << i;
}

TEST(TrainLayer, DeterministicForSeed) {
    const auto data = random_inputs(50, 8, 9);
    EXPECT_EQ(train_layer(data, 6, quick()), train_layer(data, 6, quick()));
    auto other = quick();
    other.seed = 18;
    EXPECT_NE(train_layer(data, 6, quick()), train_layer(data, 6, other));
}

TEST(TrainLayer, MinibatchAveragesGradients) {
    const auto data = random_inputs(30, 5, 10);
    auto c = quick(3);
    c.minibatch = 7;
    const auto layer = train_layer(data, 4, c);
    EXPECT_EQ(layer, train_layer(data, 4, c));
    EXPECT_NE(layer, train_layer(data, 4, quick(3)));
}

TEST(TrainLayer, RejectsBadConfig) {
    const auto data = random_inputs(5, 3, 11);
    auto c = quick();
    c.learning_rate = 0;
    EXPECT_THROW(train_layer(data, 2, c), ConfigError);
    c = quick();
    c.corruption = 1.0;
    EXPECT_THROW(train_layer(data, 2, c), ConfigError);
    EXPECT_THROW(train_layer(data, 0, quick()), ConfigError);
    EXPECT_THROW(train_layer(std::vector<Vector>{}, 2, quick()), ConfigError);
}

TEST(Stack, ShapesFollowSizes) {
    const auto data = random_inputs(20, 60, 12);
    const std::vector<std::size_t> sizes{60, 100, 150};
    const auto model = train_stack(data, sizes, quick(1));
    ASSERT_EQ(model.layers.size(), 2u);
    EXPECT_EQ(model.layers[0].W.size(), 100u * 60u);
    EXPECT_EQ(model.layers[0].hidden, 100u);
    EXPECT_EQ(model.layers[1].W.size(), 150u * 100u);
    EXPECT_EQ(model.layers[1].visible, 100u);
    EXPECT_EQ(model.input_size(), 60u);
}

TEST(Stack, SingleLayerEqualsTrainLayer) {
    const auto data = random_inputs(25, 6, 13);
    const std::vector<std::size_t> sizes{6, 4};
    const auto model = train_stack(data, sizes, quick());
    ASSERT_EQ(model.layers.size(), 1u);
    EXPECT_EQ(model.layers[0], train_layer(data, 4, quick()));
}

TEST(Stack, UpperLayerTrainsOnCleanEncodings) {
    const auto data = random_inputs(25, 6, 14);
    const std::vector<std::size_t> sizes{6, 5, 4};
    const auto model = train_stack(data, sizes, quick());
    const auto level1 = encode_all(model.layers[0], data);
    auto c = quick();
    c.seed = layer_seed(c.seed, 1);
    EXPECT_EQ(model.layers[1], train_layer(level1, 4, c));
}

TEST(Stack, DeterministicAndRejectsBadSizes) {
    const auto data = random_inputs(15, 5, 15);
    const std::vector<std::size_t> sizes{5, 4, 6};
    EXPECT_EQ(train_stack(data, sizes, quick()), train_stack(data, sizes, quick()));
    EXPECT_THROW(train_stack(data, std::vector<std::size_t>{5}, quick()), ConfigError);
    EXPECT_THROW(train_stack(data, std::vector<std::size_t>{4, 3}, quick()), ContractViolation);
}

TEST(ReconstructionError, ZeroStackAtHalf) {
    SdaModel zero{{3, 4, 2}, {DaLayer::zeros(3, 4), DaLayer::zeros(4, 2)}};
    EXPECT_EQ(reconstruction_error(zero, Vector(3, 0.5)), 0.0);
    EXPECT_EQ(reconstruction_error(zero, Vector{1.0, 0.5, 0.5}), 0.25);
}

TEST(ReconstructionError, NonNegativeAndDeterministic) {
    const auto data = random_inputs(30, 6, 16);
    const std::vector<std::size_t> sizes{6, 5, 7};
    const auto model = train_stack(data, sizes, quick(20));
    for (const auto& x : data) {
        const double re = reconstruction_error(model, x);
        EXPECT_GE(re, 0.0);
        EXPECT_EQ(re, reconstruction_error(model, x));
    }
    EXPECT_THROW(reconstruction_error(model, Vector(5, 0.1)), ContractViolation);
}

TEST(Persistence, JsonRoundTripIsBitExact) {
    const auto data = random_inputs(10, 4, 17);
    const std::vector<std::size_t> sizes{4, 3, 5};
    const auto model = train_stack(data, sizes, quick());
    const auto text = to_json(model).dump();
    const auto back = sda_model_from_json(nlohmann::json::parse(text));
    EXPECT_EQ(back, model);
    EXPECT_EQ(to_json(back).dump(), text);

    auto bad = to_json(model);
    bad["layers"][1]["a"].erase(0);
    EXPECT_THROW(sda_model_from_json(bad), ParseError);
    bad = to_json(model);
    bad["sizes"] = {4, 3};
    EXPECT_THROW(sda_model_from_json(bad), ParseError);
}

} // namespace
} // namespace smsfilter::sda
