// Copyright (c) 2026, The smsfilter Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Stacked denoising autoencoder with tied weights.
//
// One layer maps a visible vector x (size n) to a hidden vector y (size m)
// and back:
//
//   y = S(W x + a)        W is m x n
//   z = S(W' y + b)       W' is the transpose of the same W
//   L(x, z) = |x - z|^2
//
// Training corrupts x to x~ with masking noise and minimizes L(x, z(x~)).
// The tied gradient sums the encoder and decoder contributions:
//
//   dz = 2 (z - x) . z . (1 - z)           grad_b = dz
//   dy = (W dz) . y . (1 - y)              grad_a = dy
//   grad_W[i][j] = dy[i] x~[j] + y[i] dz[j]

#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "random.hpp"

namespace smsfilter::sda {

using Vector = std::vector<double>;

inline double sigmoid(double x) noexcept {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

inline Vector sigmoid(std::span<const double> v) {
    Vector out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = sigmoid(v[i]);
    return out;
}

/// Masking noise: exactly round(fraction * d) distinct entries, drawn
/// uniformly without replacement, are set to zero.
inline Vector corrupt(std::span<const double> x, double fraction, Rng& rng) {
    if (!(fraction >= 0.0 && fraction < 1.0)) throw ContractViolation("sda: corruption fraction must be in [0, 1)");
    Vector out(x.begin(), x.end());
    const auto masked = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(x.size())));
    if (masked == 0) return out;
    std::vector<std::size_t> idx(x.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < masked; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.below(idx.size() - i));
        std::swap(idx[i], idx[j]);
        out[idx[i]] = 0.0;
    }
    return out;
}

/// One tied-weight autoencoder layer.
struct DaLayer {
    std::size_t visible = 0;
    std::size_t hidden = 0;
    Vector W;  ///< hidden x visible, row-major
    Vector a;  ///< hidden bias
    Vector b;  ///< visible bias

    static DaLayer zeros(std::size_t visible, std::size_t hidden) {
        return DaLayer{visible, hidden, Vector(visible * hidden, 0.0), Vector(hidden, 0.0), Vector(visible, 0.0)};
    }

    double& w(std::size_t i, std::size_t j) { return W[i * visible + j]; }
    double w(std::size_t i, std::size_t j) const { return W[i * visible + j]; }

    friend bool operator==(const DaLayer&, const DaLayer&) = default;
};

/// Uniform weights in +-4 sqrt(6 / (fan_in + fan_out)), zero biases.
inline DaLayer init_layer(std::size_t visible, std::size_t hidden, Rng& rng) {
    auto layer = DaLayer::zeros(visible, hidden);
    const double r = 4.0 * std::sqrt(6.0 / static_cast<double>(visible + hidden));
    for (auto& w : layer.W) w = rng.uniform(-r, r);
    return layer;
}

/// y = S(W x + a)
inline Vector encode(const DaLayer& layer, std::span<const double> x) {
    detail::require_dim(x.size(), layer.visible, "sda::encode input");
    Vector y(layer.hidden);
    for (std::size_t i = 0; i < layer.hidden; ++i) {
        const double* row = &layer.W[i * layer.visible];
        double s = layer.a[i];
        for (std::size_t j = 0; j < layer.visible; ++j) s += row[j] * x[j];
        y[i] = sigmoid(s);
    }
    return y;
}

/// z = S(W' y + b)
inline Vector decode(const DaLayer& layer, std::span<const double> y) {
    detail::require_dim(y.size(), layer.hidden, "sda::decode input");
    Vector s(layer.b.begin(), layer.b.end());
    for (std::size_t i = 0; i < layer.hidden; ++i) {
        const double* row = &layer.W[i * layer.visible];
        const double yi = y[i];
        for (std::size_t j = 0; j < layer.visible; ++j) s[j] += row[j] * yi;
    }
    for (auto& v : s) v = sigmoid(v);
    return s;
}

/// Squared error |x - z|^2.
inline double loss(std::span<const double> x, std::span<const double> z) {
    detail::require_dim(z.size(), x.size(), "sda::loss");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - z[i];
        s += d * d;
    }
    return s;
}

struct LayerGradient {
    Vector W;
    Vector a;
    Vector b;
    double loss = 0.0;
};

/// Exact gradient of L(clean, z(corrupted)) with respect to (W, a, b).
inline LayerGradient gradient(const DaLayer& layer, std::span<const double> clean, std::span<const double> corrupted) {
    detail::require_dim(clean.size(), layer.visible, "sda::gradient clean input");
    detail::require_dim(corrupted.size(), layer.visible, "sda::gradient corrupted input");
    const Vector y = encode(layer, corrupted);
    const Vector z = decode(layer, y);
    LayerGradient g{Vector(layer.W.size()), Vector(layer.hidden), Vector(layer.visible), loss(clean, z)};
    for (std::size_t j = 0; j < layer.visible; ++j) g.b[j] = 2.0 * (z[j] - clean[j]) * z[j] * (1.0 - z[j]);
    for (std::size_t i = 0; i < layer.hidden; ++i) {
        const double* row = &layer.W[i * layer.visible];
        double s = 0.0;
        for (std::size_t j = 0; j < layer.visible; ++j) s += row[j] * g.b[j];
        g.a[i] = s * y[i] * (1.0 - y[i]);
    }
    for (std::size_t i = 0; i < layer.hidden; ++i) {
        for (std::size_t j = 0; j < layer.visible; ++j) {
            g.W[i * layer.visible + j] = g.a[i] * corrupted[j] + y[i] * g.b[j];
        }
    }
    return g;
}

struct SdaConfig {
    double learning_rate = 0.1;
    double corruption = 0.3;
    std::size_t epochs = 100;
    std::uint64_t seed = 1;
    std::size_t minibatch = 1;

    void validate() const {
        if (!(learning_rate > 0.0)) throw ConfigError("sda: learning_rate must be > 0");
        if (!(corruption >= 0.0 && corruption < 1.0)) throw ConfigError("sda: corruption must be in [0, 1)");
        if (epochs < 1) throw ConfigError("sda: epochs must be >= 1");
        if (minibatch < 1) throw ConfigError("sda: minibatch must be >= 1");
    }

    friend bool operator==(const SdaConfig&, const SdaConfig&) = default;
};

/// Called after every epoch with the epoch index, the layer so far and the
/// mean (corrupted-input) training loss of that epoch.
using EpochObserver = std::function<void(std::size_t, const DaLayer&, double)>;

/// Plain SGD over shuffled epochs. With minibatch > 1 the batch gradients are
/// averaged before the step.
inline DaLayer train_layer(std::span<const Vector> inputs, std::size_t hidden, const SdaConfig& config,
                           const EpochObserver& observer = {}) {
    config.validate();
    if (inputs.empty()) throw ConfigError("sda: empty training set");
    if (hidden < 1) throw ConfigError("sda: hidden size must be >= 1");
    const std::size_t n = inputs.front().size();
    if (n < 1) throw ConfigError("sda: input dimension must be >= 1");
    for (const auto& x : inputs) detail::require_dim(x.size(), n, "sda::train_layer input");

    Rng rng(config.seed);
    DaLayer layer = init_layer(n, hidden, rng);
    std::vector<std::size_t> order(inputs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    LayerGradient acc{Vector(layer.W.size()), Vector(hidden), Vector(n), 0.0};
    auto apply = [&](double scale) {
        const double step = config.learning_rate * scale;
        for (std::size_t i = 0; i < layer.W.size(); ++i) layer.W[i] -= step * acc.W[i];
        for (std::size_t i = 0; i < hidden; ++i) layer.a[i] -= step * acc.a[i];
        for (std::size_t j = 0; j < n; ++j) layer.b[j] -= step * acc.b[j];
        std::fill(acc.W.begin(), acc.W.end(), 0.0);
        std::fill(acc.a.begin(), acc.a.end(), 0.0);
        std::fill(acc.b.begin(), acc.b.end(), 0.0);
    };

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        rng.shuffle(std::span<std::size_t>(order));
        double total = 0.0;
        std::size_t in_batch = 0;
        for (const std::size_t idx : order) {
            const Vector& x = inputs[idx];
            const Vector noisy = corrupt(x, config.corruption, rng);
            const LayerGradient g = gradient(layer, x, noisy);
            total += g.loss;
            if (config.minibatch == 1) {
                const double step = config.learning_rate;
                for (std::size_t i = 0; i < g.W.size(); ++i) layer.W[i] -= step * g.W[i];
                for (std::size_t i = 0; i < hidden; ++i) layer.a[i] -= step * g.a[i];
                for (std::size_t j = 0; j < n; ++j) layer.b[j] -= step * g.b[j];
                continue;
            }
            for (std::size_t i = 0; i < g.W.size(); ++i) acc.W[i] += g.W[i];
            for (std::size_t i = 0; i < hidden; ++i) acc.a[i] += g.a[i];
            for (std::size_t j = 0; j < n; ++j) acc.b[j] += g.b[j];
            if (++in_batch == config.minibatch) {
                apply(1.0 / static_cast<double>(in_batch));
                in_batch = 0;
            }
        }
        if (in_batch > 0) apply(1.0 / static_cast<double>(in_batch));
        if (observer) observer(epoch, layer, total / static_cast<double>(inputs.size()));
    }
    return layer;
}

struct SdaModel {
    std::vector<std::size_t> sizes;
    std::vector<DaLayer> layers;

    std::size_t input_size() const { return sizes.empty() ? 0 : sizes.front(); }

    friend bool operator==(const SdaModel&, const SdaModel&) = default;
};

inline std::vector<Vector> encode_all(const DaLayer& layer, std::span<const Vector> inputs) {
    std::vector<Vector> out;
    out.reserve(inputs.size());
    for (const auto& x : inputs) out.push_back(encode(layer, x));
    return out;
}

/// Seed of layer l in a stack: layer 0 uses the configured seed itself.
inline std::uint64_t layer_seed(std::uint64_t seed, std::size_t layer) {
    return layer == 0 ? seed : derive_seed(seed, layer);
}

/// Greedy layer-wise training: layer l+1 trains on the clean encodings of
/// trained layer l; corruption is applied only inside each layer's training.
inline SdaModel train_stack(std::span<const Vector> inputs, std::span<const std::size_t> sizes,
                            const SdaConfig& config) {
    if (sizes.size() < 2) throw ConfigError("sda: need at least an input and one hidden size");
    if (inputs.empty()) throw ConfigError("sda: empty training set");
    detail::require_dim(inputs.front().size(), sizes.front(), "sda::train_stack input");
    SdaModel model{std::vector<std::size_t>(sizes.begin(), sizes.end()), {}};
    std::vector<Vector> current;
    std::span<const Vector> level = inputs;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        SdaConfig c = config;
        c.seed = layer_seed(config.seed, l);
        model.layers.push_back(train_layer(level, sizes[l + 1], c));
        if (l + 2 < sizes.size()) {
            current = encode_all(model.layers.back(), level);
            level = current;
        }
    }
    return model;
}

/// Encodes through every layer without corruption, decodes back down and
/// returns |x - z|^2 against the original input.
inline double reconstruction_error(const SdaModel& model, std::span<const double> x) {
    detail::require_dim(x.size(), model.input_size(), "sda::reconstruction_error input");
    Vector h(x.begin(), x.end());
    for (const auto& layer : model.layers) h = encode(layer, h);
    for (auto it = model.layers.rbegin(); it != model.layers.rend(); ++it) h = decode(*it, h);
    return loss(x, h);
}

// Persistence ---------------------------------------------------------------

inline constexpr std::string_view kModelFormat = "smsfilter.sda";
inline constexpr int kModelVersion = 1;

inline nlohmann::json to_json(const SdaModel& model) {
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& l : model.layers) {
        layers.push_back({{"visible", l.visible}, {"hidden", l.hidden}, {"W", l.W}, {"a", l.a}, {"b", l.b}});
    }
    return {{"format", kModelFormat}, {"version", kModelVersion}, {"sizes", model.sizes}, {"layers", std::move(layers)}};
}

inline SdaModel sda_model_from_json(const nlohmann::json& j) {
    try {
        if (j.at("format").get<std::string>() != kModelFormat) throw ParseError("sda: not an SDA model document");
        if (j.at("version").get<int>() != kModelVersion) throw ParseError("sda: unsupported model version");
        SdaModel m;
        m.sizes = j.at("sizes").get<std::vector<std::size_t>>();
        const auto& layers = j.at("layers");
        if (m.sizes.size() < 2 || layers.size() + 1 != m.sizes.size()) throw ParseError("sda: layer count mismatch");
        for (std::size_t l = 0; l < layers.size(); ++l) {
            const auto& lj = layers[l];
            DaLayer layer{lj.at("visible").get<std::size_t>(), lj.at("hidden").get<std::size_t>(),
                          lj.at("W").get<Vector>(), lj.at("a").get<Vector>(), lj.at("b").get<Vector>()};
            if (layer.visible != m.sizes[l] || layer.hidden != m.sizes[l + 1] ||
                layer.W.size() != layer.visible * layer.hidden || layer.a.size() != layer.hidden ||
                layer.b.size() != layer.visible) {
                throw ParseError("sda: layer " + std::to_string(l) + " has inconsistent shapes");
            }
            m.layers.push_back(std::move(layer));
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("sda: malformed model: ") + e.what());
    }
}

} // namespace smsfilter::sda
