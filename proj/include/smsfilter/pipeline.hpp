// Copyright (c) 2026, The smsfilter Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "corpus.hpp"
#include "detector.hpp"
#include "error.hpp"
#include "format.hpp"
#include "lda.hpp"
#include "random.hpp"
#include "sda.hpp"

namespace smsfilter {

/// Which training messages the autoencoder sees.
enum class SdaTraining : std::uint8_t { all, ham_only };

inline std::string_view to_string(SdaTraining t) { return t == SdaTraining::all ? "all" : "ham"; }

/// Every knob of the spam filter. The `seed` fields inside `lda` and `sda`
/// are ignored by train_pipeline, which derives them from `seed`.
struct PipelineConfig {
    lda::LdaConfig lda = lda::LdaConfig::for_topics(60);
    std::vector<std::size_t> sizes{60, 100, 150};
    sda::SdaConfig sda;
    std::size_t folds = 10;
    std::uint64_t seed = 1;
    std::size_t jobs = 1;
    detector::ThresholdRule threshold = detector::ThresholdRule::midpoint;
    SdaTraining sda_training = SdaTraining::all;

    void validate() const {
        lda.validate();
        sda.validate();
        if (sizes.size() < 2) throw ConfigError("config: sizes needs an input size and at least one hidden size");
        for (auto s : sizes) {
            if (s < 1) throw ConfigError("config: layer sizes must be >= 1");
        }
        if (sizes.front() != lda.topics) {
            throw ConfigError("config: SDA input size " + std::to_string(sizes.front()) + " must equal topic count " +
                              std::to_string(lda.topics));
        }
        if (folds < 2) throw ConfigError("config: folds must be >= 2");
        if (jobs < 1) throw ConfigError("config: jobs must be >= 1");
    }

    /// One-line `key=value` echo used in reports.
    std::string describe() const {
        std::string s;
        auto add = [&](std::string_view key, const std::string& value) {
            if (!s.empty()) s += ' ';
            s += key;
            s += '=';
            s += value;
        };
        auto num = [](double v) { return format_double(v); };
        add("topics", std::to_string(lda.topics));
        add("alpha", num(lda.alpha));
        add("beta", num(lda.beta));
        add("lda_iters", std::to_string(lda.train_iters));
        add("infer_iters", std::to_string(lda.infer_iters));
        add("infer_burn", std::to_string(lda.infer_burn));
        std::string sz;
        for (std::size_t i = 0; i < sizes.size(); ++i) sz += (i ? "," : "") + std::to_string(sizes[i]);
        add("sizes", sz);
        add("lr", num(sda.learning_rate));
        add("corruption", num(sda.corruption));
        add("epochs", std::to_string(sda.epochs));
        add("minibatch", std::to_string(sda.minibatch));
        add("folds", std::to_string(folds));
        add("seed", std::to_string(seed));
        add("threshold", std::string(detector::to_string(threshold)));
        add("sda_train", std::string(to_string(sda_training)));
        return s;
    }
};

/// A trained spam filter: topic model, autoencoder, discriminant and the
/// inference settings needed to reproduce its features.
struct Pipeline {
    PipelineConfig config;
    lda::LdaConfig inference;  ///< effective LDA settings, including the inference seed
    lda::TopicModel topics;
    sda::SdaModel sda;
    detector::FdaModel fda;
    std::uint64_t stopword_hash = 0;

    void check_consistent() const {
        if (sda.input_size() != topics.topics()) {
            throw ConfigError("bundle: SDA input size does not match the topic count");
        }
        for (std::size_t l = 0; l < sda.layers.size(); ++l) {
            if (sda.layers[l].visible != sda.sizes[l] || sda.layers[l].hidden != sda.sizes[l + 1]) {
                throw ConfigError("bundle: SDA layer shapes disagree with its sizes");
            }
        }
        if (fda.dimension() != 1) throw ConfigError("bundle: FDA must be one-dimensional");
    }

    detector::ScoredMessage score(std::string_view text, const corpus::StopWords& stopwords) const {
        return detector::score_message(topics, inference, sda, fda, text, stopwords);
    }
};

/// Seeds for the stages of one training run.
inline std::uint64_t lda_seed(std::uint64_t seed) { return derive_seed(seed, 0x1da); }
inline std::uint64_t sda_seed(std::uint64_t seed) { return derive_seed(seed, 0x5da); }

/// Intermediate training outputs, useful for reporting.
struct TrainingTrace {
    std::vector<lda::TopicVector> theta;
    std::vector<double> re;
};

/// Fits the filter on labelled messages:
///   1. topic model on the spam messages only,
///   2. theta for every training message,
///   3. autoencoder on the theta vectors (all messages, or ham only),
///   4. reconstruction errors, 5. Fisher threshold on (re, label).
inline Pipeline train_pipeline(std::span<const RawMessage> messages, const PipelineConfig& config,
                               const corpus::StopWords& stopwords, std::uint64_t seed,
                               TrainingTrace* trace = nullptr) {
    config.validate();
    std::vector<corpus::TokenizedMessage> tokens;
    tokens.reserve(messages.size());
    std::vector<corpus::TokenizedMessage> spam_tokens;
    for (const auto& m : messages) {
        tokens.push_back(corpus::tokenize(m.text, stopwords));
        if (m.label == ClassLabel::spam) spam_tokens.push_back(tokens.back());
    }
    if (spam_tokens.empty()) throw ConfigError("train: no spam messages in the training set");
    if (spam_tokens.size() == messages.size()) throw ConfigError("train: no ham messages in the training set");

    Pipeline p;
    p.config = config;
    p.stopword_hash = corpus::stopword_hash(stopwords);
    p.inference = config.lda;
    p.inference.seed = lda_seed(seed);

    const auto vocab = corpus::build_vocabulary(spam_tokens);
    if (vocab.empty()) throw ConfigError("train: spam messages contain no tokens after stop-word removal");
    std::vector<corpus::BagOfWords> spam_bows;
    spam_bows.reserve(spam_tokens.size());
    for (const auto& t : spam_tokens) spam_bows.push_back(corpus::to_bow(t, vocab));
    p.topics = lda::fit(spam_bows, vocab, p.inference);

    std::vector<sda::Vector> theta;
    theta.reserve(messages.size());
    for (const auto& t : tokens) theta.push_back(lda::infer(p.topics, corpus::to_bow(t, vocab), p.inference).theta);

    sda::SdaConfig sda_config = config.sda;
    sda_config.seed = sda_seed(seed);
    if (config.sda_training == SdaTraining::all) {
        p.sda = sda::train_stack(theta, config.sizes, sda_config);
    } else {
        std::vector<sda::Vector> ham;
        for (std::size_t i = 0; i < messages.size(); ++i) {
            if (messages[i].label == ClassLabel::ham) ham.push_back(theta[i]);
        }
        p.sda = sda::train_stack(ham, config.sizes, sda_config);
    }

    std::vector<std::vector<double>> re(messages.size());
    std::vector<ClassLabel> labels(messages.size());
    for (std::size_t i = 0; i < messages.size(); ++i) {
        re[i] = {sda::reconstruction_error(p.sda, theta[i])};
        labels[i] = messages[i].label;
    }
    try {
        p.fda = detector::fit_fda(re, labels, config.threshold);
    } catch (const detector::DegenerateDiscriminant&) {
        p.fda = detector::reject_nothing(re);
    }

    if (trace) {
        trace->theta.clear();
        for (auto& t : theta) trace->theta.push_back(lda::TopicVector{std::move(t)});
        trace->re.clear();
        for (const auto& r : re) trace->re.push_back(r.front());
    }
    return p;
}

// Bundle --------------------------------------------------------------------

inline constexpr std::string_view kBundleFormat = "smsfilter.bundle";
inline constexpr int kBundleVersion = 1;

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

inline nlohmann::json config_to_json(const PipelineConfig& c) {
    return {{"topics", c.lda.topics},
            {"alpha", c.lda.alpha},
            {"beta", c.lda.beta},
            {"lda_iters", c.lda.train_iters},
            {"infer_iters", c.lda.infer_iters},
            {"infer_burn", c.lda.infer_burn},
            {"sizes", c.sizes},
            {"learning_rate", c.sda.learning_rate},
            {"corruption", c.sda.corruption},
            {"epochs", c.sda.epochs},
            {"minibatch", c.sda.minibatch},
            {"folds", c.folds},
            {"seed", c.seed},
            {"threshold", detector::to_string(c.threshold)},
            {"sda_train", to_string(c.sda_training)}};
}

inline PipelineConfig config_from_json(const nlohmann::json& j) {
    PipelineConfig c;
    c.lda.topics = j.at("topics").get<std::size_t>();
    c.lda.alpha = j.at("alpha").get<double>();
    c.lda.beta = j.at("beta").get<double>();
    c.lda.train_iters = j.at("lda_iters").get<std::size_t>();
    c.lda.infer_iters = j.at("infer_iters").get<std::size_t>();
    c.lda.infer_burn = j.at("infer_burn").get<std::size_t>();
    c.sizes = j.at("sizes").get<std::vector<std::size_t>>();
    c.sda.learning_rate = j.at("learning_rate").get<double>();
    c.sda.corruption = j.at("corruption").get<double>();
    c.sda.epochs = j.at("epochs").get<std::size_t>();
    c.sda.minibatch = j.at("minibatch").get<std::size_t>();
    c.folds = j.at("folds").get<std::size_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    const auto th = j.at("threshold").get<std::string>();
    if (th != "midpoint" && th != "prior") throw ParseError("bundle: unknown threshold rule '" + th + "'");
    c.threshold = th == "midpoint" ? detector::ThresholdRule::midpoint : detector::ThresholdRule::prior_weighted;
    const auto st = j.at("sda_train").get<std::string>();
    if (st != "all" && st != "ham") throw ParseError("bundle: unknown sda_train value '" + st + "'");
    c.sda_training = st == "all" ? SdaTraining::all : SdaTraining::ham_only;
    return c;
}

inline nlohmann::json to_json(const Pipeline& p) {
    return {{"format", kBundleFormat},
            {"version", kBundleVersion},
            {"config", config_to_json(p.config)},
            {"stopword_hash", hex64(p.stopword_hash)},
            {"inference", {{"infer_iters", p.inference.infer_iters},
                           {"infer_burn", p.inference.infer_burn},
                           {"seed", p.inference.seed}}},
            {"topic_model", lda::to_json(p.topics)},
            {"sda", sda::to_json(p.sda)},
            {"fda", detector::to_json(p.fda)}};
}

inline Pipeline pipeline_from_json(const nlohmann::json& j) {
    try {
        if (!j.is_object() || j.value("format", "") != kBundleFormat) throw ParseError("bundle: not a smsfilter bundle");
        if (j.at("version").get<int>() != kBundleVersion) throw ParseError("bundle: unsupported bundle version");
        Pipeline p;
        p.config = config_from_json(j.at("config"));
        p.stopword_hash = std::stoull(j.at("stopword_hash").get<std::string>(), nullptr, 16);
        p.topics = lda::topic_model_from_json(j.at("topic_model"));
        p.inference = p.config.lda;
        p.inference.topics = p.topics.topics();
        p.inference.alpha = p.topics.alpha();
        p.inference.beta = p.topics.beta();
        const auto& inf = j.at("inference");
        p.inference.infer_iters = inf.at("infer_iters").get<std::size_t>();
        p.inference.infer_burn = inf.at("infer_burn").get<std::size_t>();
        p.inference.seed = inf.at("seed").get<std::uint64_t>();
        if (p.inference.infer_iters <= p.inference.infer_burn) throw ParseError("bundle: invalid inference sweeps");
        p.sda = sda::sda_model_from_json(j.at("sda"));
        p.fda = detector::fda_model_from_json(j.at("fda"));
        p.check_consistent();
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bundle: malformed: ") + e.what());
    } catch (const std::invalid_argument&) {
        throw ParseError("bundle: malformed stopword_hash");
    }
}

inline void save_bundle(const Pipeline& p, std::ostream& out) { out << to_json(p).dump() << '\n'; }

inline Pipeline load_bundle(std::istream& in) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bundle: not valid JSON: ") + e.what());
    }
    return pipeline_from_json(j);
}

} // namespace smsfilter
