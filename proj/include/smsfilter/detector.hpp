// Copyright (c) 2026, The smsfilter Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "corpus.hpp"
#include "error.hpp"
#include "lda.hpp"
#include "sda.hpp"

namespace smsfilter::detector {

enum class ThresholdRule : std::uint8_t {
    midpoint,        ///< halfway between the projected class means
    prior_weighted,  ///< midpoint shifted by the log prior ratio (shared-variance Gaussian rule)
};

inline std::string_view to_string(ThresholdRule r) { return r == ThresholdRule::midpoint ? "midpoint" : "prior"; }

/// Two-class Fisher discriminant: project onto unit vector w, compare with a
/// threshold. spam_side is +1 when spam projects above the threshold.
struct FdaModel {
    std::vector<double> w;
    double threshold = 0.0;
    int spam_side = 1;

    std::size_t dimension() const noexcept { return w.size(); }

    double project(std::span<const double> x) const {
        detail::require_dim(x.size(), w.size(), "fda feature");
        double p = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) p += w[i] * x[i];
        return p;
    }

    friend bool operator==(const FdaModel&, const FdaModel&) = default;
};

/// No discriminant direction exists: the class means coincide.
struct DegenerateDiscriminant : ConfigError {
    using ConfigError::ConfigError;
};

/// w = (S_w + eps I)^-1 (mu_spam - mu_ham), normalized to unit length, with
/// S_w the pooled within-class scatter and eps = 1e-9 trace(S_w) / d.
inline FdaModel fit_fda(std::span<const std::vector<double>> features, std::span<const ClassLabel> labels,
                        ThresholdRule rule = ThresholdRule::midpoint) {
    detail::require_dim(labels.size(), features.size(), "fit_fda labels");
    if (features.empty()) throw ConfigError("fda: empty training set");
    const auto d = static_cast<Eigen::Index>(features.front().size());
    if (d < 1) throw ConfigError("fda: feature dimension must be >= 1");

    Eigen::VectorXd mean[2] = {Eigen::VectorXd::Zero(d), Eigen::VectorXd::Zero(d)};
    std::size_t count[2] = {0, 0};
    for (std::size_t i = 0; i < features.size(); ++i) {
        detail::require_dim(features[i].size(), static_cast<std::size_t>(d), "fit_fda feature");
        const auto c = static_cast<std::size_t>(labels[i]);
        mean[c] += Eigen::Map<const Eigen::VectorXd>(features[i].data(), d);
        ++count[c];
    }
    if (count[0] == 0 || count[1] == 0) throw ConfigError("fda: both classes are required");
    for (int c = 0; c < 2; ++c) mean[c] /= static_cast<double>(count[c]);

    Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(d, d);
    for (std::size_t i = 0; i < features.size(); ++i) {
        const Eigen::VectorXd dev =
            Eigen::Map<const Eigen::VectorXd>(features[i].data(), d) - mean[static_cast<std::size_t>(labels[i])];
        scatter.noalias() += dev * dev.transpose();
    }
    const Eigen::VectorXd delta = mean[1] - mean[0];
    const double scale = std::max(mean[0].lpNorm<Eigen::Infinity>(), mean[1].lpNorm<Eigen::Infinity>());
    if (delta.lpNorm<Eigen::Infinity>() <= 1e-12 * scale) {
        throw DegenerateDiscriminant("fda: class means coincide, no discriminant direction");
    }

    const double trace = scatter.trace();
    const double eps = trace > 0.0 ? 1e-9 * trace / static_cast<double>(d) : 1.0;
    scatter.diagonal().array() += eps;
    Eigen::VectorXd w = scatter.ldlt().solve(delta);
    const double norm = w.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) throw ConfigError("fda: degenerate discriminant direction");
    w /= norm;

    FdaModel model;
    model.w.assign(w.data(), w.data() + d);
    const double m_ham = w.dot(mean[0]);
    const double m_spam = w.dot(mean[1]);
    model.threshold = 0.5 * (m_ham + m_spam);
    model.spam_side = m_spam > model.threshold ? 1 : -1;
    if (rule == ThresholdRule::prior_weighted && m_spam != m_ham) {
        const double n = static_cast<double>(features.size());
        const double pooled = (w.dot(scatter * w) - eps) / std::max(1.0, n - 2.0);
        const double shift = pooled * std::log(static_cast<double>(count[0]) / static_cast<double>(count[1])) /
                             std::abs(m_spam - m_ham);
        model.threshold += model.spam_side * shift;
    }
    if (!std::isfinite(model.threshold)) throw ConfigError("fda: non-finite threshold");
    return model;
}

/// Fallback for features that carry no class information: every input at or
/// below the largest training value is ham.
inline FdaModel reject_nothing(std::span<const std::vector<double>> features) {
    if (features.empty()) throw ConfigError("fda: empty training set");
    FdaModel m{std::vector<double>(features.front().size(), 0.0), 0.0, 1};
    m.w.front() = 1.0;
    m.threshold = features.front().front();
    for (const auto& x : features) m.threshold = std::max(m.threshold, x.front());
    return m;
}

/// Spam iff the projection lies strictly on the spam side; ties go to ham.
inline ClassLabel classify(const FdaModel& model, std::span<const double> feature) {
    const double margin = model.spam_side * (model.project(feature) - model.threshold);
    return margin > 0.0 ? ClassLabel::spam : ClassLabel::ham;
}

struct ScoredMessage {
    ClassLabel label = ClassLabel::ham;
    double re = 0.0;
    lda::TopicVector theta;

    friend bool operator==(const ScoredMessage&, const ScoredMessage&) = default;
};

/// tokenize -> bag of words -> theta -> reconstruction error -> FDA label.
inline ScoredMessage score_message(const lda::TopicModel& topic_model, const lda::LdaConfig& inference,
                                   const sda::SdaModel& sda_model, const FdaModel& fda_model, std::string_view text,
                                   const corpus::StopWords& stopwords) {
    if (sda_model.input_size() != topic_model.topics()) {
        throw ConfigError("pipeline: SDA input size " + std::to_string(sda_model.input_size()) +
                          " does not match topic count " + std::to_string(topic_model.topics()));
    }
    if (fda_model.dimension() != 1) throw ConfigError("pipeline: FDA must operate on the scalar reconstruction error");
    const auto tokens = corpus::tokenize(text, stopwords);
    const auto bow = corpus::to_bow(tokens, topic_model.vocabulary());
    ScoredMessage out;
    out.theta = lda::infer(topic_model, bow, inference);
    out.re = sda::reconstruction_error(sda_model, out.theta.theta);
    const double feature[1] = {out.re};
    out.label = classify(fda_model, feature);
    return out;
}

// Persistence ---------------------------------------------------------------

inline nlohmann::json to_json(const FdaModel& m) {
    return {{"w", m.w}, {"threshold", m.threshold}, {"spam_side", m.spam_side}};
}

inline FdaModel fda_model_from_json(const nlohmann::json& j) {
    try {
        FdaModel m{j.at("w").get<std::vector<double>>(), j.at("threshold").get<double>(), j.at("spam_side").get<int>()};
        if (m.w.empty() || (m.spam_side != 1 && m.spam_side != -1) || !std::isfinite(m.threshold)) {
            throw ParseError("fda: invalid model");
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("fda: malformed model: ") + e.what());
    }
}

} // namespace smsfilter::detector
