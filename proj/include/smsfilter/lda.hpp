// Copyright (c) 2026, The smsfilter Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Latent Dirichlet allocation with a collapsed Gibbs sampler.
//
//   k in {0..K-1}  topics,  w in {0..V-1}  words,  d  documents
//   n_dk  tokens of document d assigned to topic k
//   n_kw  tokens of word w assigned to topic k (over the training corpus)
//   n_k   tokens assigned to topic k
//
// A token i of document d with word w is resampled from
//
//   P(z_i = k | rest) ~ (n_dk + alpha) * (n_kw + beta) / (n_k + V * beta)
//
// with token i's own assignment removed from the counts. Folding in a new
// document uses the same rule with n_kw, n_k frozen at their trained values.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "corpus.hpp"
#include "error.hpp"
#include "random.hpp"

namespace smsfilter::lda {

using corpus::BagOfWords;
using corpus::Vocabulary;
using corpus::WordId;

struct LdaConfig {
    std::size_t topics = 60;
    double alpha = 50.0 / 60.0;  ///< symmetric document-topic prior
    double beta = 0.01;          ///< symmetric topic-word prior
    std::size_t train_iters = 1000;
    std::size_t infer_iters = 100;
    std::size_t infer_burn = 50;
    std::uint64_t seed = 1;

    /// Defaults with alpha = 50 / K.
    static LdaConfig for_topics(std::size_t k) {
        LdaConfig c;
        c.topics = k;
        c.alpha = 50.0 / static_cast<double>(k);
        return c;
    }

    void validate() const {
        if (topics < 1) throw ConfigError("lda: topic count must be >= 1");
        if (!(alpha > 0.0)) throw ConfigError("lda: alpha must be > 0");
        if (!(beta > 0.0)) throw ConfigError("lda: beta must be > 0");
        if (train_iters < 1) throw ConfigError("lda: train_iters must be >= 1");
        if (infer_iters <= infer_burn) throw ConfigError("lda: infer_iters must exceed infer_burn");
    }

    friend bool operator==(const LdaConfig&, const LdaConfig&) = default;
};

/// Per-message topic proportions; sums to one.
struct TopicVector {
    std::vector<double> theta;

    std::size_t size() const noexcept { return theta.size(); }
    friend bool operator==(const TopicVector&, const TopicVector&) = default;
};

/// Trained topic-word counts together with the priors and vocabulary they
/// were trained with. Immutable once built.
class TopicModel {
public:
    TopicModel() = default;

    TopicModel(Vocabulary vocab, std::size_t topics, double alpha, double beta, std::vector<std::uint32_t> counts)
        : vocab_(std::move(vocab)), topics_(topics), alpha_(alpha), beta_(beta), counts_(std::move(counts)),
          totals_(topics, 0) {
        if (topics_ < 1) throw ConfigError("lda: topic count must be >= 1");
        detail::require_dim(counts_.size(), topics_ * vocab_.size(), "TopicModel counts");
        for (std::size_t k = 0; k < topics_; ++k) {
            std::uint64_t t = 0;
            for (std::size_t w = 0; w < vocab_.size(); ++w) t += counts_[k * vocab_.size() + w];
            totals_[k] = t;
        }
    }

    std::size_t topics() const noexcept { return topics_; }
    std::size_t vocab_size() const noexcept { return vocab_.size(); }
    double alpha() const noexcept { return alpha_; }
    double beta() const noexcept { return beta_; }
    const Vocabulary& vocabulary() const noexcept { return vocab_; }

    std::uint32_t count(std::size_t topic, WordId w) const { return counts_[topic * vocab_.size() + w]; }
    std::uint64_t total(std::size_t topic) const { return totals_[topic]; }
    std::span<const std::uint32_t> counts() const noexcept { return counts_; }
    std::span<const std::uint64_t> totals() const noexcept { return totals_; }

    /// phi_k(w) = (n_kw + beta) / (n_k + V beta)
    double phi(std::size_t topic, WordId w) const {
        return (static_cast<double>(count(topic, w)) + beta_) /
               (static_cast<double>(total(topic)) + static_cast<double>(vocab_.size()) * beta_);
    }

    friend bool operator==(const TopicModel&, const TopicModel&) = default;

private:
    Vocabulary vocab_;
    std::size_t topics_ = 0;
    double alpha_ = 0.0;
    double beta_ = 0.0;
    std::vector<std::uint32_t> counts_;  // K x V, row-major
    std::vector<std::uint64_t> totals_;
};

/// Draws an index from unnormalized cumulative weights.
inline std::size_t sample_cumulative(std::span<const double> cumulative, Rng& rng) {
    const double u = rng.uniform() * cumulative.back();
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
}

/// State of the training chain: one topic per token position. Positions of a
/// document are its bag entries expanded in word-id order.
class GibbsSampler {
public:
    GibbsSampler(std::span<const BagOfWords> docs, std::size_t vocab_size, const LdaConfig& config)
        : topics_(config.topics), vocab_size_(vocab_size), alpha_(config.alpha), beta_(config.beta),
          rng_(config.seed), n_kw_(config.topics * vocab_size, 0), n_k_(config.topics, 0),
          cumulative_(config.topics) {
        config.validate();
        doc_begin_.push_back(0);
        for (const auto& bow : docs) {
            if (bow.empty()) continue;
            for (const auto& [w, c] : bow.entries) {
                if (w >= vocab_size) throw ContractViolation("lda: word id out of vocabulary range");
                words_.insert(words_.end(), c, w);
            }
            doc_begin_.push_back(words_.size());
        }
        if (words_.empty() || vocab_size == 0) throw ConfigError("lda: training corpus has no tokens");
        n_dk_.assign(documents() * topics_, 0);
        z_.resize(words_.size());
        for (std::size_t d = 0; d < documents(); ++d) {
            for (std::size_t i = doc_begin_[d]; i < doc_begin_[d + 1]; ++i) {
                const auto k = static_cast<std::uint32_t>(rng_.below(topics_));
                z_[i] = k;
                ++n_dk_[d * topics_ + k];
                ++n_kw_[k * vocab_size_ + words_[i]];
                ++n_k_[k];
            }
        }
    }

    /// One full pass over every token position.
    void sweep() {
        const double vbeta = static_cast<double>(vocab_size_) * beta_;
        for (std::size_t d = 0; d < documents(); ++d) {
            std::uint32_t* ndk = &n_dk_[d * topics_];
            for (std::size_t i = doc_begin_[d]; i < doc_begin_[d + 1]; ++i) {
                const WordId w = words_[i];
                std::uint32_t k = z_[i];
                --ndk[k];
                --n_kw_[k * vocab_size_ + w];
                --n_k_[k];
                double acc = 0.0;
                for (std::size_t t = 0; t < topics_; ++t) {
                    acc += (ndk[t] + alpha_) * (n_kw_[t * vocab_size_ + w] + beta_) / (n_k_[t] + vbeta);
                    cumulative_[t] = acc;
                }
                k = static_cast<std::uint32_t>(sample_cumulative(cumulative_, rng_));
                z_[i] = k;
                ++ndk[k];
                ++n_kw_[k * vocab_size_ + w];
                ++n_k_[k];
            }
        }
        ++sweeps_;
    }

    std::size_t topics() const noexcept { return topics_; }
    std::size_t documents() const noexcept { return doc_begin_.size() - 1; }
    std::size_t tokens() const noexcept { return words_.size(); }
    std::size_t sweeps() const noexcept { return sweeps_; }

    std::span<const std::uint32_t> assignments() const noexcept { return z_; }
    std::span<const WordId> token_words() const noexcept { return words_; }
    std::span<const std::uint32_t> topic_word_counts() const noexcept { return n_kw_; }
    std::span<const std::uint64_t> topic_totals() const noexcept { return n_k_; }
    std::span<const std::uint32_t> doc_topic_counts() const noexcept { return n_dk_; }

    std::vector<std::uint32_t> take_counts() && { return std::move(n_kw_); }

private:
    std::size_t topics_;
    std::size_t vocab_size_;
    double alpha_;
    double beta_;
    Rng rng_;
    std::vector<WordId> words_;
    std::vector<std::size_t> doc_begin_;
    std::vector<std::uint32_t> z_;
    std::vector<std::uint32_t> n_dk_;
    std::vector<std::uint32_t> n_kw_;
    std::vector<std::uint64_t> n_k_;
    std::vector<double> cumulative_;
    std::size_t sweeps_ = 0;
};

/// Called after every training sweep.
using SweepObserver = std::function<void(const GibbsSampler&)>;

/// Runs `train_iters` sweeps of collapsed Gibbs sampling. Empty documents are
/// skipped; deterministic for a given seed.
inline TopicModel fit(std::span<const BagOfWords> bows, const Vocabulary& vocab, const LdaConfig& config,
                      const SweepObserver& observer = {}) {
    config.validate();
    if (vocab.empty()) throw ConfigError("lda: empty vocabulary");
    GibbsSampler sampler(bows, vocab.size(), config);
    for (std::size_t it = 0; it < config.train_iters; ++it) {
        sampler.sweep();
        if (observer) observer(sampler);
    }
    return TopicModel(vocab, config.topics, config.alpha, config.beta, std::move(sampler).take_counts());
}

inline std::uint64_t bow_hash(const BagOfWords& bow) {
    std::uint64_t h = 0x84222325cbf29ce4ULL;
    for (const auto& [w, c] : bow.entries) h = mix_seed(h ^ ((std::uint64_t{w} << 32) | c));
    return h;
}

/// Fold-in inference against a frozen model. theta is the average of
/// (n_dk + alpha) / (N_d + K alpha) over the post-burn-in sweeps; an empty bag
/// yields the uniform vector. The sampler seed depends only on config.seed and
/// the bag, so the same message always maps to the same vector.
inline TopicVector infer(const TopicModel& model, const BagOfWords& bow, const LdaConfig& config) {
    const std::size_t K = model.topics();
    const double alpha = model.alpha();
    TopicVector out{std::vector<double>(K, 1.0 / static_cast<double>(K))};
    if (bow.empty() || K == 1) return out;
    if (config.infer_iters <= config.infer_burn) throw ConfigError("lda: infer_iters must exceed infer_burn");

    // phi for each distinct word of the message, K values per word
    std::vector<double> phi(bow.entries.size() * K);
    std::vector<std::size_t> slot;  // token position -> distinct-word index
    slot.reserve(bow.total);
    for (std::size_t j = 0; j < bow.entries.size(); ++j) {
        const auto [w, c] = bow.entries[j];
        if (w >= model.vocab_size()) throw ContractViolation("lda: word id out of vocabulary range");
        for (std::size_t k = 0; k < K; ++k) phi[j * K + k] = model.phi(k, w);
        slot.insert(slot.end(), c, j);
    }

    Rng rng(mix_seed(config.seed ^ bow_hash(bow)));
    std::vector<std::uint32_t> z(slot.size());
    std::vector<std::uint32_t> ndk(K, 0);
    for (auto& zi : z) {
        zi = static_cast<std::uint32_t>(rng.below(K));
        ++ndk[zi];
    }

    std::vector<double> cumulative(K);
    std::vector<double> acc(K, 0.0);
    const double denom = static_cast<double>(bow.total) + static_cast<double>(K) * alpha;
    for (std::size_t it = 0; it < config.infer_iters; ++it) {
        for (std::size_t i = 0; i < z.size(); ++i) {
            --ndk[z[i]];
            const double* p = &phi[slot[i] * K];
            double sum = 0.0;
            for (std::size_t k = 0; k < K; ++k) {
                sum += (ndk[k] + alpha) * p[k];
                cumulative[k] = sum;
            }
            z[i] = static_cast<std::uint32_t>(sample_cumulative(cumulative, rng));
            ++ndk[z[i]];
        }
        if (it >= config.infer_burn) {
            for (std::size_t k = 0; k < K; ++k) acc[k] += (ndk[k] + alpha) / denom;
        }
    }
    const double samples = static_cast<double>(config.infer_iters - config.infer_burn);
    for (std::size_t k = 0; k < K; ++k) out.theta[k] = acc[k] / samples;
    return out;
}

struct WordProbability {
    std::string word;
    double probability;
};

/// Top-n words of a topic by phi, descending; ties by ascending word id.
inline std::vector<WordProbability> top_words(const TopicModel& model, std::size_t topic, std::size_t n) {
    if (topic >= model.topics()) throw ContractViolation("lda: topic index out of range");
    std::vector<WordId> ids(model.vocab_size());
    std::iota(ids.begin(), ids.end(), WordId{0});
    const std::size_t take = std::min(n, ids.size());
    std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(take), ids.end(),
                      [&](WordId a, WordId b) {
                          const auto ca = model.count(topic, a);
                          const auto cb = model.count(topic, b);
                          return ca != cb ? ca > cb : a < b;
                      });
    std::vector<WordProbability> out;
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i) out.push_back({model.vocabulary().word(ids[i]), model.phi(topic, ids[i])});
    return out;
}

// Persistence ---------------------------------------------------------------

inline constexpr std::string_view kModelFormat = "smsfilter.lda";
inline constexpr int kModelVersion = 1;

inline nlohmann::json to_json(const TopicModel& model) {
    nlohmann::json counts = nlohmann::json::array();
    const auto V = model.vocab_size();
    for (std::size_t k = 0; k < model.topics(); ++k) {
        auto row = model.counts().subspan(k * V, V);
        counts.push_back(std::vector<std::uint32_t>(row.begin(), row.end()));
    }
    return {{"format", kModelFormat},
            {"version", kModelVersion},
            {"topics", model.topics()},
            {"alpha", model.alpha()},
            {"beta", model.beta()},
            {"vocabulary", model.vocabulary().words()},
            {"topic_word_counts", std::move(counts)}};
}

inline TopicModel topic_model_from_json(const nlohmann::json& j) {
    try {
        if (j.at("format").get<std::string>() != kModelFormat) throw ParseError("lda: not a topic model document");
        if (j.at("version").get<int>() != kModelVersion) throw ParseError("lda: unsupported model version");
        const auto K = j.at("topics").get<std::size_t>();
        auto words = j.at("vocabulary").get<std::vector<std::string>>();
        const auto& rows = j.at("topic_word_counts");
        if (!rows.is_array() || rows.size() != K) throw ParseError("lda: topic_word_counts must have one row per topic");
        std::vector<std::uint32_t> counts;
        counts.reserve(K * words.size());
        for (const auto& row : rows) {
            auto r = row.get<std::vector<std::uint32_t>>();
            if (r.size() != words.size()) throw ParseError("lda: count row length differs from vocabulary size");
            counts.insert(counts.end(), r.begin(), r.end());
        }
        const double alpha = j.at("alpha").get<double>();
        const double beta = j.at("beta").get<double>();
        if (!(alpha > 0.0) || !(beta > 0.0) || K < 1) throw ParseError("lda: invalid priors or topic count");
        return TopicModel(Vocabulary::from_words(words), K, alpha, beta, std::move(counts));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("lda: malformed model: ") + e.what());
    }
}

} // namespace smsfilter::lda
