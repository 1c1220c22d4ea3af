// Copyright (c) 2026, The smsfilter Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <functional>
#include <mutex>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "corpus.hpp"
#include "error.hpp"
#include "pipeline.hpp"
#include "random.hpp"

namespace smsfilter::eval {

/// Spam is the positive class.
struct ConfusionMatrix {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t tn = 0;
    std::uint64_t fn = 0;

    std::uint64_t total() const noexcept { return tp + fp + tn + fn; }

    void add(ClassLabel truth, ClassLabel predicted) noexcept {
        if (truth == ClassLabel::spam) {
            ++(predicted == ClassLabel::spam ? tp : fn);
        } else {
            ++(predicted == ClassLabel::spam ? fp : tn);
        }
    }

    ConfusionMatrix& operator+=(const ConfusionMatrix& o) noexcept {
        tp += o.tp, fp += o.fp, tn += o.tn, fn += o.fn;
        return *this;
    }

    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

/// Bits of MetricsReport::degenerate: the metric's denominator was zero and
/// it is reported as 0.
enum Degenerate : unsigned {
    kAccuracy = 1u << 0,
    kSpamCaught = 1u << 1,
    kBlockedHam = 1u << 2,
    kPrecision = 1u << 3,
    kF1 = 1u << 4,
    kMcc = 1u << 5,
};

/// Fractions in [0, 1] (mcc in [-1, 1]); recall equals sc.
struct MetricsReport {
    double acc = 0.0;
    double sc = 0.0;
    double bh = 0.0;
    double mcc = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    unsigned degenerate = 0;

    friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

inline MetricsReport metrics(const ConfusionMatrix& cm) {
    MetricsReport r;
    const double tp = static_cast<double>(cm.tp);
    const double fp = static_cast<double>(cm.fp);
    const double tn = static_cast<double>(cm.tn);
    const double fn = static_cast<double>(cm.fn);
    auto ratio = [&](double num, double den, Degenerate flag) {
        if (den == 0.0) {
            r.degenerate |= flag;
            return 0.0;
        }
        return num / den;
    };
    r.acc = ratio(tp + tn, tp + fp + tn + fn, kAccuracy);
    r.sc = ratio(tp, tp + fn, kSpamCaught);
    r.recall = r.sc;
    r.bh = ratio(fp, fp + tn, kBlockedHam);
    r.precision = ratio(tp, tp + fp, kPrecision);
    r.f1 = ratio(2.0 * r.precision * r.recall, r.precision + r.recall, kF1);
    r.mcc = ratio(tp * tn - fp * fn, std::sqrt((tp + fp) * (tp + fn) * (tn + fp) * (tn + fn)), kMcc);
    return r;
}

/// Fold index per message. Each class is shuffled and dealt round-robin, the
/// second class continuing where the first stopped, so per-class and total
/// fold sizes both differ by at most one.
inline std::vector<std::size_t> stratified_folds(std::span<const ClassLabel> labels, std::size_t k,
                                                 std::uint64_t seed) {
    if (k < 2) throw ConfigError("folds: k must be >= 2");
    std::vector<std::size_t> by_class[2];
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[static_cast<std::size_t>(labels[i])].push_back(i);
    for (const auto& members : by_class) {
        if (members.size() < k) {
            throw ConfigError("folds: a class has " + std::to_string(members.size()) + " messages, fewer than k = " +
                              std::to_string(k));
        }
    }
    Rng rng(seed);
    std::vector<std::size_t> fold(labels.size());
    std::size_t next = 0;
    for (auto& members : by_class) {
        rng.shuffle(std::span<std::size_t>(members));
        for (const auto idx : members) fold[idx] = next++ % k;
    }
    return fold;
}

/// Fold assignment used by run_cv for this config.
inline std::vector<std::size_t> cv_folds(std::span<const ClassLabel> labels, const PipelineConfig& config) {
    return stratified_folds(labels, config.folds, derive_seed(config.seed, 0xf01d));
}

/// One held-out message.
struct ScoredRecord {
    ClassLabel truth = ClassLabel::ham;
    ClassLabel predicted = ClassLabel::ham;
    double re = 0.0;
};

struct FoldResult {
    ConfusionMatrix confusion;
    MetricsReport metrics;
    double threshold = 0.0;
    double mean_re_ham = 0.0;
    double mean_re_spam = 0.0;
    std::vector<ScoredRecord> records;  ///< test messages in dataset order
};

struct CvReport {
    std::string config;  ///< PipelineConfig::describe()
    std::vector<FoldResult> folds;
    MetricsReport mean;
    MetricsReport stddev;  ///< sample standard deviation across folds
    ConfusionMatrix pooled;
};

/// Called with (fold, trained pipeline) once per fold. With jobs > 1 calls
/// are serialized but may arrive out of fold order.
using FoldObserver = std::function<void(std::size_t, const Pipeline&)>;

namespace detail {

inline void aggregate(CvReport& report) {
    const auto n = static_cast<double>(report.folds.size());
    auto field = [](MetricsReport& m, int i) -> double& {
        double* f[] = {&m.acc, &m.sc, &m.bh, &m.mcc, &m.precision, &m.recall, &m.f1};
        return *f[i];
    };
    report.mean = {};
    report.stddev = {};
    report.pooled = {};
    for (auto& f : report.folds) {
        report.pooled += f.confusion;
        for (int i = 0; i < 7; ++i) field(report.mean, i) += field(f.metrics, i) / n;
        report.mean.degenerate |= f.metrics.degenerate;
    }
    if (report.folds.size() > 1) {
        for (auto& f : report.folds) {
            for (int i = 0; i < 7; ++i) {
                const double d = field(f.metrics, i) - field(report.mean, i);
                field(report.stddev, i) += d * d / (n - 1.0);
            }
        }
        for (int i = 0; i < 7; ++i) field(report.stddev, i) = std::sqrt(field(report.stddev, i));
    }
}

} // namespace detail

/// k-fold cross-validation of the whole pipeline. Every model of a fold is
/// trained from that fold's training messages only; fold seeds derive from
/// config.seed.
inline CvReport run_cv(std::span<const RawMessage> messages, const PipelineConfig& config,
                       const corpus::StopWords& stopwords, const FoldObserver& observer = {}) {
    config.validate();
    std::vector<ClassLabel> labels(messages.size());
    for (std::size_t i = 0; i < messages.size(); ++i) labels[i] = messages[i].label;
    const auto k = config.folds;
    const auto fold_of = cv_folds(labels, config);

    CvReport report;
    report.config = config.describe();
    report.folds.resize(k);

    std::mutex observer_mutex;
    auto run_fold = [&](std::size_t fold) {
        std::vector<RawMessage> train;
        std::vector<std::size_t> test;
        for (std::size_t i = 0; i < messages.size(); ++i) {
            if (fold_of[i] == fold) {
                test.push_back(i);
            } else {
                train.push_back(messages[i]);
            }
        }
        const Pipeline p = train_pipeline(train, config, stopwords, derive_seed(config.seed, fold));
        if (observer) {
            std::lock_guard lock(observer_mutex);
            observer(fold, p);
        }
        FoldResult& r = report.folds[fold];
        r.threshold = p.fda.threshold;
        double sum[2] = {0.0, 0.0};
        std::size_t cnt[2] = {0, 0};
        for (const auto i : test) {
            const auto scored = p.score(messages[i].text, stopwords);
            r.records.push_back({messages[i].label, scored.label, scored.re});
            r.confusion.add(messages[i].label, scored.label);
            sum[static_cast<std::size_t>(messages[i].label)] += scored.re;
            ++cnt[static_cast<std::size_t>(messages[i].label)];
        }
        r.mean_re_ham = cnt[0] ? sum[0] / static_cast<double>(cnt[0]) : 0.0;
        r.mean_re_spam = cnt[1] ? sum[1] / static_cast<double>(cnt[1]) : 0.0;
        r.metrics = metrics(r.confusion);
    };

    const std::size_t workers = std::min(config.jobs, k);
    if (workers <= 1) {
        for (std::size_t f = 0; f < k; ++f) run_fold(f);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < workers; ++t) {
            pool.emplace_back([&] {
                for (std::size_t f = next++; f < k; f = next++) {
                    try {
                        run_fold(f);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                    }
                }
            });
        }
        for (auto& t : pool) t.join();
        if (failure) std::rethrow_exception(failure);
    }
    detail::aggregate(report);
    return report;
}

/// Projections onto the leading principal axis of the centered data. The
/// axis sign is fixed so its first nonzero loading is positive; data with no
/// variance projects to zeros.
inline std::vector<double> pca_first_component(std::span<const std::vector<double>> features) {
    if (features.size() < 2) throw ConfigError("pca: need at least two samples");
    const auto d = static_cast<Eigen::Index>(features.front().size());
    const auto n = static_cast<Eigen::Index>(features.size());
    Eigen::MatrixXd X(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        smsfilter::detail::require_dim(features[static_cast<std::size_t>(i)].size(), static_cast<std::size_t>(d),
                                       "pca feature");
        X.row(i) = Eigen::Map<const Eigen::RowVectorXd>(features[static_cast<std::size_t>(i)].data(), d);
    }
    const Eigen::RowVectorXd lo = X.colwise().minCoeff(), hi = X.colwise().maxCoeff();
    X.rowwise() -= X.colwise().mean();
    for (Eigen::Index j = 0; j < d; ++j) {
        if (lo(j) == hi(j)) X.col(j).setZero();
    }
    std::vector<double> out(features.size(), 0.0);
    if (d == 0 || X.isZero(0.0)) return out;
    const Eigen::MatrixXd cov = X.transpose() * X / static_cast<double>(n - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    Eigen::VectorXd axis = eig.eigenvectors().col(d - 1);
    for (Eigen::Index j = 0; j < d; ++j) {
        if (std::abs(axis(j)) > 1e-12) {
            if (axis(j) < 0) axis = -axis;
            break;
        }
    }
    const Eigen::VectorXd proj = X * axis;
    for (Eigen::Index i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = proj(i);
    return out;
}

// Text exports ---------------------------------------------------------------

/// `label<TAB>value` rows under a `label<TAB><column>` header; values are
/// printed so they parse back to the same double.
inline void export_values(std::span<const ClassLabel> labels, std::span<const double> values, std::ostream& out,
                          std::string_view column = "re") {
    smsfilter::detail::require_dim(values.size(), labels.size(), "export values");
    out << "label\t" << column << '\n';
    for (std::size_t i = 0; i < labels.size(); ++i) out << to_string(labels[i]) << '\t' << format_double(values[i]) << '\n';
}

/// Held-out reconstruction errors of every fold, fold by fold.
inline void export_re_histogram(const CvReport& report, std::ostream& out) {
    std::vector<ClassLabel> labels;
    std::vector<double> values;
    for (const auto& f : report.folds) {
        for (const auto& r : f.records) {
            labels.push_back(r.truth);
            values.push_back(r.re);
        }
    }
    export_values(labels, values, out);
}

/// Tab-separated report: a config echo, one row per fold, then mean, std and
/// pooled rows. Column names follow the usual SMS-spam tables.
inline void write_report(const CvReport& report, std::ostream& out) {
    auto pct = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", 100.0 * v);
        return std::string(buf);
    };
    auto fix = [](double v, int digits) {
        char buf[48];
        std::snprintf(buf, sizeof buf, "%.*f", digits, v);
        return std::string(buf);
    };
    auto row = [&](const std::string& name, const MetricsReport& m, const std::string& tail) {
        out << name << '\t' << pct(m.sc) << '\t' << pct(m.bh) << '\t' << pct(m.acc) << '\t' << fix(m.mcc, 3) << '\t'
            << pct(m.precision) << '\t' << pct(m.recall) << '\t' << pct(m.f1) << tail << '\n';
    };
    auto counts = [](const ConfusionMatrix& c) {
        return '\t' + std::to_string(c.tp) + '\t' + std::to_string(c.fp) + '\t' + std::to_string(c.tn) + '\t' +
               std::to_string(c.fn);
    };
    out << "# smsfilter cross-validation report v1\n";
    out << "# config " << report.config << '\n';
    out << "row\tSC%\tBH%\tAcc%\tMCC\tPrecision%\tRecall%\tF1%\ttp\tfp\ttn\tfn\tthreshold\tmean_re_ham\tmean_re_spam\n";
    for (std::size_t i = 0; i < report.folds.size(); ++i) {
        const auto& f = report.folds[i];
        row("fold" + std::to_string(i), f.metrics,
            counts(f.confusion) + '\t' + fix(f.threshold, 6) + '\t' + fix(f.mean_re_ham, 6) + '\t' +
                fix(f.mean_re_spam, 6));
    }
    row("mean", report.mean, "\t\t\t\t\t\t\t");
    row("std", report.stddev, "\t\t\t\t\t\t\t");
    row("pooled", metrics(report.pooled), counts(report.pooled) + "\t\t\t");
}

} // namespace smsfilter::eval
