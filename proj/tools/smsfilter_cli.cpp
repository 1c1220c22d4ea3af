// Copyright (c) 2026, The smsfilter Authors
// SPDX-License-Identifier: Apache-2.0
//
// smsfilter command-line tool: validate, train, cv, score, topics, figdata.
//
// Exit codes: 0 success, 1 component/training error, 2 input/format error.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <smsfilter/smsfilter.hpp>

#include "word_cloud.hpp"

namespace {

using namespace smsfilter;

constexpr int kExitComponent = 1;
constexpr int kExitInput = 2;

/// Input problems that map to exit code 2.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string data;
    std::string out;
    std::string bundle;
    std::string stopwords;
    std::size_t topics = 60;
    std::optional<double> alpha;
    double beta = 0.01;
    std::size_t lda_iters = 1000;
    std::size_t infer_iters = 100;
    std::size_t infer_burn = 50;
    std::vector<std::size_t> sizes;
    double lr = 0.1;
    double corruption = 0.3;
    std::size_t epochs = 100;
    std::size_t minibatch = 1;
    std::size_t folds = 10;
    std::uint64_t seed = 1;
    std::size_t jobs = 1;
    std::string threshold = "midpoint";
    std::string sda_train = "all";

    // command-specific
    std::vector<std::string> texts;
    std::string text_file;
    std::size_t top_n = 10;
    std::optional<std::size_t> topic;
    std::string format = "text";
    std::string which;
    std::string re_hist;
};

void add_config_flags(CLI::App* cmd, Options& o) {
    cmd->add_option("--topics", o.topics, "Number of LDA topics K")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--alpha", o.alpha, "Document-topic prior (default 50/K)")->check(CLI::PositiveNumber);
    cmd->add_option("--beta", o.beta, "Topic-word prior")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--lda-iters", o.lda_iters, "Gibbs sweeps for training")->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--infer-iters", o.infer_iters, "Gibbs sweeps for fold-in inference")->capture_default_str();
    cmd->add_option("--infer-burn", o.infer_burn, "Inference sweeps discarded before averaging")
        ->capture_default_str();
    cmd->add_option("--sizes", o.sizes, "SDA layer sizes, input first (default K,100,150)")->delimiter(',');
    cmd->add_option("--lr", o.lr, "SDA learning rate")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--corruption", o.corruption, "Masked input fraction")->check(CLI::Range(0.0, 0.999999))
        ->capture_default_str();
    cmd->add_option("--epochs", o.epochs, "SDA epochs per layer")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--minibatch", o.minibatch, "SDA samples per gradient step")->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--folds", o.folds, "Cross-validation folds")->check(CLI::Range(2, 1000))->capture_default_str();
    cmd->add_option("--seed", o.seed, "Master seed")->capture_default_str();
    cmd->add_option("--jobs", o.jobs, "Folds trained in parallel")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--threshold", o.threshold, "FDA threshold rule")
        ->check(CLI::IsMember({"midpoint", "prior"}))
        ->capture_default_str();
    cmd->add_option("--sda-train", o.sda_train, "Messages the SDA trains on")
        ->check(CLI::IsMember({"all", "ham"}))
        ->capture_default_str();
}

PipelineConfig make_config(const Options& o) {
    PipelineConfig c;
    c.lda = lda::LdaConfig::for_topics(o.topics);
    if (o.alpha) c.lda.alpha = *o.alpha;
    c.lda.beta = o.beta;
    c.lda.train_iters = o.lda_iters;
    c.lda.infer_iters = o.infer_iters;
    c.lda.infer_burn = o.infer_burn;
    c.sizes = o.sizes.empty() ? std::vector<std::size_t>{o.topics, 100, 150} : o.sizes;
    if (c.sizes.front() != o.topics) {
        throw InputError("--sizes must start with the topic count " + std::to_string(o.topics));
    }
    c.sda.learning_rate = o.lr;
    c.sda.corruption = o.corruption;
    c.sda.epochs = o.epochs;
    c.sda.minibatch = o.minibatch;
    c.folds = o.folds;
    c.seed = o.seed;
    c.jobs = o.jobs;
    c.threshold = o.threshold == "prior" ? detector::ThresholdRule::prior_weighted : detector::ThresholdRule::midpoint;
    c.sda_training = o.sda_train == "ham" ? SdaTraining::ham_only : SdaTraining::all;
    try {
        c.validate();
    } catch (const ConfigError& e) {
        throw InputError(e.what());
    }
    return c;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    return in;
}

std::vector<RawMessage> read_dataset(const std::string& path) {
    auto in = open_input(path);
    return corpus::parse_collection(in);
}

corpus::StopWords read_stopwords(const std::string& path) {
    if (path.empty()) return corpus::default_stopwords();
    auto in = open_input(path);
    return corpus::load_stopwords(in);
}

/// Writes to --out when given, otherwise to stdout.
template <typename F>
void emit(const std::string& path, F&& write) {
    if (path.empty()) {
        write(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    write(out);
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

Pipeline read_bundle(const std::string& path, const corpus::StopWords& stopwords) {
    auto in = open_input(path);
    Pipeline p = load_bundle(in);
    if (p.stopword_hash != corpus::stopword_hash(stopwords)) {
        throw InputError("bundle was trained with a different stop-word list (hash " + hex64(p.stopword_hash) + ")");
    }
    return p;
}

std::string pct(double num, double den) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f%%", den > 0 ? 100.0 * num / den : 0.0);
    return buf;
}

int cmd_validate(const Options& o) {
    const auto messages = read_dataset(o.data);
    if (messages.empty()) {
        std::cout << "0 messages\n";
        return 0;
    }
    const auto stopwords = read_stopwords(o.stopwords);
    std::size_t spam = 0, tokens = 0, empty = 0;
    std::vector<corpus::TokenizedMessage> docs;
    docs.reserve(messages.size());
    for (const auto& m : messages) {
        spam += m.label == ClassLabel::spam;
        docs.push_back(corpus::tokenize(m.text, stopwords));
        tokens += docs.back().tokens.size();
        empty += docs.back().tokens.empty();
    }
    const auto n = messages.size();
    const auto ham = n - spam;
    const auto vocab = corpus::build_vocabulary(docs);
    std::cout << n << " messages, " << spam << " spam (" << pct(double(spam), double(n)) << "), " << ham << " ham ("
              << pct(double(ham), double(n)) << ")\n";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", double(tokens) / double(n));
    std::cout << "tokens: " << tokens << " total, " << buf << " per message, " << vocab.size() << " distinct, "
              << empty << " messages empty after cleaning\n";
    return 0;
}

void print_training_summary(const Pipeline& p, std::span<const RawMessage> messages, const TrainingTrace& trace) {
    eval::ConfusionMatrix cm;
    double sum[2] = {0, 0};
    std::size_t cnt[2] = {0, 0};
    for (std::size_t i = 0; i < messages.size(); ++i) {
        const double f[1] = {trace.re[i]};
        cm.add(messages[i].label, detector::classify(p.fda, f));
        sum[static_cast<int>(messages[i].label)] += trace.re[i];
        ++cnt[static_cast<int>(messages[i].label)];
    }
    const auto m = eval::metrics(cm);
    std::fprintf(stderr, "config %s\n", p.config.describe().c_str());
    std::fprintf(stderr, "vocabulary %zu words, %zu topics\n", p.topics.vocab_size(), p.topics.topics());
    std::fprintf(stderr, "training RE: ham mean %.6g, spam mean %.6g, threshold %.6g\n",
                 cnt[0] ? sum[0] / double(cnt[0]) : 0.0, cnt[1] ? sum[1] / double(cnt[1]) : 0.0, p.fda.threshold);
    std::fprintf(stderr, "training fit: SC %.2f%% BH %.2f%% Acc %.2f%% MCC %.3f\n", 100 * m.sc, 100 * m.bh,
                 100 * m.acc, m.mcc);
}

int cmd_train(const Options& o) {
    const auto config = make_config(o);
    const auto messages = read_dataset(o.data);
    const auto stopwords = read_stopwords(o.stopwords);
    TrainingTrace trace;
    const Pipeline p = train_pipeline(messages, config, stopwords, config.seed, &trace);
    emit(o.out, [&](std::ostream& out) { save_bundle(p, out); });
    print_training_summary(p, messages, trace);
    return 0;
}

int cmd_cv(const Options& o) {
    const auto config = make_config(o);
    const auto messages = read_dataset(o.data);
    const auto stopwords = read_stopwords(o.stopwords);
    const auto report = eval::run_cv(messages, config, stopwords);
    eval::write_report(report, std::cout);
    std::cout.flush();
    if (!o.out.empty()) emit(o.out, [&](std::ostream& out) { eval::write_report(report, out); });
    if (!o.re_hist.empty()) emit(o.re_hist, [&](std::ostream& out) { eval::export_re_histogram(report, out); });
    return 0;
}

std::vector<std::string> read_texts(const Options& o) {
    std::vector<std::string> texts = o.texts;
    if (!o.text_file.empty()) {
        auto in = open_input(o.text_file);
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            texts.push_back(line);
        }
    }
    return texts;
}

int cmd_score(const Options& o) {
    const auto stopwords = read_stopwords(o.stopwords);
    const auto p = read_bundle(o.bundle, stopwords);
    const auto texts = read_texts(o);
    emit(o.out, [&](std::ostream& out) {
        out << "index\tlabel\tre\ttop_topics\n";
        for (std::size_t i = 0; i < texts.size(); ++i) {
            const auto s = p.score(texts[i], stopwords);
            std::vector<std::size_t> order(s.theta.size());
            std::iota(order.begin(), order.end(), std::size_t{0});
            const auto top = std::min<std::size_t>(3, order.size());
            std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(top), order.end(),
                              [&](std::size_t a, std::size_t b) {
                                  return s.theta.theta[a] != s.theta.theta[b] ? s.theta.theta[a] > s.theta.theta[b]
                                                                              : a < b;
                              });
            out << i << '\t' << to_string(s.label) << '\t' << format_double(s.re) << '\t';
            for (std::size_t t = 0; t < top; ++t) {
                char buf[48];
                std::snprintf(buf, sizeof buf, "%s%zu:%.6f", t ? "," : "", order[t], s.theta.theta[order[t]]);
                out << buf;
            }
            out << '\n';
        }
    });
    return 0;
}

int cmd_topics(const Options& o) {
    const auto stopwords = read_stopwords(o.stopwords);
    const auto p = read_bundle(o.bundle, stopwords);
    std::vector<std::size_t> selected;
    if (o.topic) {
        if (*o.topic >= p.topics.topics()) {
            throw InputError("topic " + std::to_string(*o.topic) + " out of range (model has " +
                             std::to_string(p.topics.topics()) + " topics)");
        }
        selected.push_back(*o.topic);
    } else {
        selected.resize(p.topics.topics());
        std::iota(selected.begin(), selected.end(), std::size_t{0});
    }
    std::vector<tools::TopicWords> clouds;
    for (const auto k : selected) clouds.push_back({k, lda::top_words(p.topics, k, o.top_n)});
    emit(o.out, [&](std::ostream& out) {
        if (o.format == "svg") {
            tools::write_word_cloud_svg(clouds, out);
        } else {
            tools::write_topic_table(clouds, out);
        }
    });
    return 0;
}

int cmd_figdata(const Options& o) {
    const auto stopwords = read_stopwords(o.stopwords);
    const auto p = read_bundle(o.bundle, stopwords);
    const auto messages = read_dataset(o.data);
    std::vector<ClassLabel> labels;
    std::vector<double> re;
    std::vector<std::vector<double>> theta;
    for (const auto& m : messages) {
        auto s = p.score(m.text, stopwords);
        labels.push_back(m.label);
        re.push_back(s.re);
        theta.push_back(std::move(s.theta.theta));
    }
    emit(o.out, [&](std::ostream& out) {
        if (o.which == "re-hist") {
            eval::export_values(labels, re, out, "re");
        } else if (theta.size() < 2) {
            throw InputError("pca1 needs at least two messages");
        } else {
            eval::export_values(labels, eval::pca_first_component(theta), out, "pc1");
        }
    });
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"SMS spam filter: topic features, denoising-autoencoder outlier score, Fisher threshold"};
    app.require_subcommand(1);
    Options o;

    auto* validate = app.add_subcommand("validate", "Parse a dataset and print class and token statistics");
    validate->add_option("--data", o.data, "label<TAB>text dataset")->required();
    validate->add_option("--stopwords", o.stopwords, "Stop-word list (one per line)");

    auto* train = app.add_subcommand("train", "Train on a whole dataset and write a model bundle");
    train->add_option("--data", o.data, "label<TAB>text dataset")->required();
    train->add_option("--out", o.out, "Bundle path (default stdout)");
    train->add_option("--stopwords", o.stopwords, "Stop-word list (one per line)");
    add_config_flags(train, o);

    auto* cv = app.add_subcommand("cv", "Stratified k-fold cross-validation");
    cv->add_option("--data", o.data, "label<TAB>text dataset")->required();
    cv->add_option("--out", o.out, "Also write the report here");
    cv->add_option("--re-hist", o.re_hist, "Write held-out (label, re) rows here");
    cv->add_option("--stopwords", o.stopwords, "Stop-word list (one per line)");
    add_config_flags(cv, o);

    auto* score = app.add_subcommand("score", "Score messages with a trained bundle");
    score->add_option("--bundle", o.bundle, "Model bundle")->required();
    score->add_option("--text", o.texts, "Message text (repeatable)");
    score->add_option("--file", o.text_file, "File with one message per line");
    score->add_option("--out", o.out, "Output path (default stdout)");
    score->add_option("--stopwords", o.stopwords, "Stop-word list (one per line)");

    auto* topics = app.add_subcommand("topics", "Export top words per topic");
    topics->add_option("--bundle", o.bundle, "Model bundle")->required();
    topics->add_option("--top-n", o.top_n, "Words per topic")->check(CLI::PositiveNumber)->capture_default_str();
    topics->add_option("--topic", o.topic, "Only this topic index");
    topics->add_option("--format", o.format, "text or svg")->check(CLI::IsMember({"text", "svg"}))
        ->capture_default_str();
    topics->add_option("--out", o.out, "Output path (default stdout)");
    topics->add_option("--stopwords", o.stopwords, "Stop-word list (one per line)");

    auto* figdata = app.add_subcommand("figdata", "Export (label, value) rows for plotting");
    figdata->add_option("--which", o.which, "re-hist or pca1")->required()->check(CLI::IsMember({"re-hist", "pca1"}));
    figdata->add_option("--bundle", o.bundle, "Model bundle")->required();
    figdata->add_option("--data", o.data, "label<TAB>text dataset")->required();
    figdata->add_option("--out", o.out, "Output path (default stdout)");
    figdata->add_option("--stopwords", o.stopwords, "Stop-word list (one per line)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    try {
        if (*validate) return cmd_validate(o);
        if (*train) return cmd_train(o);
        if (*cv) return cmd_cv(o);
        if (*score) return cmd_score(o);
        if (*topics) return cmd_topics(o);
        if (*figdata) return cmd_figdata(o);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitComponent;
    }
    return kExitComponent;
}
