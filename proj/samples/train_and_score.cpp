// Copyright (c) 2026, The smsfilter Authors
// SPDX-License-Identifier: Apache-2.0

// Trains a small filter on a label<TAB>text file and scores a few messages.
//
//   train_and_score samples/synthetic_sms.tsv

#include <cstdio>
#include <fstream>
#include <iostream>

#include <smsfilter/smsfilter.hpp>

int main(int argc, char** argv) {
    using namespace smsfilter;
    if (argc != 2) {
        std::fprintf(stderr, "usage: %s DATASET\n", argv[0]);
        return 2;
    }
    std::ifstream in(argv[1]);
    if (!in) {
        std::fprintf(stderr, "cannot open %s\n", argv[1]);
        return 2;
    }
    const auto messages = corpus::parse_collection(in);
    const auto stopwords = corpus::default_stopwords();

    // a 10-topic model keeps this quick; the defaults are K=60 and 60-100-150
    PipelineConfig config;
    config.lda = lda::LdaConfig::for_topics(10);
    config.lda.train_iters = 300;
    config.lda.alpha = 0.5;  // sparser than the 50/K default; these messages are short
    config.sizes = {10, 100, 150};
    config.sda.epochs = 20;

    const Pipeline filter = train_pipeline(messages, config, stopwords, config.seed);
    std::printf("threshold on reconstruction error: %.6g\n", filter.fda.threshold);

    for (const char* text : {"WINNER!! claim your free cash prize now, txt WIN to 80086",
                             "ok see you at home later, gonna be late", ""}) {
        const auto s = filter.score(text, stopwords);
        std::printf("%-5s re=%.6f  %s\n", std::string(to_string(s.label)).c_str(), s.re, text);
    }
}
