// Copyright (c) 2026, The smsfilter Authors
// SPDX-License-Identifier: Apache-2.0

#include <sys/wait.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include <smsfilter/corpus.hpp>

#include "support/synthetic_corpus.hpp"

namespace fs = std::filesystem;

namespace smsfilter {
namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

std::string quote(const std::string& s) {
    std::string q = "'";
    for (const char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
    return q + "'";
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("smsfilter_cli_" + std::to_string(::getpid()) + "_" +
                ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path path(const std::string& name) const { return dir_ / name; }

    fs::path write(const std::string& name, const std::string& content) const {
        std::ofstream(path(name), std::ios::binary) << content;
        return path(name);
    }

    fs::path dataset(std::size_t ham, std::size_t spam, std::uint64_t seed) const {
        std::ostringstream s;
        corpus::serialize_collection(testing::synthetic_corpus(ham, spam, seed), s);
        return write("data_" + std::to_string(seed) + ".tsv", s.str());
    }

    Result run(const std::vector<std::string>& args) const {
        std::string cmd = quote(SMSFILTER_CLI);
        for (const auto& a : args) cmd += " " + quote(a);
        cmd += " > " + quote(path("stdout").string()) + " 2> " + quote(path("stderr").string());
        const int status = std::system(cmd.c_str());
        return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(path("stdout")), slurp(path("stderr"))};
    }

    static std::vector<std::string> small_flags() {
        return {"--topics", "5", "--lda-iters", "30", "--infer-iters", "20", "--infer-burn", "5",
                "--sizes", "5,6,7", "--epochs", "3", "--seed", "3"};
    }

    Result train(const fs::path& data, const fs::path& out) const {
        std::vector<std::string> args{"train", "--data", data.string(), "--out", out.string()};
        for (auto& f : small_flags()) args.push_back(f);
        return run(args);
    }

    fs::path dir_;
};

TEST_F(Cli, ValidateCountsClasses) {
    const auto r = run({"validate", "--data", dataset(30, 10, 1).string()});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(lines(r.out).at(0), "40 messages, 10 spam (25.00%), 30 ham (75.00%)");
}

TEST_F(Cli, ValidateEmptyFile) {
    const auto r = run({"validate", "--data", write("empty.tsv", "").string()});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "0 messages\n");
}

TEST_F(Cli, MalformedLineExitsTwoAndNamesLine) {
    std::string text;
    for (int i = 1; i < 17; ++i) text += (i % 4 ? "ham\tfine\n" : "spam\twin cash\n");
    text += "this line has no tab\nham\tafter\n";
    const auto r = run({"validate", "--data", write("bad.tsv", text).string()});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("line 17"), std::string::npos) << r.err;
}

TEST_F(Cli, UsageErrorsExitTwo) {
    EXPECT_EQ(run({"validate"}).code, 2);
    EXPECT_EQ(run({"frobnicate"}).code, 2);
    EXPECT_EQ(run({"validate", "--data", path("missing.tsv").string()}).code, 2);
    EXPECT_EQ(run({"train", "--data", dataset(30, 10, 1).string(), "--topics", "5", "--sizes", "6,7"}).code, 2);
}

TEST_F(Cli, TrainingErrorExitsOne) {
    std::string ham_only;
    for (int i = 0; i < 20; ++i) ham_only += "ham\tsee you later\n";
    const auto r = train(write("ham.tsv", ham_only), path("m.json"));
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("no spam"), std::string::npos) << r.err;
}

TEST_F(Cli, TrainIsByteReproducible) {
    const auto data = dataset(60, 20, 2);
    ASSERT_EQ(train(data, path("a.json")).code, 0);
    ASSERT_EQ(train(data, path("b.json")).code, 0);
    EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
    EXPECT_FALSE(slurp(path("a.json")).empty());
}

TEST_F(Cli, ScoreMatchesFigdata) {
    const auto data = dataset(60, 20, 3);
    ASSERT_EQ(train(data, path("m.json")).code, 0);
    std::string texts;
    std::vector<std::string> labels;
    for (const auto& m : corpus::parse_collection(std::string_view(slurp(data)))) {
        texts += m.text + "\n";
        labels.push_back(std::string(to_string(m.label)));
    }
    const auto scored = run({"score", "--bundle", path("m.json").string(), "--file", write("t.txt", texts).string()});
    ASSERT_EQ(scored.code, 0) << scored.err;
    const auto fig = run({"figdata", "--which", "re-hist", "--bundle", path("m.json").string(), "--data", data.string()});
    ASSERT_EQ(fig.code, 0) << fig.err;

    const auto srows = lines(scored.out), frows = lines(fig.out);
    ASSERT_EQ(srows.size(), labels.size() + 1);
    ASSERT_EQ(frows.size(), labels.size() + 1);
    EXPECT_EQ(srows[0], "index\tlabel\tre\ttop_topics");
    EXPECT_EQ(frows[0], "label\tre");
    for (std::size_t i = 0; i < labels.size(); ++i) {
        std::istringstream s(srows[i + 1]), f(frows[i + 1]);
        std::string idx, label, re, topics, flabel, fre;
        std::getline(s, idx, '\t');
        std::getline(s, label, '\t');
        std::getline(s, re, '\t');
        std::getline(s, topics, '\t');
        std::getline(f, flabel, '\t');
        std::getline(f, fre, '\t');
        EXPECT_EQ(idx, std::to_string(i));
        EXPECT_EQ(re, fre);
        EXPECT_EQ(flabel, labels[i]);
    }

    const auto twice = run({"score", "--bundle", path("m.json").string(), "--file", path("t.txt").string()});
    EXPECT_EQ(twice.out, scored.out);
}

TEST_F(Cli, ScoreEmptyMessageAndOrder) {
    const auto data = dataset(60, 20, 4);
    ASSERT_EQ(train(data, path("m.json")).code, 0);
    const auto r = run({"score", "--bundle", path("m.json").string(), "--text", "", "--text", "WIN free cash now",
                        "--text", "see you at home"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = lines(r.out);
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows[1].substr(0, 2), "0\t");
    EXPECT_NE(rows[1].find("0:0.200000"), std::string::npos) << rows[1];
    EXPECT_EQ(rows[3].substr(0, 2), "2\t");
}

TEST_F(Cli, BundleRejectsDifferentStopWords) {
    const auto data = dataset(60, 20, 5);
    ASSERT_EQ(train(data, path("m.json")).code, 0);
    const auto r = run({"score", "--bundle", path("m.json").string(), "--stopwords",
                        write("stop.txt", "the\n").string(), "--text", "hi"});
    EXPECT_EQ(r.code, 2);
    EXPECT_EQ(run({"score", "--bundle", write("junk.json", "{}").string(), "--text", "hi"}).code, 2);
}

TEST_F(Cli, TopicsTableAndSvg) {
    const auto data = dataset(60, 20, 6);
    ASSERT_EQ(train(data, path("m.json")).code, 0);
    const auto table = run({"topics", "--bundle", path("m.json").string(), "--top-n", "3"});
    ASSERT_EQ(table.code, 0) << table.err;
    const auto rows = lines(table.out);
    EXPECT_EQ(rows.at(0), "topic\trank\tword\tprobability");
    EXPECT_LE(rows.size(), 1u + 5u * 3u);
    EXPECT_GE(rows.size(), 1u + 5u);
    const auto svg = run({"topics", "--bundle", path("m.json").string(), "--format", "svg", "--topic", "2"});
    ASSERT_EQ(svg.code, 0) << svg.err;
    EXPECT_EQ(svg.out.rfind("<svg", 0), 0u) << svg.out.substr(0, 80);
    EXPECT_NE(svg.out.find("</svg>"), std::string::npos);
    EXPECT_EQ(run({"topics", "--bundle", path("m.json").string(), "--topic", "5"}).code, 2);
}

TEST_F(Cli, Pca1OnIdenticalMessagesIsZero) {
    const auto data = dataset(60, 20, 7);
    ASSERT_EQ(train(data, path("m.json")).code, 0);
    const auto same = write("same.tsv", "ham\tok see you\nspam\tok see you\nham\tok see you\n");
    const auto r = run({"figdata", "--which", "pca1", "--bundle", path("m.json").string(), "--data", same.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "label\tpc1\nham\t0\nspam\t0\nham\t0\n");
}

TEST_F(Cli, CrossValidationTwoFolds) {
    const auto data = dataset(30, 10, 8);
    std::vector<std::string> args{"cv", "--data", data.string(), "--folds", "2", "--out", path("r1.tsv").string(),
                                  "--re-hist", path("h.tsv").string()};
    for (auto& f : small_flags()) args.push_back(f);
    const auto r = run(args);
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = lines(r.out);
    ASSERT_EQ(rows.size(), 3u + 2u + 3u);
    EXPECT_EQ(rows[3].substr(0, 6), "fold0\t");
    EXPECT_EQ(rows[4].substr(0, 6), "fold1\t");
    EXPECT_EQ(slurp(path("r1.tsv")), r.out);
    EXPECT_EQ(lines(slurp(path("h.tsv"))).size(), 41u);

    args[6] = path("r2.tsv").string();
    ASSERT_EQ(run(args).code, 0);
    EXPECT_EQ(slurp(path("r2.tsv")), slurp(path("r1.tsv")));
}

} // namespace
} // namespace smsfilter
