// Copyright (c) 2026, The smsfilter Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "error.hpp"
#include "random.hpp"
#include "stopwords.hpp"
#include "unicode.hpp"

namespace smsfilter {

/// Message class. Spam is the positive class in every metric.
enum class ClassLabel : std::uint8_t { ham = 0, spam = 1 };

constexpr std::string_view to_string(ClassLabel label) noexcept {
    return label == ClassLabel::spam ? "spam" : "ham";
}

inline std::optional<ClassLabel> parse_label(std::string_view s) noexcept {
    if (s == "ham") return ClassLabel::ham;
    if (s == "spam") return ClassLabel::spam;
    return std::nullopt;
}

struct RawMessage {
    ClassLabel label = ClassLabel::ham;
    std::string text;

    friend bool operator==(const RawMessage&, const RawMessage&) = default;
};

namespace corpus {

/// Reads `label<TAB>text` lines. Blank lines are skipped, a trailing CR is
/// removed, and everything after the first tab is kept verbatim as the text.
inline std::vector<RawMessage> parse_collection(std::istream& in) {
    std::vector<RawMessage> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) throw ParseError("missing tab separator", lineno);
        const auto label = parse_label(std::string_view(line).substr(0, tab));
        if (!label) throw ParseError("unknown label '" + line.substr(0, tab) + "'", lineno);
        out.push_back(RawMessage{*label, line.substr(tab + 1)});
    }
    return out;
}

inline std::vector<RawMessage> parse_collection(std::string_view data) {
    std::istringstream in{std::string(data)};
    return parse_collection(in);
}

inline void serialize_collection(std::span<const RawMessage> messages, std::ostream& out) {
    for (const auto& m : messages) out << to_string(m.label) << '\t' << m.text << '\n';
}

/// Stop words are kept sorted so the list hashes deterministically.
using StopWords = std::set<std::string, std::less<>>;

inline StopWords default_stopwords() { return StopWords(kDefaultStopWords.begin(), kDefaultStopWords.end()); }

/// One word per line; blank lines and lines starting with '#' are ignored.
/// Words are lowercased like tokens are.
inline StopWords load_stopwords(std::istream& in);

inline std::uint64_t stopword_hash(const StopWords& words) {
    std::uint64_t h = fnv1a("");
    for (const auto& w : words) {
        h = fnv1a(w, h);
        h = fnv1a("\n", h);
    }
    return h;
}

struct TokenizedMessage {
    std::vector<std::string> tokens;

    friend bool operator==(const TokenizedMessage&, const TokenizedMessage&) = default;
};

/// Lowercases, splits on every run of non-alphanumeric code points and drops
/// stop words. No stemming; duplicates and single-character tokens are kept.
inline TokenizedMessage tokenize(std::string_view text, const StopWords& stopwords) {
    TokenizedMessage out;
    std::string current;
    auto flush = [&] {
        if (!current.empty() && !stopwords.contains(current)) out.tokens.push_back(current);
        current.clear();
    };
    std::size_t pos = 0;
    while (pos < text.size()) {
        const char32_t cp = unicode::decode(text, pos);
        if (cp != unicode::invalid && unicode::is_alnum(cp)) {
            unicode::append(current, unicode::to_lower(cp));
        } else {
            flush();
        }
    }
    flush();
    return out;
}

inline StopWords load_stopwords(std::istream& in) {
    StopWords words;
    std::string line;
    const StopWords none;
    while (std::getline(in, line)) {
        if (line.empty() || line.front() == '#') continue;
        for (auto& t : tokenize(line, none).tokens) words.insert(std::move(t));
    }
    return words;
}

using WordId = std::uint32_t;

/// Word <-> dense id bijection; ids are assigned in insertion order.
class Vocabulary {
public:
    Vocabulary() = default;

    /// Returns the id of `word`, inserting it if new.
    WordId add(std::string_view word) {
        if (auto it = index_.find(word); it != index_.end()) return it->second;
        const auto id = static_cast<WordId>(words_.size());
        words_.emplace_back(word);
        index_.emplace(words_.back(), id);
        return id;
    }

    std::optional<WordId> find(std::string_view word) const {
        if (auto it = index_.find(word); it != index_.end()) return it->second;
        return std::nullopt;
    }

    const std::string& word(WordId id) const { return words_.at(id); }
    std::size_t size() const noexcept { return words_.size(); }
    bool empty() const noexcept { return words_.empty(); }
    const std::vector<std::string>& words() const noexcept { return words_; }

    static Vocabulary from_words(std::span<const std::string> words) {
        Vocabulary v;
        for (const auto& w : words) {
            if (v.find(w)) throw ParseError("duplicate vocabulary entry '" + w + "'");
            v.add(w);
        }
        return v;
    }

    friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.words_ == b.words_; }

private:
    struct Hash {
        using is_transparent = void;
        std::size_t operator()(std::string_view s) const noexcept { return std::hash<std::string_view>{}(s); }
    };

    std::vector<std::string> words_;
    std::unordered_map<std::string, WordId, Hash, std::equal_to<>> index_;
};

inline Vocabulary build_vocabulary(std::span<const TokenizedMessage> docs) {
    Vocabulary v;
    for (const auto& d : docs) {
        for (const auto& t : d.tokens) v.add(t);
    }
    return v;
}

/// Sparse token counts, sorted by ascending word id.
struct BagOfWords {
    std::vector<std::pair<WordId, std::uint32_t>> entries;
    std::uint32_t total = 0;

    bool empty() const noexcept { return total == 0; }

    friend bool operator==(const BagOfWords&, const BagOfWords&) = default;
};

/// Out-of-vocabulary tokens are dropped.
inline BagOfWords to_bow(const TokenizedMessage& doc, const Vocabulary& vocab) {
    std::map<WordId, std::uint32_t> counts;
    for (const auto& t : doc.tokens) {
        if (auto id = vocab.find(t)) ++counts[*id];
    }
    BagOfWords bow;
    bow.entries.assign(counts.begin(), counts.end());
    for (const auto& [id, c] : bow.entries) bow.total += c;
    return bow;
}

} // namespace corpus
} // namespace smsfilter
