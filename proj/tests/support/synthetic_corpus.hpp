// Copyright (c) 2026, The smsfilter Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Deterministic SMS-like corpus for tests: ham draws from everyday chat
// vocabulary, spam from promotional vocabulary, with a shared slice of words
// so the classes are not trivially disjoint.

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <smsfilter/corpus.hpp>
#include <smsfilter/random.hpp>

namespace smsfilter::testing {

inline constexpr std::array<std::string_view, 48> kHamWords = {
    "hey", "ok", "lol", "home", "later", "tonight", "dinner", "love", "sorry", "going", "see", "tomorrow",
    "work", "class", "mum", "dad", "sleep", "movie", "haha", "gonna", "wat", "lunch", "bus", "late",
    "morning", "night", "yeah", "thanks", "miss", "happy", "birthday", "meet", "pick", "leaving", "soon", "coming",
    "room", "shower", "feel", "good", "wait", "told", "already", "lect", "da", "lar", "ya", "k"};

inline constexpr std::array<std::string_view, 40> kSpamWords = {
    "free", "win", "winner", "cash", "prize", "claim", "call", "txt", "urgent", "award",
    "guaranteed", "500", "1000", "mobile", "ringtone", "offer", "nokia", "reply", "stop", "150p",
    "subscription", "draw", "selected", "voucher", "holiday", "entry", "code", "landline", "chat", "valid",
    "12hrs", "tone", "sms", "week", "service", "customer", "bonus", "network", "camera", "delivery"};

inline constexpr std::array<std::string_view, 10> kSharedWords = {
    "now", "today", "text", "phone", "new", "get", "u", "ur", "2", "4"};

/// Messages stick to one theme (a 12-word slice of their class vocabulary),
/// which gives the topic model something to find.
inline std::string synthetic_text(ClassLabel label, Rng& rng) {
    const bool spam = label == ClassLabel::spam;
    const std::size_t themes = spam ? kSpamWords.size() / 10 : kHamWords.size() / 12;
    const std::size_t width = spam ? 10 : 12;
    const std::size_t theme = rng.below(themes);
    const std::size_t length = spam ? 8 + rng.below(10) : 3 + rng.below(9);
    std::string text;
    for (std::size_t i = 0; i < length; ++i) {
        const double u = rng.uniform();
        std::string_view w;
        if (u < 0.12) {
            w = kSharedWords[rng.below(kSharedWords.size())];
        } else if (u < (spam ? 0.85 : 0.97)) {
            const std::size_t j = theme * width + rng.below(width);
            w = spam ? kSpamWords[j] : kHamWords[j];
        } else if (u < 0.97) {
            w = kSpamWords[rng.below(kSpamWords.size())];
        } else {
            w = spam ? kHamWords[rng.below(kHamWords.size())] : kSpamWords[rng.below(kSpamWords.size())];
        }
        if (!text.empty()) text += rng.below(6) == 0 ? ", " : " ";
        text += w;
    }
    if (spam && rng.below(2) == 0) text = "URGENT! " + text + "!!";
    return text;
}

/// `spam` spam and `ham` ham messages, classes interleaved pseudo-randomly.
inline std::vector<RawMessage> synthetic_corpus(std::size_t ham, std::size_t spam, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<RawMessage> out;
    out.reserve(ham + spam);
    std::size_t h = 0, s = 0;
    while (h < ham || s < spam) {
        const bool pick_spam = h == ham || (s < spam && rng.below(ham + spam) < spam);
        const auto label = pick_spam ? ClassLabel::spam : ClassLabel::ham;
        out.push_back({label, synthetic_text(label, rng)});
        ++(pick_spam ? s : h);
    }
    return out;
}

} // namespace smsfilter::testing
