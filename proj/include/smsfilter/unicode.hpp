// Copyright (c) 2026, The smsfilter Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <string_view>

// Minimal UTF-8 support for the tokenizer: decoding, a letter/digit
// classification and simple (1:1) lowercase mapping for the scripts that
// show up in SMS text. Code points outside the table are treated as
// delimiters.
namespace smsfilter::unicode {

inline constexpr char32_t invalid = 0xFFFFFFFF;

/// Decodes one code point starting at `pos` and advances `pos`. Malformed
/// sequences consume one byte and yield `invalid`.
inline char32_t decode(std::string_view s, std::size_t& pos) {
    const auto b0 = static_cast<unsigned char>(s[pos]);
    if (b0 < 0x80) {
        ++pos;
        return b0;
    }
    std::size_t len;
    char32_t cp;
    char32_t min;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2, cp = b0 & 0x1F, min = 0x80;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3, cp = b0 & 0x0F, min = 0x800;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4, cp = b0 & 0x07, min = 0x10000;
    } else {
        ++pos;
        return invalid;
    }
    if (pos + len > s.size()) {
        ++pos;
        return invalid;
    }
    for (std::size_t i = 1; i < len; ++i) {
        const auto b = static_cast<unsigned char>(s[pos + i]);
        if ((b & 0xC0) != 0x80) {
            ++pos;
            return invalid;
        }
        cp = (cp << 6) | (b & 0x3F);
    }
    if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
        ++pos;
        return invalid;
    }
    pos += len;
    return cp;
}

inline void append(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

constexpr bool in(char32_t c, char32_t lo, char32_t hi) noexcept { return c >= lo && c <= hi; }

constexpr bool is_alnum(char32_t c) noexcept {
    if (c < 0x80) {
        return in(c, '0', '9') || in(c, 'a', 'z') || in(c, 'A', 'Z');
    }
    if (c == 0xAA || c == 0xB5 || c == 0xBA) return true;
    if (in(c, 0xC0, 0x24F)) return c != 0xD7 && c != 0xF7;
    if (c == 0x386 || (in(c, 0x388, 0x3FF) && c != 0x3F6)) return true;
    if (in(c, 0x400, 0x4FF)) return !in(c, 0x482, 0x489);
    return in(c, 0x5D0, 0x5EA)        // Hebrew
           || in(c, 0x620, 0x64A)     // Arabic
           || in(c, 0x904, 0x939)     // Devanagari
           || in(c, 0xE01, 0xE30)     // Thai
           || in(c, 0x3040, 0x30FF)   // kana
           || in(c, 0x3400, 0x4DBF)   // CJK ext. A
           || in(c, 0x4E00, 0x9FFF)   // CJK
           || in(c, 0xAC00, 0xD7AF);  // Hangul
}

constexpr char32_t to_lower(char32_t c) noexcept {
    if (in(c, 'A', 'Z')) return c + 32;
    if (c < 0xC0) return c;
    if (in(c, 0xC0, 0xDE) && c != 0xD7) return c + 32;
    if (in(c, 0x100, 0x17F)) {
        if (c == 0x130) return 'i';
        if (c == 0x178) return 0xFF;
        if (in(c, 0x139, 0x148) || in(c, 0x179, 0x17E)) return (c % 2 == 1) ? c + 1 : c;
        if (c == 0x131 || c == 0x138 || c == 0x149 || c == 0x17F) return c;
        return (c % 2 == 0) ? c + 1 : c;
    }
    if (in(c, 0x391, 0x3AB) && c != 0x3A2) return c + 32;
    if (c == 0x386) return 0x3AC;
    if (in(c, 0x388, 0x38A)) return c + 37;
    if (c == 0x38C) return 0x3CC;
    if (in(c, 0x38E, 0x38F)) return c + 63;
    if (in(c, 0x400, 0x40F)) return c + 80;
    if (in(c, 0x410, 0x42F)) return c + 32;
    if (in(c, 0x460, 0x481) || in(c, 0x48A, 0x4BF) || in(c, 0x4D0, 0x4FF)) return (c % 2 == 0) ? c + 1 : c;
    if (c == 0x4C0) return 0x4CF;
    if (in(c, 0x4C1, 0x4CE)) return (c % 2 == 1) ? c + 1 : c;
    return c;
}

} // namespace smsfilter::unicode
