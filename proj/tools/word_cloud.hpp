// Copyright (c) 2026, The smsfilter Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Topic exports: a tab-separated table and a grid-layout SVG word cloud.
//
// SVG sizing is linear: font-size = kMaxFontPx * phi / phi_max, where
// phi_max is the largest probability among all exported words. Each topic
// gets one panel; words are set left to right in phi order and wrap inside
// the panel.

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <smsfilter/eval.hpp>
#include <smsfilter/lda.hpp>

namespace smsfilter::tools {

struct TopicWords {
    std::size_t topic = 0;
    std::vector<lda::WordProbability> words;
};

inline void write_topic_table(const std::vector<TopicWords>& topics, std::ostream& out) {
    out << "topic\trank\tword\tprobability\n";
    for (const auto& t : topics) {
        for (std::size_t r = 0; r < t.words.size(); ++r) {
            out << t.topic << '\t' << r << '\t' << t.words[r].word << '\t'
                << format_double(t.words[r].probability) << '\n';
        }
    }
}

inline std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

inline constexpr double kMaxFontPx = 48.0;
inline constexpr double kPanelWidth = 420.0;
inline constexpr double kPanelHeight = 320.0;
inline constexpr std::size_t kPanelsPerRow = 4;

/// Font size of a word with probability `phi` given the export maximum.
inline double font_size(double phi, double phi_max) { return phi_max > 0 ? kMaxFontPx * phi / phi_max : 0.0; }

inline void write_word_cloud_svg(const std::vector<TopicWords>& topics, std::ostream& out) {
    double phi_max = 0.0;
    for (const auto& t : topics) {
        for (const auto& w : t.words) phi_max = std::max(phi_max, w.probability);
    }
    const std::size_t cols = std::min(kPanelsPerRow, std::max<std::size_t>(topics.size(), 1));
    const std::size_t rows = (topics.size() + cols - 1) / cols;
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" "
                  "font-family=\"sans-serif\">\n",
                  kPanelWidth * double(cols), kPanelHeight * double(std::max<std::size_t>(rows, 1)));
    out << buf;
    for (std::size_t i = 0; i < topics.size(); ++i) {
        const double x0 = kPanelWidth * double(i % cols);
        const double y0 = kPanelHeight * double(i / cols);
        std::snprintf(buf, sizeof buf,
                      "<g id=\"topic-%zu\">\n<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" "
                      "fill=\"none\" stroke=\"#999\"/>\n<text x=\"%.1f\" y=\"%.1f\" font-size=\"12\" "
                      "fill=\"#666\">topic %zu</text>\n",
                      topics[i].topic, x0, y0, kPanelWidth, kPanelHeight, x0 + 6, y0 + 14, topics[i].topic);
        out << buf;
        double x = x0 + 8, baseline = y0 + 20, line_height = 0;
        for (const auto& w : topics[i].words) {
            const double size = font_size(w.probability, phi_max);
            const double width = 0.6 * size * double(w.word.size()) + 8;
            if (x + width > x0 + kPanelWidth && x > x0 + 8) {
                x = x0 + 8;
                baseline += line_height;
                line_height = 0;
            }
            if (line_height == 0) baseline += size;
            line_height = std::max(line_height, size * 1.1);
            std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" font-size=\"%.3f\" data-p=\"%.9g\">", x,
                          baseline, size, w.probability);
            out << buf << xml_escape(w.word) << "</text>\n";
            x += width;
        }
        out << "</g>\n";
    }
    out << "</svg>\n";
}

} // namespace smsfilter::tools
