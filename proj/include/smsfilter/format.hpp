// Copyright (c) 2026, The smsfilter Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdio>
#include <cstdlib>
#include <string>

namespace smsfilter {

/// Shortest "%.Ng" rendering (N <= 17) that parses back to the same double.
inline std::string format_double(double v) {
    char buf[32];
    for (int precision = 15; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof buf, "%.*g", precision, v);
        if (precision == 17 || std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

} // namespace smsfilter
