// Copyright (c) 2026, The smsfilter Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace smsfilter {

/// Malformed input data (dataset lines, model files, bundles).
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    /// 1-based line number, or 0 when the error is not tied to a line.
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Invalid configuration or training input (empty corpus, single-class data, ...).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller broke a documented precondition, e.g. mismatched vector dimensions.
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

namespace detail {

inline void require_dim(std::size_t got, std::size_t expected, const char* what) {
    if (got != expected) {
        throw ContractViolation(std::string(what) + ": dimension " + std::to_string(got) + ", expected " +
                                std::to_string(expected));
    }
}

} // namespace detail
} // namespace smsfilter
