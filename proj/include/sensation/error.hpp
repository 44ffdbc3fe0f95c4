/*
 * Copyright 2026 The Sensation Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace sensation {

/// 1-based position of a token inside DSL source text.
struct SourceSpan {
    std::size_t line = 1;
    std::size_t column = 1;
    std::size_t length = 1;

    friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed structured document (registry, timeline, scenario, store).
/// Text-level failures carry a line/column; schema failures carry the JSON
/// path of the offending element in the message and a zero line.
class SyntaxError : public Error {
public:
    explicit SyntaxError(const std::string& what) : Error(what) {}
    SyntaxError(const std::string& what, std::size_t line, std::size_t column)
        : Error(what + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"),
          line_(line),
          column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_ = 0;
    std::size_t column_ = 0;
};

class ReferenceError : public Error {
public:
    enum class Reason { Dangling, KindMismatch, IncomparableDomain };

    ReferenceError(Reason reason, const std::string& target, const std::string& what)
        : Error(what), reason_(reason), target_(target) {}

    Reason reason() const noexcept { return reason_; }
    /// The unresolved or offending reference, e.g. `window_1.color`.
    const std::string& target() const noexcept { return target_; }

private:
    Reason reason_;
    std::string target_;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class UnknownDevice : public Error {
public:
    explicit UnknownDevice(const std::string& device)
        : Error("unknown device '" + device + "'"), device_(device) {}

    const std::string& device() const noexcept { return device_; }

private:
    std::string device_;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, SourceSpan span, std::vector<std::string> expected)
        : Error(what), span_(span), expected_(std::move(expected)) {}

    const SourceSpan& span() const noexcept { return span_; }
    const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
    SourceSpan span_;
    std::vector<std::string> expected_;
};

class DomainTooLarge : public Error {
public:
    using Error::Error;
};

class DepthExceeded : public Error {
public:
    using Error::Error;
};

class TimelineError : public Error {
public:
    using Error::Error;
};

class SelfConsistencyError : public Error {
public:
    using Error::Error;
};

class StorageError : public Error {
public:
    using Error::Error;
};

class NotFound : public Error {
public:
    using Error::Error;
};

class StaleRevision : public Error {
public:
    using Error::Error;
};

}  // namespace sensation
