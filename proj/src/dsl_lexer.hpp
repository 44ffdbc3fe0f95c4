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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sensation/dsl.hpp"

namespace sensation::detail {

enum class Tok { Do, Then, When, While, And, True, False, Ident, Dot, Cmp, Integer, String, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    SourceSpan span;
    std::int64_t integer = 0;
    std::string symbol;
    Comparator comparator = Comparator::Eq;
};

std::string_view token_name(Tok kind);
std::string describe_token(const Token& t);

/// Case-insensitive keyword lookup; `true`/`false` included.
std::optional<Tok> keyword(std::string_view word);

/// On-demand tokenizer. `line`/`column` give the position of text[0] so
/// spans stay file-relative when a rule is cut out of a larger document.
class Lexer {
public:
    Lexer(std::string_view text, std::size_t line, std::size_t column);

    Token next();
    [[noreturn]] void fail(const std::string& what, SourceSpan span, std::vector<std::string> expected) const;

private:
    void bump();
    void skip_trivia();

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_;
    std::size_t column_;
};

ParsedRule parse_rule_at(std::string_view text, std::size_t line, std::size_t column);

}  // namespace sensation::detail
