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
#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>

#include "dsl_lexer.hpp"
#include "sensation/dsl.hpp"

namespace sensation {

namespace detail {

std::string_view token_name(Tok kind) {
    switch (kind) {
        case Tok::Do: return "DO";
        case Tok::Then: return "THEN";
        case Tok::When: return "WHEN";
        case Tok::While: return "WHILE";
        case Tok::And: return "AND";
        case Tok::True: return "true";
        case Tok::False: return "false";
        case Tok::Ident: return "identifier";
        case Tok::Dot: return "'.'";
        case Tok::Cmp: return "comparator";
        case Tok::Integer: return "integer";
        case Tok::String: return "string";
        case Tok::End: return "end of input";
    }
    return "?";
}

std::optional<Tok> keyword(std::string_view word) {
    std::string lower(word);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "do") return Tok::Do;
    if (lower == "then") return Tok::Then;
    if (lower == "when") return Tok::When;
    if (lower == "while") return Tok::While;
    if (lower == "and") return Tok::And;
    if (lower == "true") return Tok::True;
    if (lower == "false") return Tok::False;
    return std::nullopt;
}

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_'; }
bool digit(char c) { return c >= '0' && c <= '9'; }

}  // namespace

Lexer::Lexer(std::string_view text, std::size_t line, std::size_t column)
    : text_(text), line_(line), column_(column) {}

void Lexer::bump() {
    if (text_[pos_] == '\n') {
        ++line_;
        column_ = 1;
    } else {
        ++column_;
    }
    ++pos_;
}

void Lexer::skip_trivia() {
    while (pos_ < text_.size()) {
        char c = text_[pos_];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v') {
            bump();
        } else if (c == '#') {
            while (pos_ < text_.size() && text_[pos_] != '\n') bump();
        } else {
            break;
        }
    }
}

[[noreturn]] void Lexer::fail(const std::string& what, SourceSpan span, std::vector<std::string> expected) const {
    throw ParseError(what + " at line " + std::to_string(span.line) + ", column " + std::to_string(span.column), span,
                     std::move(expected));
}

Token Lexer::next() {
    skip_trivia();
    Token t;
    t.span = SourceSpan{line_, column_, 1};
    if (pos_ >= text_.size()) {
        t.kind = Tok::End;
        return t;
    }
    const std::size_t start = pos_;
    const char c = text_[pos_];

    if (ident_start(c)) {
        while (pos_ < text_.size() && ident_char(text_[pos_])) bump();
        t.text = std::string(text_.substr(start, pos_ - start));
        t.kind = keyword(t.text).value_or(Tok::Ident);
    } else if (digit(c) || (c == '-' && pos_ + 1 < text_.size() && digit(text_[pos_ + 1]))) {
        bump();
        while (pos_ < text_.size() && digit(text_[pos_])) bump();
        t.text = std::string(text_.substr(start, pos_ - start));
        t.kind = Tok::Integer;
        auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.integer);
        if (ec != std::errc{} || ptr != t.text.data() + t.text.size()) {
            t.span.length = t.text.size();
            fail("integer literal '" + t.text + "' out of range", t.span, {"integer"});
        }
    } else if (c == '"') {
        bump();
        std::string value;
        bool closed = false;
        while (pos_ < text_.size()) {
            char ch = text_[pos_];
            if (ch == '"') {
                bump();
                closed = true;
                break;
            }
            if (ch == '\n') break;
            if (ch == '\\') {
                if (pos_ + 1 >= text_.size()) break;
                const SourceSpan escape_span{line_, column_, 2};
                bump();
                switch (text_[pos_]) {
                    case '"': value += '"'; break;
                    case '\\': value += '\\'; break;
                    case 'n': value += '\n'; break;
                    case 't': value += '\t'; break;
                    default: fail("unknown escape sequence", escape_span, {"'\\\"'", "'\\\\'", "'\\n'", "'\\t'"});
                }
                bump();
                continue;
            }
            value += ch;
            bump();
        }
        if (!closed) {
            t.span.length = std::max<std::size_t>(1, pos_ - start);
            fail("unterminated string literal", SourceSpan{t.span.line, t.span.column, 1}, {"'\"'"});
        }
        t.kind = Tok::String;
        t.text = std::string(text_.substr(start, pos_ - start));
        t.symbol = std::move(value);
    } else if (c == '.') {
        bump();
        t.kind = Tok::Dot;
        t.text = ".";
    } else if (c == '=' || c == '<' || c == '>' || c == '!') {
        bump();
        if (pos_ < text_.size() && text_[pos_] == '=' && c != '=') bump();
        t.text = std::string(text_.substr(start, pos_ - start));
        if (t.text == "!") fail("'!' must be followed by '='", t.span, {"'!='"});
        t.kind = Tok::Cmp;
        t.comparator = *comparator_from_string(t.text);
    } else {
        std::string shown = std::isprint(static_cast<unsigned char>(c)) ? std::string(1, c) : "byte " + std::to_string(static_cast<unsigned char>(c));
        fail("unexpected character " + shown, t.span, {});
    }
    t.span.length = std::max<std::size_t>(1, pos_ - start);
    return t;
}

}  // namespace detail

namespace {

using detail::Lexer;
using detail::Tok;
using detail::Token;

SourceSpan cover(const SourceSpan& from, const SourceSpan& to) {
    if (from.line != to.line) return from;
    return SourceSpan{from.line, from.column, to.column + to.length - from.column};
}

class Parser {
public:
    explicit Parser(Lexer lexer) : lexer_(std::move(lexer)) { current_ = lexer_.next(); }

    ParsedRule rule() {
        ParsedRule out;
        const SourceSpan start = current_.span;
        expect(Tok::Do, {"DO"});
        SourceSpan span;
        out.rule.do_part.push_back(reference(span));
        out.spans.do_part.push_back(span);
        while (current_.kind == Tok::Then) {
            advance();
            out.rule.do_part.push_back(reference(span));
            out.spans.do_part.push_back(span);
        }
        expect(Tok::When, {"THEN", "WHEN"});
        out.rule.when_part = reference(out.spans.when_part);
        SourceSpan last = out.spans.when_part;
        if (current_.kind == Tok::While) {
            advance();
            out.rule.while_part.push_back(predicate(span));
            out.spans.while_part.push_back(span);
            while (current_.kind == Tok::And) {
                advance();
                out.rule.while_part.push_back(predicate(span));
                out.spans.while_part.push_back(span);
            }
            last = span;
            expect(Tok::End, {"AND", "end of input"});
        } else {
            expect(Tok::End, {"WHILE", "end of input"});
        }
        out.spans.rule = cover(start, last);
        return out;
    }

private:
    void advance() { current_ = lexer_.next(); }

    [[noreturn]] void unexpected(std::vector<std::string> expected) {
        std::string list;
        for (std::size_t i = 0; i < expected.size(); ++i) list += (i ? ", " : "") + expected[i];
        std::string what = "expected " + list + ", found " + detail::describe_token(current_);
        lexer_.fail(what, current_.span, std::move(expected));
    }

    void expect(Tok kind, std::vector<std::string> expected) {
        if (current_.kind != kind) unexpected(std::move(expected));
        advance();
    }

    std::string identifier() {
        if (current_.kind != Tok::Ident) unexpected({"identifier"});
        std::string name = current_.text;
        advance();
        return name;
    }

    CapabilityRef reference(SourceSpan& span) {
        const SourceSpan start = current_.span;
        CapabilityRef ref;
        ref.device = identifier();
        expect(Tok::Dot, {"'.'"});
        const SourceSpan end = current_.span;
        ref.capability = identifier();
        span = cover(start, end);
        return ref;
    }

    StatePredicate predicate(SourceSpan& span) {
        SourceSpan ref_span;
        CapabilityRef ref = reference(ref_span);
        StatePredicate p;
        p.device = std::move(ref.device);
        p.attribute = std::move(ref.capability);
        if (current_.kind != Tok::Cmp) unexpected({"comparator"});
        p.comparator = current_.comparator;
        advance();
        const SourceSpan literal_span = current_.span;
        switch (current_.kind) {
            case Tok::True: p.literal = true; break;
            case Tok::False: p.literal = false; break;
            case Tok::Integer: p.literal = current_.integer; break;
            case Tok::String: p.literal = current_.symbol; break;
            case Tok::Ident: p.literal = current_.text; break;
            default: unexpected({"literal"});
        }
        advance();
        span = cover(ref_span, literal_span);
        return p;
    }

    Lexer lexer_;
    Token current_;
};

}  // namespace

namespace detail {

std::string describe_token(const Token& t) { return t.kind == Tok::End ? "end of input" : "'" + t.text + "'"; }

ParsedRule parse_rule_at(std::string_view text, std::size_t line, std::size_t column) {
    return Parser(Lexer(text, line, column)).rule();
}

}  // namespace detail

ParsedRule parse_rule(std::string_view text) { return detail::parse_rule_at(text, 1, 1); }

// ---------------------------------------------------------------------------
// Rules file

std::vector<Rule> parse_rules_file(std::string_view text) {
    std::vector<Rule> rules;
    std::set<std::string> ids;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        ++line_no;
        pos = end + 1;

        std::size_t col = 0;
        while (col < line.size() && (line[col] == ' ' || line[col] == '\t' || line[col] == '\r')) ++col;
        if (col == line.size() || line[col] == '#') {
            if (end == text.size()) break;
            continue;
        }

        std::string id = "r" + std::to_string(rules.size() + 1);
        if (line[col] == '@') {
            const std::size_t at = col++;
            const std::size_t id_start = col;
            while (col < line.size() && (std::isalnum(static_cast<unsigned char>(line[col])) || line[col] == '_')) ++col;
            if (col == id_start || col >= line.size() || line[col] != ':') {
                throw ParseError("malformed rule id annotation at line " + std::to_string(line_no), SourceSpan{line_no, at + 1, col - at + 1},
                                 {"'@<id>:'"});
            }
            id = std::string(line.substr(id_start, col - id_start));
            ++col;
        }
        ParsedRule parsed = detail::parse_rule_at(line.substr(col), line_no, col + 1);
        if (!ids.insert(id).second) {
            throw ParseError("duplicate rule id '" + id + "' at line " + std::to_string(line_no), SourceSpan{line_no, 1, 1}, {});
        }
        parsed.rule.id = id;
        rules.push_back(std::move(parsed.rule));
        if (end == text.size()) break;
    }
    return rules;
}

}  // namespace sensation
