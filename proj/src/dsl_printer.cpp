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
#include <cctype>

#include "dsl_lexer.hpp"
#include "sensation/dsl.hpp"

namespace sensation {

namespace {

bool plain_identifier(const std::string& s) {
    if (s.empty()) return false;
    if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (char c : s) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    }
    return !detail::keyword(s).has_value();
}

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    return out + "\"";
}

}  // namespace

std::string print_literal(const Value& value) {
    if (const auto* s = std::get_if<std::string>(&value)) return plain_identifier(*s) ? *s : quote(*s);
    return to_string(value);
}

std::string print_rule(const Rule& rule) {
    std::string out = "DO ";
    for (std::size_t i = 0; i < rule.do_part.size(); ++i) {
        if (i) out += " THEN ";
        out += rule.do_part[i].str();
    }
    out += " WHEN " + rule.when_part.str();
    for (std::size_t i = 0; i < rule.while_part.size(); ++i) {
        const StatePredicate& p = rule.while_part[i];
        out += i ? " AND " : " WHILE ";
        out += p.key().str() + " " + std::string(to_string(p.comparator)) + " " + print_literal(p.literal);
    }
    return out;
}

std::string print_rules_file(const std::vector<Rule>& rules) {
    std::string out;
    for (std::size_t i = 0; i < rules.size(); ++i) {
        if (rules[i].id != "r" + std::to_string(i + 1)) out += "@" + rules[i].id + ": ";
        out += print_rule(rules[i]) + "\n";
    }
    return out;
}

}  // namespace sensation
