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

// Concrete syntax for rules:
//
//   rule      := "DO" action ("THEN" action)* "WHEN" event
//                ("WHILE" predicate ("AND" predicate)*)?
//   action    := ident "." ident
//   event     := ident "." ident
//   predicate := ident "." ident cmp literal
//   cmp       := "=" | "!=" | "<" | ">" | "<=" | ">="
//   literal   := "true" | "false" | integer | quoted-string | ident
//
// Keywords are case-insensitive and reserved; `#` starts a line comment.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sensation/capability.hpp"
#include "sensation/diagnostic.hpp"
#include "sensation/error.hpp"
#include "sensation/rule.hpp"

namespace sensation {

struct RuleSpans {
    SourceSpan rule;
    std::vector<SourceSpan> do_part;
    SourceSpan when_part;
    std::vector<SourceSpan> while_part;
};

struct ParsedRule {
    Rule rule;
    RuleSpans spans;
};

/// Parses one rule. The returned rule has an empty id.
ParsedRule parse_rule(std::string_view text);

/// Canonical text: uppercase keywords, single spaces, no WHILE when empty.
std::string print_rule(const Rule& rule);

/// Prints a literal the way the parser reads it back (quoting symbols that
/// are not plain identifiers or collide with keywords).
std::string print_literal(const Value& value);

/// Rules file: one rule per line, blank lines and comments allowed. Ids are
/// `r<N>` by position unless the line starts with an `@<id>:` annotation.
std::vector<Rule> parse_rules_file(std::string_view text);

/// Inverse of parse_rules_file; annotations are emitted only where the id
/// differs from the positional default.
std::string print_rules_file(const std::vector<Rule>& rules);

// ---------------------------------------------------------------------------
// Legacy IF-THEN import

struct LegacyTrigger {
    std::string device;
    std::string capability;
    /// Stated value for state triggers.
    std::optional<Value> value;

    CapabilityRef ref() const { return {device, capability}; }
};

struct LegacyRule {
    std::string id;
    std::vector<LegacyTrigger> triggers;
    std::vector<ActionRef> actions;
};

enum class TriggerClass { Event, State };

std::string_view to_string(TriggerClass c);

struct ImportReport {
    std::optional<Rule> converted;
    std::vector<TriggerClass> trigger_classification;
    std::vector<Diagnostic> diagnostics;
};

/// Legacy file: `[{triggers:[{device,capability,value?}], actions:[...]}]`.
/// Ids are assigned `r1, r2, ...` by position.
std::vector<LegacyRule> load_legacy(std::string_view source);

/// Classifies each trigger by its capability kind. Exactly one event
/// converts to a native rule with the state triggers as equality
/// predicates; no event yields FlippedTrigger, several yield
/// TimeWindowFallacy.
ImportReport import_legacy(const LegacyRule& legacy, const CapabilityRegistry& registry);

nlohmann::json import_report_to_json(const ImportReport& report);

}  // namespace sensation
