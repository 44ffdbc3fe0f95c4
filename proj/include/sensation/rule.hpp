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

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "sensation/capability.hpp"
#include "sensation/error.hpp"

namespace sensation {

using EventRef = CapabilityRef;
using ActionRef = CapabilityRef;

/// `DO <actions> WHEN <event> WHILE <predicates>`. The WHEN slot holds
/// exactly one event by construction; WHILE is a conjunction.
struct Rule {
    std::string id;
    std::vector<ActionRef> do_part;
    EventRef when_part;
    std::vector<StatePredicate> while_part;

    friend bool operator==(const Rule&, const Rule&) = default;
};

/// Orders rule ids naturally, so `r2` precedes `r10`.
bool rule_id_less(std::string_view a, std::string_view b);

/// Sorts rules by id with rule_id_less.
std::vector<Rule> sorted_by_id(std::vector<Rule> rules);

enum class RulePart { Do, When, While };

std::string_view to_string(RulePart part);

enum class ViolationKind {
    Unresolved,    // device/capability/attribute does not exist
    KindMismatch,  // capability of the wrong kind for its slot
    Incomparable,  // ordering comparator on an unordered domain
    OutOfDomain,   // literal outside the attribute's domain
};

std::string_view to_string(ViolationKind kind);

struct Violation {
    RulePart part;
    std::size_t index;
    ViolationKind kind;
    std::string message;

    friend bool operator==(const Violation&, const Violation&) = default;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const noexcept { return violations.empty(); }
};

class ValidationError : public Error {
public:
    ValidationError(std::string rule_id, ValidationReport report);

    const std::string& rule_id() const noexcept { return rule_id_; }
    const ValidationReport& report() const noexcept { return report_; }

private:
    std::string rule_id_;
    ValidationReport report_;
};

ValidationReport validate_rule(const Rule& rule, const CapabilityRegistry& registry);

/// Throws ValidationError for the first rule that fails validation.
void require_valid(std::span<const Rule> rules, const CapabilityRegistry& registry);

/// Sorts WHILE by (device, attribute, comparator, literal) and drops exact
/// duplicates. DO order is kept.
Rule canonicalize(const Rule& rule);

nlohmann::json rule_to_json(const Rule& rule);
Rule rule_from_json(const nlohmann::json& j);
nlohmann::json violation_to_json(const Violation& v);

// ---------------------------------------------------------------------------
// Grading

enum class Grade { S, P, F };

struct GradeLabel {
    Grade label;
    int score;

    static GradeLabel from(Grade g) { return {g, g == Grade::S ? 2 : g == Grade::P ? 1 : 0}; }

    friend bool operator==(const GradeLabel&, const GradeLabel&) = default;
};

std::string_view to_string(Grade grade);

struct ReferenceTask {
    std::string id;
    std::string description;
    std::vector<Rule> reference_rules;
    /// One flag per reference rule; when false DO is compared as a multiset.
    std::vector<bool> ordered_do;
};

enum class MatchClass { Miss, Partial, Exact };

std::string_view to_string(MatchClass m);

/// Classifies one candidate against one reference rule.
MatchClass classify_match(const Rule& candidate, const Rule& reference, bool ordered_do);

struct ReferenceMatch {
    std::string reference;
    MatchClass match = MatchClass::Miss;
    /// Ids of every candidate reaching `match` (empty on Miss).
    std::vector<std::string> candidates;
};

struct GradeReport {
    GradeLabel grade;
    std::vector<ReferenceMatch> matches;
    /// Candidates that are not a best match for any reference rule.
    std::vector<std::string> unmatched;
};

class InvalidCandidate : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Structural S/P/F grading of `candidates` against `task`. Candidates must
/// validate against `registry` (InvalidCandidate otherwise).
GradeReport grade(std::span<const Rule> candidates, const ReferenceTask& task, const CapabilityRegistry& registry);

nlohmann::json grade_report_to_json(const GradeReport& report);

}  // namespace sensation
