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

// Static detection of contradictions, loops and redundancy. The only
// decision procedure is exhaustive enumeration over the (finite) domains of
// the attributes a check references.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "sensation/capability.hpp"
#include "sensation/diagnostic.hpp"
#include "sensation/rule.hpp"

namespace sensation {

/// Upper bound on assignments a single check may enumerate.
inline constexpr std::size_t kMaxEnumeration = 1'000'000;

/// For each attribute, the pairs of action capabilities whose effects assign
/// it different values. Symmetric: (a, b) present iff (b, a) present.
class ConflictTable {
public:
    explicit ConflictTable(const CapabilityRegistry& registry);

    const std::map<AttributeKey, std::vector<std::pair<CapabilityRef, CapabilityRef>>>& entries() const noexcept {
        return entries_;
    }

    /// Attributes on which `a` and `b` assign different values, with the
    /// values each assigns.
    std::vector<ActionConflict> conflicts(const CapabilityRef& a, const CapabilityRef& b) const;

private:
    std::map<AttributeKey, std::vector<std::pair<CapabilityRef, CapabilityRef>>> entries_;
    std::map<CapabilityRef, std::map<AttributeKey, Value>> assigned_;
};

/// Values forced on attributes before a WHILE is evaluated (the triggering
/// event's intrinsic effects, or the effects along a cascade edge).
using Pins = std::map<AttributeKey, Value>;

/// First assignment (in domain enumeration order) over the attributes the
/// predicates reference that satisfies all of them, with pinned attributes
/// held at their pinned value. Throws DomainTooLarge past kMaxEnumeration.
std::optional<Assignment> find_assignment(std::span<const StatePredicate> predicates,
                                          const CapabilityRegistry& registry, const Pins& pins = {});

/// Satisfying world for a conjunction: the registry's initial world with the
/// referenced attributes overridden by the first satisfying assignment.
std::optional<WorldState> satisfiable_conjunction(std::span<const StatePredicate> predicates,
                                                  const CapabilityRegistry& registry);

/// Intrinsic effects of `event` as pins (last writer wins).
Pins event_pins(const CapabilityRef& event, const CapabilityRegistry& registry);

std::vector<Diagnostic> detect_contradictions(std::span<const Rule> rules, const CapabilityRegistry& registry);
/// Elementary trigger cycles. A cycle is an error when the engine, with its
/// default config, aborts on the entry event from some world; otherwise a
/// warning.
std::vector<Diagnostic> detect_loops(std::span<const Rule> rules, const CapabilityRegistry& registry);
std::vector<Diagnostic> detect_redundancy(std::span<const Rule> rules, const CapabilityRegistry& registry);

/// Validates the rules, then runs all three detectors. Output depends only
/// on the set of rules, not their order.
std::vector<Diagnostic> analyze(std::span<const Rule> rules, const CapabilityRegistry& registry);

}  // namespace sensation
