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

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "sensation/capability.hpp"

namespace sensation {

enum class DiagnosticKind { Contradiction, Loop, Redundancy, FlippedTrigger, TimeWindowFallacy };
enum class Severity { Error, Warning };

std::string_view to_string(DiagnosticKind kind);
std::string_view to_string(Severity severity);

/// Partial world: values for the attributes a finding depends on.
using Assignment = std::map<AttributeKey, Value>;

struct ActionConflict {
    AttributeKey attribute;
    CapabilityRef first_action;
    Value first_value;
    CapabilityRef second_action;
    Value second_value;

    friend bool operator==(const ActionConflict&, const ActionConflict&) = default;
};

/// Both rules fire on `event` in `world` and assign conflicting values.
struct ContradictionWitness {
    CapabilityRef event;
    Assignment world;
    std::vector<ActionConflict> conflicts;
};

/// Elementary cycle in the trigger graph: rule `cycle[i]` emits `events[i]`,
/// which is the WHEN of `cycle[i + 1]` (wrapping around).
struct LoopWitness {
    std::vector<std::string> cycle;
    std::vector<CapabilityRef> events;
    /// A world from which the entry rule's event cascades until the engine
    /// aborts; absent when the cycle is state-blocked.
    std::optional<Assignment> world;
};

/// `redundant` fires only when `subsumer` fires, and `subsumer` performs
/// every action of `redundant`: action i of `redundant` is action
/// `action_mapping[i]` of `subsumer`.
struct RedundancyWitness {
    std::string redundant;
    std::string subsumer;
    CapabilityRef event;
    std::vector<std::size_t> action_mapping;
    /// A world in which both fire; absent when `redundant` can never fire.
    std::optional<Assignment> world;
    /// Number of assignments checked for the implication.
    std::size_t enumerated = 0;
};

/// Legacy triggers that produced a FlippedTrigger or TimeWindowFallacy.
struct TriggerWitness {
    std::vector<CapabilityRef> triggers;
};

using Witness = std::variant<ContradictionWitness, LoopWitness, RedundancyWitness, TriggerWitness>;

struct Diagnostic {
    DiagnosticKind kind;
    Severity severity;
    std::vector<std::string> rules;
    Witness witness;
    std::string message;
};

nlohmann::json assignment_to_json(const Assignment& assignment);
nlohmann::json diagnostic_to_json(const Diagnostic& diagnostic);
nlohmann::json diagnostics_to_json(const std::vector<Diagnostic>& diagnostics);

/// One line: `<severity> <Kind> [r1, r2]: <message> <witness summary>`.
std::string render_diagnostic(const Diagnostic& diagnostic);

}  // namespace sensation
