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
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "sensation/capability.hpp"
#include "sensation/rule.hpp"

namespace sensation {

struct EventStimulus {
    EventRef event;
    /// Opaque event arguments; carried through, not interpreted.
    nlohmann::json args;

    friend bool operator==(const EventStimulus&, const EventStimulus&) = default;
};

struct Stimulus {
    std::int64_t timestamp = 0;
    std::variant<EventStimulus, StateEffect> payload;

    friend bool operator==(const Stimulus&, const Stimulus&) = default;
};

/// Stimuli in non-decreasing timestamp order; equal timestamps keep their
/// input order.
class Timeline {
public:
    Timeline() = default;
    /// Throws TimelineError if timestamps decrease.
    explicit Timeline(std::vector<Stimulus> stimuli);

    const std::vector<Stimulus>& stimuli() const noexcept { return stimuli_; }

    friend bool operator==(const Timeline&, const Timeline&) = default;

private:
    std::vector<Stimulus> stimuli_;
};

Timeline timeline_from_json(const nlohmann::json& j);
Timeline load_timeline(std::string_view source);
nlohmann::json timeline_to_json(const Timeline& timeline);

/// Throws TimelineError if a stimulus names an unknown event/attribute or
/// assigns an out-of-domain value.
void check_timeline(const Timeline& timeline, const CapabilityRegistry& registry);

struct EngineConfig {
    int max_cascade_depth = 16;
    /// Events one stimulus may dispatch across its whole cascade. Fan-out
    /// cycles hit this long before the depth bound.
    std::size_t max_cascade_events = 10'000;
};

struct FireEntry {
    std::int64_t timestamp = 0;
    int depth = 0;
    std::string rule;
    EventRef trigger;
    std::vector<ActionRef> actions;
    /// Effects of the fired actions, in application order.
    std::vector<StateEffect> effects;

    friend bool operator==(const FireEntry&, const FireEntry&) = default;
};

/// Emitted when a cascade would run past max_cascade_depth or dispatch more
/// than max_cascade_events. `depth` is the last depth dispatched; `chain` is
/// the sequence of rules that produced the first pending event.
struct LoopAborted {
    std::int64_t timestamp = 0;
    int depth = 0;
    std::vector<std::string> chain;
    std::vector<EventRef> pending;

    friend bool operator==(const LoopAborted&, const LoopAborted&) = default;
};

using TraceEntry = std::variant<FireEntry, LoopAborted>;

struct EmissionTrace {
    std::vector<TraceEntry> entries;
    WorldState final_world;

    bool aborted() const;

    friend bool operator==(const EmissionTrace&, const EmissionTrace&) = default;
};

nlohmann::json trace_entry_to_json(const TraceEntry& entry);
TraceEntry trace_entry_from_json(const nlohmann::json& j);
nlohmann::json trace_entries_to_json(const std::vector<TraceEntry>& entries);
std::vector<TraceEntry> trace_entries_from_json(const nlohmann::json& j);
nlohmann::json trace_to_json(const EmissionTrace& trace);

/// An event waiting to be dispatched, with the rules that caused it.
struct PendingEvent {
    EventRef event;
    std::vector<std::string> chain;

    friend bool operator==(const PendingEvent&, const PendingEvent&) = default;
};

struct DispatchResult {
    std::vector<FireEntry> fired;
    WorldState world;
    std::vector<PendingEvent> enqueued;
};

/// One evaluation round: apply the event's intrinsic effects, select every
/// rule whose WHEN matches and whose WHILE holds on that snapshot, then run
/// the selected rules in ascending id order, applying each action's effects
/// immediately and collecting emitted events for depth + 1.
DispatchResult dispatch_event(const CapabilityRegistry& registry, const WorldState& world, std::span<const Rule> rules,
                              const PendingEvent& event, int depth, const EngineConfig& config = {});

/// Runs `rules` over `timeline` from the registry's initial world.
EmissionTrace run_simulation(const CapabilityRegistry& registry, std::span<const Rule> rules, const Timeline& timeline,
                             const EngineConfig& config = {});

/// Same as run_simulation but starting from `initial`.
EmissionTrace run_simulation_from(const CapabilityRegistry& registry, std::span<const Rule> rules,
                                  const Timeline& timeline, const WorldState& initial, const EngineConfig& config = {});

}  // namespace sensation
