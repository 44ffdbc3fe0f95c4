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
#include "sensation/engine.hpp"

#include <algorithm>

#include "json_util.hpp"

namespace sensation {

using detail::check_fields;
using detail::get_integer;
using detail::get_string;
using detail::indexed;
using detail::member;
using detail::require_array;
using detail::schema_error;
using nlohmann::json;

Timeline::Timeline(std::vector<Stimulus> stimuli) : stimuli_(std::move(stimuli)) {
    for (std::size_t i = 1; i < stimuli_.size(); ++i) {
        if (stimuli_[i].timestamp < stimuli_[i - 1].timestamp) {
            throw TimelineError("timeline is not sorted: stimulus " + std::to_string(i) + " at t=" +
                                std::to_string(stimuli_[i].timestamp) + " follows t=" +
                                std::to_string(stimuli_[i - 1].timestamp));
        }
    }
}

// ---------------------------------------------------------------------------
// Timeline file

namespace {

CapabilityRef ref_from(const json& j, const std::string& path) {
    check_fields(j, path, {"device", "capability"});
    return {get_string(j, path, "device"), get_string(j, path, "capability")};
}

StateEffect effect_from(const json& j, const std::string& path) {
    check_fields(j, path, {"device", "attribute", "value"});
    StateEffect e{get_string(j, path, "device"), get_string(j, path, "attribute"), false};
    try {
        e.value = value_from_json(member(j, path, "value"));
    } catch (const SyntaxError& err) {
        schema_error(path + ".value", err.what());
    }
    return e;
}

json effect_to(const StateEffect& e) {
    return json{{"device", e.device}, {"attribute", e.attribute}, {"value", value_to_json(e.value)}};
}

json ref_to(const CapabilityRef& r) { return json{{"device", r.device}, {"capability", r.capability}}; }

}  // namespace

Timeline timeline_from_json(const json& j) {
    require_array(j, "$");
    std::vector<Stimulus> stimuli;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string path = indexed("$", i);
        const json& s = j[i];
        detail::require_object(s, path);
        Stimulus stimulus;
        stimulus.timestamp = get_integer(s, path, "t");
        const bool is_event = s.contains("event");
        const bool is_set = s.contains("set");
        if (is_event == is_set) schema_error(path, "stimulus needs exactly one of 'event' or 'set'");
        if (is_event) {
            check_fields(s, path, {"t", "event", "args"});
            EventStimulus e{ref_from(s["event"], path + ".event"), json::object()};
            if (auto it = s.find("args"); it != s.end()) {
                detail::require_object(*it, path + ".args");
                e.args = *it;
            }
            stimulus.payload = std::move(e);
        } else {
            check_fields(s, path, {"t", "set"});
            stimulus.payload = effect_from(s["set"], path + ".set");
        }
        stimuli.push_back(std::move(stimulus));
    }
    return Timeline(std::move(stimuli));
}

Timeline load_timeline(std::string_view source) { return timeline_from_json(parse_document(source)); }

json timeline_to_json(const Timeline& timeline) {
    json out = json::array();
    for (const auto& s : timeline.stimuli()) {
        if (const auto* e = std::get_if<EventStimulus>(&s.payload)) {
            json entry{{"t", s.timestamp}, {"event", ref_to(e->event)}};
            if (!e->args.empty()) entry["args"] = e->args;
            out.push_back(std::move(entry));
        } else {
            out.push_back({{"t", s.timestamp}, {"set", effect_to(std::get<StateEffect>(s.payload))}});
        }
    }
    return out;
}

void check_timeline(const Timeline& timeline, const CapabilityRegistry& registry) {
    for (std::size_t i = 0; i < timeline.stimuli().size(); ++i) {
        const Stimulus& s = timeline.stimuli()[i];
        const std::string where = "stimulus " + std::to_string(i) + ": ";
        if (const auto* e = std::get_if<EventStimulus>(&s.payload)) {
            const Capability* c = registry.find_capability(e->event);
            if (c == nullptr) throw TimelineError(where + "unknown event '" + e->event.str() + "'");
            if (c->kind != CapabilityKind::Event) throw TimelineError(where + "'" + e->event.str() + "' is not an event");
        } else {
            const auto& effect = std::get<StateEffect>(s.payload);
            const Attribute* a = registry.find_attribute(effect.key());
            if (a == nullptr) throw TimelineError(where + "unknown attribute '" + effect.key().str() + "'");
            if (!a->domain.contains(effect.value)) {
                throw TimelineError(where + "value " + to_string(effect.value) + " is outside the domain of '" +
                                    effect.key().str() + "'");
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Trace serialization

bool EmissionTrace::aborted() const {
    return std::any_of(entries.begin(), entries.end(),
                       [](const TraceEntry& e) { return std::holds_alternative<LoopAborted>(e); });
}

json trace_entry_to_json(const TraceEntry& entry) {
    if (const auto* f = std::get_if<FireEntry>(&entry)) {
        json actions = json::array();
        for (const auto& a : f->actions) actions.push_back(a.str());
        json effects = json::array();
        for (const auto& e : f->effects) effects.push_back({{"target", e.key().str()}, {"value", value_to_json(e.value)}});
        return json{{"type", "fire"},   {"t", f->timestamp},  {"depth", f->depth},    {"rule", f->rule},
                    {"trigger", f->trigger.str()}, {"actions", actions}, {"effects", effects}};
    }
    const auto& a = std::get<LoopAborted>(entry);
    json pending = json::array();
    for (const auto& p : a.pending) pending.push_back(p.str());
    return json{{"type", "loop_aborted"}, {"t", a.timestamp}, {"depth", a.depth}, {"chain", a.chain}, {"pending", pending}};
}

namespace {

CapabilityRef split_ref(const std::string& text, const std::string& path) {
    auto dot = text.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == text.size()) {
        schema_error(path, "expected 'device.name', got '" + text + "'");
    }
    return {text.substr(0, dot), text.substr(dot + 1)};
}

std::vector<std::string> string_list(const json& j, const std::string& path) {
    require_array(j, path);
    std::vector<std::string> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_string()) schema_error(indexed(path, i), "expected a string");
        out.push_back(j[i].get<std::string>());
    }
    return out;
}

}  // namespace

TraceEntry trace_entry_from_json(const json& j) {
    const std::string path = "$";
    const std::string type = get_string(j, path, "type");
    if (type == "fire") {
        check_fields(j, path, {"type", "t", "depth", "rule", "trigger", "actions", "effects"});
        FireEntry f;
        f.timestamp = get_integer(j, path, "t");
        f.depth = static_cast<int>(get_integer(j, path, "depth"));
        f.rule = get_string(j, path, "rule");
        f.trigger = split_ref(get_string(j, path, "trigger"), path + ".trigger");
        for (const auto& a : string_list(member(j, path, "actions"), path + ".actions")) {
            f.actions.push_back(split_ref(a, path + ".actions"));
        }
        const json& effects = require_array(member(j, path, "effects"), path + ".effects");
        for (std::size_t i = 0; i < effects.size(); ++i) {
            const std::string epath = indexed(path + ".effects", i);
            check_fields(effects[i], epath, {"target", "value"});
            CapabilityRef target = split_ref(get_string(effects[i], epath, "target"), epath + ".target");
            Value value;
            try {
                value = value_from_json(member(effects[i], epath, "value"));
            } catch (const SyntaxError& e) {
                schema_error(epath + ".value", e.what());
            }
            f.effects.push_back({target.device, target.capability, value});
        }
        return f;
    }
    if (type == "loop_aborted") {
        check_fields(j, path, {"type", "t", "depth", "chain", "pending"});
        LoopAborted a;
        a.timestamp = get_integer(j, path, "t");
        a.depth = static_cast<int>(get_integer(j, path, "depth"));
        a.chain = string_list(member(j, path, "chain"), path + ".chain");
        for (const auto& p : string_list(member(j, path, "pending"), path + ".pending")) {
            a.pending.push_back(split_ref(p, path + ".pending"));
        }
        return a;
    }
    schema_error(path + ".type", "unknown trace entry type '" + type + "'");
}

json trace_entries_to_json(const std::vector<TraceEntry>& entries) {
    json out = json::array();
    for (const auto& e : entries) out.push_back(trace_entry_to_json(e));
    return out;
}

std::vector<TraceEntry> trace_entries_from_json(const json& j) {
    require_array(j, "$");
    std::vector<TraceEntry> out;
    for (const auto& e : j) out.push_back(trace_entry_from_json(e));
    return out;
}

json trace_to_json(const EmissionTrace& trace) {
    return json{{"entries", trace_entries_to_json(trace.entries)}, {"final_world", world_to_json(trace.final_world)}};
}

// ---------------------------------------------------------------------------
// Interpreter

namespace {

/// Dispatch over rules already sorted by id.
DispatchResult dispatch_sorted(const CapabilityRegistry& registry, const WorldState& world,
                               std::span<const Rule> rules, const PendingEvent& pending, int depth) {
    const Capability* event = registry.find_capability(pending.event);
    if (event == nullptr || event->kind != CapabilityKind::Event) {
        throw TimelineError("'" + pending.event.str() + "' is not a declared event");
    }

    DispatchResult result;
    result.world = apply_effects(world, event->effects, &registry);

    // Every rule sees the same post-intrinsic snapshot.
    std::vector<const Rule*> selected;
    for (const auto& rule : rules) {
        if (rule.when_part != pending.event) continue;
        const bool holds = std::all_of(rule.while_part.begin(), rule.while_part.end(),
                                       [&](const StatePredicate& p) { return eval_predicate(result.world, p); });
        if (holds) selected.push_back(&rule);
    }

    for (const Rule* rule : selected) {
        FireEntry entry{world.clock, depth, rule->id, pending.event, rule->do_part, {}};
        std::vector<std::string> chain = pending.chain;
        chain.push_back(rule->id);
        for (const auto& action_ref : rule->do_part) {
            const Capability* action = registry.find_capability(action_ref);
            result.world = apply_effects(result.world, action->effects, &registry);
            entry.effects.insert(entry.effects.end(), action->effects.begin(), action->effects.end());
            for (const auto& emitted : action->emits) result.enqueued.push_back({emitted, chain});
        }
        result.fired.push_back(std::move(entry));
    }
    return result;
}

void check_config(const EngineConfig& config) {
    if (config.max_cascade_depth < 1) throw std::invalid_argument("max_cascade_depth must be at least 1");
    if (config.max_cascade_events < 1) throw std::invalid_argument("max_cascade_events must be at least 1");
}

}  // namespace

DispatchResult dispatch_event(const CapabilityRegistry& registry, const WorldState& world, std::span<const Rule> rules,
                              const PendingEvent& event, int depth, const EngineConfig& config) {
    check_config(config);
    if (depth < 0 || depth > config.max_cascade_depth) {
        throw DepthExceeded("depth " + std::to_string(depth) + " exceeds max_cascade_depth " +
                            std::to_string(config.max_cascade_depth));
    }
    const std::vector<Rule> sorted = sorted_by_id(std::vector<Rule>(rules.begin(), rules.end()));
    return dispatch_sorted(registry, world, sorted, event, depth);
}

EmissionTrace run_simulation_from(const CapabilityRegistry& registry, std::span<const Rule> rules,
                                  const Timeline& timeline, const WorldState& initial, const EngineConfig& config) {
    check_config(config);
    require_valid(rules, registry);
    check_timeline(timeline, registry);
    const std::vector<Rule> sorted = sorted_by_id(std::vector<Rule>(rules.begin(), rules.end()));

    EmissionTrace trace;
    WorldState world = initial;
    for (const auto& stimulus : timeline.stimuli()) {
        world.clock = stimulus.timestamp;
        if (const auto* effect = std::get_if<StateEffect>(&stimulus.payload)) {
            world = apply_effects(world, std::span(effect, 1), &registry);
            continue;
        }

        // Breadth-first cascade: every event of one depth is dispatched
        // before any event it caused.
        std::vector<PendingEvent> level{{std::get<EventStimulus>(stimulus.payload).event, {}}};
        std::size_t dispatched = 0;
        for (int depth = 0; !level.empty(); ++depth) {
            dispatched += level.size();
            if (depth > config.max_cascade_depth || dispatched > config.max_cascade_events) {
                LoopAborted abort{stimulus.timestamp, depth - 1, level.front().chain, {}};
                for (const auto& p : level) abort.pending.push_back(p.event);
                trace.entries.emplace_back(std::move(abort));
                break;
            }
            std::vector<PendingEvent> next;
            for (const auto& pending : level) {
                DispatchResult r = dispatch_sorted(registry, world, sorted, pending, depth);
                for (auto& f : r.fired) trace.entries.emplace_back(std::move(f));
                world = std::move(r.world);
                next.insert(next.end(), std::make_move_iterator(r.enqueued.begin()),
                            std::make_move_iterator(r.enqueued.end()));
            }
            level = std::move(next);
        }
    }
    trace.final_world = std::move(world);
    return trace;
}

EmissionTrace run_simulation(const CapabilityRegistry& registry, std::span<const Rule> rules, const Timeline& timeline,
                             const EngineConfig& config) {
    return run_simulation_from(registry, rules, timeline, registry.initial_world(), config);
}

}  // namespace sensation
