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
#include "sensation/analyzer.hpp"

#include <algorithm>
#include <set>

#include "sensation/engine.hpp"

namespace sensation {

// ---------------------------------------------------------------------------
// Conflict table

ConflictTable::ConflictTable(const CapabilityRegistry& registry) {
    for (const Capability* c : registry.capabilities()) {
        if (c->kind != CapabilityKind::Action) continue;
        auto& assigned = assigned_[c->ref()];
        for (const auto& e : c->effects) assigned[e.key()] = e.value;
    }
    for (auto a = assigned_.begin(); a != assigned_.end(); ++a) {
        for (auto b = std::next(a); b != assigned_.end(); ++b) {
            for (const auto& [key, value] : a->second) {
                auto other = b->second.find(key);
                if (other == b->second.end() || other->second == value) continue;
                entries_[key].emplace_back(a->first, b->first);
                entries_[key].emplace_back(b->first, a->first);
            }
        }
    }
}

std::vector<ActionConflict> ConflictTable::conflicts(const CapabilityRef& a, const CapabilityRef& b) const {
    std::vector<ActionConflict> out;
    auto ia = assigned_.find(a);
    auto ib = assigned_.find(b);
    if (ia == assigned_.end() || ib == assigned_.end()) return out;
    for (const auto& [key, value] : ia->second) {
        auto other = ib->second.find(key);
        if (other != ib->second.end() && other->second != value) out.push_back({key, a, value, b, other->second});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Enumeration

namespace {

/// Visits every assignment of the predicates' attributes (pins fixed) in
/// mixed-radix order until `visit` returns false.
template <typename Visit>
void enumerate(std::span<const StatePredicate> predicates, const CapabilityRegistry& registry, const Pins& pins,
               Visit&& visit) {
    // Keys in sorted order so the first witness does not depend on how the
    // predicates are listed.
    std::set<AttributeKey> keys;
    for (const auto& p : predicates) {
        if (registry.find_attribute(p.key()) == nullptr) {
            throw ReferenceError(ReferenceError::Reason::Dangling, p.key().str(),
                                 "predicate references undeclared attribute '" + p.key().str() + "'");
        }
        keys.insert(p.key());
    }
    std::vector<AttributeKey> free_keys;
    std::vector<const AttributeDomain*> domains;
    WorldState world;
    for (const auto& key : keys) {
        if (auto pin = pins.find(key); pin != pins.end()) {
            world.values.emplace(key, pin->second);
            continue;
        }
        const AttributeDomain& domain = registry.find_attribute(key)->domain;
        world.values.emplace(key, domain.at(0));
        free_keys.push_back(key);
        domains.push_back(&domain);
    }

    std::size_t total = 1;
    for (const auto* d : domains) {
        if (total > kMaxEnumeration / d->size()) {
            throw DomainTooLarge("enumeration over " + std::to_string(free_keys.size()) +
                                 " attributes exceeds " + std::to_string(kMaxEnumeration) + " assignments");
        }
        total *= d->size();
    }

    std::vector<std::size_t> digits(free_keys.size(), 0);
    for (std::size_t n = 0; n < total; ++n) {
        for (std::size_t i = 0; i < free_keys.size(); ++i) world.values[free_keys[i]] = domains[i]->at(digits[i]);
        if (!visit(static_cast<const WorldState&>(world))) return;
        for (std::size_t i = 0; i < digits.size(); ++i) {
            if (++digits[i] < domains[i]->size()) break;
            digits[i] = 0;
        }
    }
}

bool holds(std::span<const StatePredicate> predicates, const WorldState& world) {
    return std::all_of(predicates.begin(), predicates.end(),
                       [&](const StatePredicate& p) { return eval_predicate(world, p); });
}

std::vector<StatePredicate> concat(std::span<const StatePredicate> a, std::span<const StatePredicate> b) {
    std::vector<StatePredicate> out(a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

}  // namespace

std::optional<Assignment> find_assignment(std::span<const StatePredicate> predicates,
                                          const CapabilityRegistry& registry, const Pins& pins) {
    std::optional<Assignment> found;
    enumerate(predicates, registry, pins, [&](const WorldState& world) {
        if (!holds(predicates, world)) return true;
        found = world.values;
        return false;
    });
    return found;
}

std::optional<WorldState> satisfiable_conjunction(std::span<const StatePredicate> predicates,
                                                  const CapabilityRegistry& registry) {
    auto assignment = find_assignment(predicates, registry);
    if (!assignment) return std::nullopt;
    WorldState world = registry.initial_world();
    for (const auto& [key, value] : *assignment) world.values[key] = value;
    return world;
}

Pins event_pins(const CapabilityRef& event, const CapabilityRegistry& registry) {
    Pins pins;
    if (const Capability* c = registry.find_capability(event)) {
        for (const auto& e : c->effects) pins[e.key()] = e.value;
    }
    return pins;
}

// ---------------------------------------------------------------------------
// Detectors

namespace {

std::vector<const Rule*> by_id(std::span<const Rule> rules) {
    std::vector<const Rule*> out;
    for (const auto& r : rules) out.push_back(&r);
    std::stable_sort(out.begin(), out.end(), [](const Rule* a, const Rule* b) { return rule_id_less(a->id, b->id); });
    return out;
}

/// Index in `super` for each action of `sub`, or nullopt if `sub` is not a
/// sub-multiset of `super`.
std::optional<std::vector<std::size_t>> action_mapping(const std::vector<ActionRef>& sub,
                                                       const std::vector<ActionRef>& super) {
    std::vector<bool> used(super.size(), false);
    std::vector<std::size_t> mapping;
    for (const auto& action : sub) {
        bool found = false;
        for (std::size_t i = 0; i < super.size() && !found; ++i) {
            if (!used[i] && super[i] == action) {
                used[i] = true;
                mapping.push_back(i);
                found = true;
            }
        }
        if (!found) return std::nullopt;
    }
    return mapping;
}

}  // namespace

std::vector<Diagnostic> detect_contradictions(std::span<const Rule> rules, const CapabilityRegistry& registry) {
    const ConflictTable table(registry);
    const auto sorted = by_id(rules);
    std::vector<Diagnostic> out;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        for (std::size_t j = i + 1; j < sorted.size(); ++j) {
            const Rule& a = *sorted[i];
            const Rule& b = *sorted[j];
            if (a.when_part != b.when_part) continue;

            std::vector<ActionConflict> conflicts;
            for (const auto& x : a.do_part) {
                for (const auto& y : b.do_part) {
                    for (auto& c : table.conflicts(x, y)) {
                        if (std::find(conflicts.begin(), conflicts.end(), c) == conflicts.end()) {
                            conflicts.push_back(std::move(c));
                        }
                    }
                }
            }
            if (conflicts.empty()) continue;

            const auto conjunction = concat(a.while_part, b.while_part);
            auto world = find_assignment(conjunction, registry, event_pins(a.when_part, registry));
            if (!world) continue;

            std::string message = a.id + " and " + b.id + " both fire on " + a.when_part.str() + " and assign ";
            for (std::size_t k = 0; k < conflicts.size(); ++k) {
                message += (k ? ", " : "") + conflicts[k].attribute.str();
            }
            message += " conflicting values";
            out.push_back(Diagnostic{DiagnosticKind::Contradiction, Severity::Error, {a.id, b.id},
                                     ContradictionWitness{a.when_part, std::move(*world), std::move(conflicts)},
                                     std::move(message)});
        }
    }
    return out;
}

std::vector<Diagnostic> detect_redundancy(std::span<const Rule> rules, const CapabilityRegistry& registry) {
    const auto sorted = by_id(rules);
    struct Finding {
        std::size_t redundant;
        std::size_t subsumer;
        RedundancyWitness witness;
    };
    std::vector<Finding> findings;
    for (std::size_t bi = 0; bi < sorted.size(); ++bi) {
        for (std::size_t ai = 0; ai < sorted.size(); ++ai) {
            if (ai == bi) continue;
            const Rule& a = *sorted[ai];
            const Rule& b = *sorted[bi];
            if (a.when_part != b.when_part) continue;
            auto mapping = action_mapping(b.do_part, a.do_part);
            if (!mapping) continue;

            // while(B) implies while(A) on every assignment of the attributes
            // either rule reads, once the event's intrinsic effects apply.
            const auto both = concat(a.while_part, b.while_part);
            std::optional<Assignment> example;
            std::size_t enumerated = 0;
            bool implied = true;
            enumerate(both, registry, event_pins(b.when_part, registry), [&](const WorldState& world) {
                ++enumerated;
                if (!holds(b.while_part, world)) return true;
                if (!holds(a.while_part, world)) {
                    implied = false;
                    return false;
                }
                if (!example) example = world.values;
                return true;
            });
            if (!implied) continue;
            findings.push_back({bi, ai, RedundancyWitness{b.id, a.id, b.when_part, std::move(*mapping), example, enumerated}});
        }
    }

    std::set<std::pair<std::size_t, std::size_t>> pairs;
    for (const auto& f : findings) pairs.emplace(f.redundant, f.subsumer);

    std::vector<Diagnostic> out;
    for (auto& f : findings) {
        const std::string& b = sorted[f.redundant]->id;
        const std::string& a = sorted[f.subsumer]->id;
        std::string message;
        if (pairs.count({f.subsumer, f.redundant})) {
            message = b + " duplicates " + a + ": both fire in exactly the same worlds and perform the same actions";
        } else if (!f.witness.world) {
            message = b + " can never fire on " + f.witness.event.str() + ", so " + a + " subsumes it";
        } else {
            message = b + " is redundant: whenever it fires, " + a + " also fires and performs all of its actions";
        }
        out.push_back(Diagnostic{DiagnosticKind::Redundancy, Severity::Warning, {b, a}, std::move(f.witness),
                                 std::move(message)});
    }
    return out;
}

namespace {

bool cascade_aborts(const CapabilityRegistry& registry, std::span<const Rule> rules, const Assignment& assignment,
                    const CapabilityRef& event) {
    WorldState world = registry.initial_world();
    for (const auto& [key, value] : assignment) world.values[key] = value;
    const Timeline stimulus({{0, EventStimulus{event, nlohmann::json::object()}}});
    return run_simulation_from(registry, rules, stimulus, world).aborted();
}

/// First world, over every attribute some rule reads, from which `event`
/// cascades without end. nullopt when none does or there are too many.
std::optional<Assignment> find_aborting_world(const CapabilityRegistry& registry, std::span<const Rule> rules,
                                              const CapabilityRef& event) {
    std::vector<StatePredicate> reads;
    for (const auto& r : rules) reads.insert(reads.end(), r.while_part.begin(), r.while_part.end());
    std::optional<Assignment> found;
    try {
        enumerate(reads, registry, event_pins(event, registry), [&](const WorldState& world) {
            if (!cascade_aborts(registry, rules, world.values, event)) return true;
            found = world.values;
            return false;
        });
    } catch (const DomainTooLarge&) {
        return std::nullopt;
    }
    return found;
}

}  // namespace

std::vector<Diagnostic> detect_loops(std::span<const Rule> rules, const CapabilityRegistry& registry) {
    const auto sorted = by_id(rules);
    const std::size_t n = sorted.size();

    // Edge u -> v labelled with the event u emits that v waits for.
    std::vector<std::vector<std::pair<std::size_t, CapabilityRef>>> edges(n);
    for (std::size_t u = 0; u < n; ++u) {
        std::vector<CapabilityRef> emitted;
        for (const auto& action : sorted[u]->do_part) {
            if (const Capability* c = registry.find_capability(action)) {
                for (const auto& e : c->emits) {
                    if (std::find(emitted.begin(), emitted.end(), e) == emitted.end()) emitted.push_back(e);
                }
            }
        }
        for (std::size_t v = 0; v < n; ++v) {
            auto it = std::find(emitted.begin(), emitted.end(), sorted[v]->when_part);
            if (it != emitted.end()) edges[u].emplace_back(v, *it);
        }
    }

    // Elementary cycles, each reported once from its lowest rule.
    std::vector<std::vector<std::size_t>> cycles;
    std::vector<std::size_t> path;
    std::vector<bool> on_path(n, false);
    auto dfs = [&](auto&& self, std::size_t start, std::size_t v) -> void {
        path.push_back(v);
        on_path[v] = true;
        for (const auto& [w, event] : edges[v]) {
            if (w == start) {
                cycles.push_back(path);
            } else if (w > start && !on_path[w]) {
                self(self, start, w);
            }
        }
        on_path[v] = false;
        path.pop_back();
    };
    for (std::size_t s = 0; s < n; ++s) dfs(dfs, s, s);

    auto label = [&](std::size_t u, std::size_t v) {
        for (const auto& [w, event] : edges[u]) {
            if (w == v) return event;
        }
        return CapabilityRef{};
    };

    std::vector<Diagnostic> out;
    for (const auto& cycle : cycles) {
        LoopWitness witness;
        std::set<AttributeKey> written;
        bool blocked = false;
        for (std::size_t k = 0; k < cycle.size(); ++k) {
            const Rule& from = *sorted[cycle[k]];
            const Rule& to = *sorted[cycle[(k + 1) % cycle.size()]];
            const CapabilityRef event = label(cycle[k], cycle[(k + 1) % cycle.size()]);
            witness.cycle.push_back(from.id);
            witness.events.push_back(event);

            // State when `to` is evaluated: everything `from` did, then the
            // emitted event's own effects.
            Pins pins;
            for (const auto& action : from.do_part) {
                for (const auto& e : registry.find_capability(action)->effects) pins[e.key()] = e.value;
            }
            for (const auto& [key, value] : event_pins(event, registry)) pins[key] = value;
            for (const auto& [key, value] : pins) written.insert(key);
            if (!find_assignment(to.while_part, registry, pins)) blocked = true;
        }

        const Rule& entry = *sorted[cycle.front()];
        if (!blocked) {
            // Entry rule's WHILE, plus the other rules' conditions on
            // attributes the cycle never writes.
            std::vector<StatePredicate> wanted = entry.while_part;
            for (std::size_t k = 1; k < cycle.size(); ++k) {
                for (const auto& p : sorted[cycle[k]]->while_part) {
                    if (!written.count(p.key())) wanted.push_back(p);
                }
            }
            const Pins entry_pins = event_pins(entry.when_part, registry);
            witness.world = find_assignment(wanted, registry, entry_pins);
            if (!witness.world) witness.world = find_assignment(entry.while_part, registry, entry_pins);
        }
        // Other rules on the same events can break or complete the cycle;
        // the engine decides.
        const CapabilityRef entry_event = witness.events.back();
        if (witness.world && !cascade_aborts(registry, rules, *witness.world, entry_event)) witness.world.reset();
        if (!witness.world) witness.world = find_aborting_world(registry, rules, entry_event);
        blocked = !witness.world.has_value();

        std::string path_text;
        for (const auto& id : witness.cycle) path_text += id + " -> ";
        path_text += witness.cycle.front();
        std::string message = blocked ? "trigger cycle " + path_text + " is blocked by its WHILE conditions"
                                      : "rules re-trigger each other without end: " + path_text;
        Diagnostic d{DiagnosticKind::Loop, blocked ? Severity::Warning : Severity::Error, witness.cycle,
                     std::move(witness), std::move(message)};
        out.push_back(std::move(d));
    }
    return out;
}

std::vector<Diagnostic> analyze(std::span<const Rule> rules, const CapabilityRegistry& registry) {
    require_valid(rules, registry);
    std::vector<Diagnostic> out = detect_contradictions(rules, registry);
    for (auto& d : detect_loops(rules, registry)) out.push_back(std::move(d));
    for (auto& d : detect_redundancy(rules, registry)) out.push_back(std::move(d));
    return out;
}

}  // namespace sensation
