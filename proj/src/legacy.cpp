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
#include "json_util.hpp"
#include "sensation/dsl.hpp"

namespace sensation {

using detail::check_fields;
using detail::get_string;
using detail::indexed;
using detail::member;
using detail::require_array;
using detail::schema_error;
using nlohmann::json;

std::string_view to_string(TriggerClass c) { return c == TriggerClass::Event ? "event" : "state"; }

std::vector<LegacyRule> load_legacy(std::string_view source) {
    const json document = parse_document(source);
    require_array(document, "$");
    std::vector<LegacyRule> out;
    for (std::size_t i = 0; i < document.size(); ++i) {
        const std::string path = indexed("$", i);
        const json& entry = document[i];
        check_fields(entry, path, {"triggers", "actions"});
        LegacyRule rule;
        rule.id = "r" + std::to_string(i + 1);

        const json& triggers = require_array(member(entry, path, "triggers"), path + ".triggers");
        if (triggers.empty()) schema_error(path + ".triggers", "a legacy rule needs at least one trigger");
        for (std::size_t t = 0; t < triggers.size(); ++t) {
            const std::string tpath = indexed(path + ".triggers", t);
            check_fields(triggers[t], tpath, {"device", "capability", "value"});
            LegacyTrigger trigger{get_string(triggers[t], tpath, "device"), get_string(triggers[t], tpath, "capability"),
                                  std::nullopt};
            if (auto it = triggers[t].find("value"); it != triggers[t].end()) {
                try {
                    trigger.value = value_from_json(*it);
                } catch (const SyntaxError& e) {
                    schema_error(tpath + ".value", e.what());
                }
            }
            rule.triggers.push_back(std::move(trigger));
        }

        const json& actions = require_array(member(entry, path, "actions"), path + ".actions");
        if (actions.empty()) schema_error(path + ".actions", "a legacy rule needs at least one action");
        for (std::size_t a = 0; a < actions.size(); ++a) {
            const std::string apath = indexed(path + ".actions", a);
            check_fields(actions[a], apath, {"device", "capability"});
            rule.actions.push_back({get_string(actions[a], apath, "device"), get_string(actions[a], apath, "capability")});
        }
        out.push_back(std::move(rule));
    }
    return out;
}

namespace {

const Capability& resolve(const CapabilityRef& ref, const CapabilityRegistry& registry) {
    const Capability* c = registry.find_capability(ref);
    if (c == nullptr) {
        throw ReferenceError(ReferenceError::Reason::Dangling, ref.str(), "unknown capability '" + ref.str() + "'");
    }
    return *c;
}

}  // namespace

ImportReport import_legacy(const LegacyRule& legacy, const CapabilityRegistry& registry) {
    ImportReport report;
    std::vector<CapabilityRef> events;
    std::vector<StatePredicate> states;
    std::vector<CapabilityRef> state_refs;

    for (const auto& trigger : legacy.triggers) {
        const Capability& c = resolve(trigger.ref(), registry);
        switch (c.kind) {
            case CapabilityKind::Event:
                if (trigger.value) {
                    throw DomainError("event trigger '" + trigger.ref().str() + "' cannot carry a value");
                }
                report.trigger_classification.push_back(TriggerClass::Event);
                events.push_back(trigger.ref());
                break;
            case CapabilityKind::State: {
                const Attribute& attribute = *registry.find_attribute(trigger.device, trigger.capability);
                Value value;
                if (trigger.value) {
                    value = *trigger.value;
                } else if (attribute.domain.kind() == DomainKind::Boolean) {
                    value = true;
                } else {
                    throw DomainError("state trigger '" + trigger.ref().str() + "' needs a value");
                }
                if (!attribute.domain.contains(value)) {
                    throw DomainError("value " + to_string(value) + " is outside the domain of '" +
                                      trigger.ref().str() + "'");
                }
                report.trigger_classification.push_back(TriggerClass::State);
                states.push_back({trigger.device, trigger.capability, Comparator::Eq, value});
                state_refs.push_back(trigger.ref());
                break;
            }
            case CapabilityKind::Action:
                throw ReferenceError(ReferenceError::Reason::KindMismatch, trigger.ref().str(),
                                     "trigger '" + trigger.ref().str() + "' is an action, not an event or state");
        }
    }
    for (const auto& action : legacy.actions) {
        if (resolve(action, registry).kind != CapabilityKind::Action) {
            throw ReferenceError(ReferenceError::Reason::KindMismatch, action.str(),
                                 "'" + action.str() + "' is not an action");
        }
    }

    if (events.empty()) {
        report.diagnostics.push_back(Diagnostic{
            DiagnosticKind::FlippedTrigger, Severity::Error, {legacy.id}, TriggerWitness{state_refs},
            "no trigger is an event: a rule built only from states has no instant at which to fire"});
    } else if (events.size() > 1) {
        report.diagnostics.push_back(Diagnostic{
            DiagnosticKind::TimeWindowFallacy, Severity::Error, {legacy.id}, TriggerWitness{events},
            std::to_string(events.size()) + " event triggers: instantaneous events never co-occur, so the rule cannot fire"});
    } else {
        report.converted = Rule{legacy.id, legacy.actions, events.front(), std::move(states)};
    }
    return report;
}

json import_report_to_json(const ImportReport& report) {
    json classification = json::array();
    for (auto c : report.trigger_classification) classification.push_back(to_string(c));
    json out{{"classification", classification}, {"diagnostics", diagnostics_to_json(report.diagnostics)}};
    out["converted"] = report.converted ? rule_to_json(*report.converted) : json(nullptr);
    if (report.converted) out["dsl"] = print_rule(*report.converted);
    return out;
}

}  // namespace sensation
