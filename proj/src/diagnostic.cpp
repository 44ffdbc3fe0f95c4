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
#include "sensation/diagnostic.hpp"

namespace sensation {

using nlohmann::json;

std::string_view to_string(DiagnosticKind kind) {
    switch (kind) {
        case DiagnosticKind::Contradiction: return "Contradiction";
        case DiagnosticKind::Loop: return "Loop";
        case DiagnosticKind::Redundancy: return "Redundancy";
        case DiagnosticKind::FlippedTrigger: return "FlippedTrigger";
        case DiagnosticKind::TimeWindowFallacy: return "TimeWindowFallacy";
    }
    return "?";
}

std::string_view to_string(Severity severity) { return severity == Severity::Error ? "error" : "warning"; }

json assignment_to_json(const Assignment& assignment) {
    json out = json::object();
    for (const auto& [key, value] : assignment) out[key.str()] = value_to_json(value);
    return out;
}

namespace {

json refs_to_json(const std::vector<CapabilityRef>& refs) {
    json out = json::array();
    for (const auto& r : refs) out.push_back(r.str());
    return out;
}

std::string summarize(const Assignment& assignment) {
    std::string out = "{";
    bool first = true;
    for (const auto& [key, value] : assignment) {
        if (!first) out += ", ";
        first = false;
        out += key.str() + "=" + to_string(value);
    }
    return out + "}";
}

struct WitnessJson {
    json operator()(const ContradictionWitness& w) const {
        json conflicts = json::array();
        for (const auto& c : w.conflicts) {
            conflicts.push_back({{"attribute", c.attribute.str()},
                                 {"first", {{"action", c.first_action.str()}, {"value", value_to_json(c.first_value)}}},
                                 {"second", {{"action", c.second_action.str()}, {"value", value_to_json(c.second_value)}}}});
        }
        return json{{"event", w.event.str()}, {"world", assignment_to_json(w.world)}, {"conflicts", conflicts}};
    }
    json operator()(const LoopWitness& w) const {
        json out{{"cycle", w.cycle}, {"events", refs_to_json(w.events)}};
        out["world"] = w.world ? assignment_to_json(*w.world) : json(nullptr);
        return out;
    }
    json operator()(const RedundancyWitness& w) const {
        json out{{"redundant", w.redundant},
                 {"subsumed_by", w.subsumer},
                 {"event", w.event.str()},
                 {"action_mapping", w.action_mapping},
                 {"enumerated", w.enumerated}};
        out["world"] = w.world ? assignment_to_json(*w.world) : json(nullptr);
        return out;
    }
    json operator()(const TriggerWitness& w) const { return json{{"triggers", refs_to_json(w.triggers)}}; }
};

struct WitnessSummary {
    std::string operator()(const ContradictionWitness& w) const {
        std::string out = "on " + w.event.str() + " in " + summarize(w.world);
        for (const auto& c : w.conflicts) {
            out += "; " + c.first_action.str() + " sets " + c.attribute.str() + "=" + to_string(c.first_value) + ", " +
                   c.second_action.str() + " sets " + to_string(c.second_value);
        }
        return out;
    }
    std::string operator()(const LoopWitness& w) const {
        std::string out;
        for (std::size_t i = 0; i < w.cycle.size(); ++i) {
            out += w.cycle[i] + " -(" + w.events[i].str() + ")-> ";
        }
        out += w.cycle.empty() ? "" : w.cycle.front();
        if (w.world) out += " in " + summarize(*w.world);
        return out;
    }
    std::string operator()(const RedundancyWitness& w) const {
        std::string out = w.redundant + " subsumed by " + w.subsumer + " on " + w.event.str();
        if (w.world) out += " e.g. in " + summarize(*w.world);
        return out;
    }
    std::string operator()(const TriggerWitness& w) const {
        std::string out = "triggers";
        for (const auto& t : w.triggers) out += " " + t.str();
        return out;
    }
};

}  // namespace

json diagnostic_to_json(const Diagnostic& d) {
    return json{{"kind", to_string(d.kind)},
                {"severity", to_string(d.severity)},
                {"rules", d.rules},
                {"witness", std::visit(WitnessJson{}, d.witness)},
                {"message", d.message}};
}

json diagnostics_to_json(const std::vector<Diagnostic>& diagnostics) {
    json out = json::array();
    for (const auto& d : diagnostics) out.push_back(diagnostic_to_json(d));
    return out;
}

std::string render_diagnostic(const Diagnostic& d) {
    std::string rules;
    for (std::size_t i = 0; i < d.rules.size(); ++i) rules += (i ? ", " : "") + d.rules[i];
    return std::string(to_string(d.severity)) + " " + std::string(to_string(d.kind)) + " [" + rules +
           "]: " + d.message + " -- " + std::visit(WitnessSummary{}, d.witness);
}

}  // namespace sensation
