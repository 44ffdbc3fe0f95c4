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
#include "sensation/rule.hpp"

#include <algorithm>
#include <cctype>

#include "json_util.hpp"

namespace sensation {

using detail::check_fields;
using detail::get_string;
using detail::indexed;
using detail::member;
using detail::require_array;
using detail::schema_error;
using nlohmann::json;

bool rule_id_less(std::string_view a, std::string_view b) {
    auto is_digit = [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; };
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a.size() && j < b.size()) {
        if (is_digit(a[i]) && is_digit(b[j])) {
            std::size_t ie = i;
            std::size_t je = j;
            while (ie < a.size() && is_digit(a[ie])) ++ie;
            while (je < b.size() && is_digit(b[je])) ++je;
            // Compare digit runs numerically without overflow: strip leading
            // zeros, then longer is larger.
            std::size_t is = i;
            std::size_t js = j;
            while (is + 1 < ie && a[is] == '0') ++is;
            while (js + 1 < je && b[js] == '0') ++js;
            auto da = a.substr(is, ie - is);
            auto db = b.substr(js, je - js);
            if (da.size() != db.size()) return da.size() < db.size();
            if (da != db) return da < db;
            if (ie - i != je - j) return ie - i < je - j;
            i = ie;
            j = je;
        } else {
            if (a[i] != b[j]) return a[i] < b[j];
            ++i;
            ++j;
        }
    }
    return a.size() - i < b.size() - j;
}

std::vector<Rule> sorted_by_id(std::vector<Rule> rules) {
    std::stable_sort(rules.begin(), rules.end(), [](const Rule& x, const Rule& y) { return rule_id_less(x.id, y.id); });
    return rules;
}

std::string_view to_string(RulePart part) {
    switch (part) {
        case RulePart::Do: return "DO";
        case RulePart::When: return "WHEN";
        case RulePart::While: return "WHILE";
    }
    return "?";
}

std::string_view to_string(ViolationKind kind) {
    switch (kind) {
        case ViolationKind::Unresolved: return "unresolved";
        case ViolationKind::KindMismatch: return "kind_mismatch";
        case ViolationKind::Incomparable: return "incomparable";
        case ViolationKind::OutOfDomain: return "out_of_domain";
    }
    return "?";
}

namespace {

std::string describe(const ValidationReport& report) {
    if (report.ok()) return "rule is valid";
    const Violation& v = report.violations.front();
    std::string text = std::string(to_string(v.part)) + "[" + std::to_string(v.index) + "] " +
                       std::string(to_string(v.kind)) + ": " + v.message;
    if (report.violations.size() > 1) text += " (+" + std::to_string(report.violations.size() - 1) + " more)";
    return text;
}

void check_ref(const CapabilityRef& ref, CapabilityKind expected, RulePart part, std::size_t index,
               const CapabilityRegistry& registry, std::vector<Violation>& out) {
    if (registry.find_device(ref.device) == nullptr) {
        out.push_back({part, index, ViolationKind::Unresolved, "unknown device '" + ref.device + "'"});
        return;
    }
    const Capability* c = registry.find_capability(ref);
    if (c == nullptr) {
        out.push_back({part, index, ViolationKind::Unresolved, "unknown capability '" + ref.str() + "'"});
        return;
    }
    if (c->kind != expected) {
        out.push_back({part, index, ViolationKind::KindMismatch,
                       "'" + ref.str() + "' is " + std::string(to_string(c->kind)) + ", " + std::string(to_string(part)) +
                           " needs " + std::string(to_string(expected))});
    }
}

}  // namespace

ValidationError::ValidationError(std::string rule_id, ValidationReport report)
    : Error("rule '" + rule_id + "': " + describe(report)), rule_id_(std::move(rule_id)), report_(std::move(report)) {}

ValidationReport validate_rule(const Rule& rule, const CapabilityRegistry& registry) {
    ValidationReport report;
    auto& out = report.violations;
    for (std::size_t i = 0; i < rule.do_part.size(); ++i) {
        check_ref(rule.do_part[i], CapabilityKind::Action, RulePart::Do, i, registry, out);
    }
    check_ref(rule.when_part, CapabilityKind::Event, RulePart::When, 0, registry, out);

    for (std::size_t i = 0; i < rule.while_part.size(); ++i) {
        const StatePredicate& p = rule.while_part[i];
        const std::string name = p.key().str();
        if (registry.find_device(p.device) == nullptr) {
            out.push_back({RulePart::While, i, ViolationKind::Unresolved, "unknown device '" + p.device + "'"});
            continue;
        }
        const Capability* c = registry.find_capability(p.device, p.attribute);
        if (c == nullptr) {
            out.push_back({RulePart::While, i, ViolationKind::Unresolved, "unknown state '" + name + "'"});
            continue;
        }
        if (c->kind != CapabilityKind::State) {
            out.push_back({RulePart::While, i, ViolationKind::KindMismatch,
                           "'" + name + "' is " + std::string(to_string(c->kind)) + ", WHILE needs state"});
            continue;
        }
        const Attribute* a = registry.find_attribute(p.key());
        if (is_ordering(p.comparator) && !a->domain.ordered()) {
            out.push_back({RulePart::While, i, ViolationKind::Incomparable,
                           "comparator '" + std::string(to_string(p.comparator)) + "' is not defined on " +
                               std::string(to_string(a->domain.kind())) + " '" + name + "'"});
        }
        if (!a->domain.contains(p.literal)) {
            out.push_back({RulePart::While, i, ViolationKind::OutOfDomain,
                           "literal " + to_string(p.literal) + " is outside the domain of '" + name + "'"});
        }
    }
    return report;
}

void require_valid(std::span<const Rule> rules, const CapabilityRegistry& registry) {
    for (const auto& rule : rules) {
        ValidationReport report = validate_rule(rule, registry);
        if (!report.ok()) throw ValidationError(rule.id, std::move(report));
    }
}

Rule canonicalize(const Rule& rule) {
    Rule out = rule;
    std::sort(out.while_part.begin(), out.while_part.end());
    out.while_part.erase(std::unique(out.while_part.begin(), out.while_part.end()), out.while_part.end());
    return out;
}

// ---------------------------------------------------------------------------
// AST serialization

namespace {

json ref_to_json(const CapabilityRef& ref) { return json{{"device", ref.device}, {"capability", ref.capability}}; }

CapabilityRef ref_from(const json& j, const std::string& path) {
    check_fields(j, path, {"device", "capability"});
    return {get_string(j, path, "device"), get_string(j, path, "capability")};
}

}  // namespace

json rule_to_json(const Rule& rule) {
    json actions = json::array();
    for (const auto& a : rule.do_part) actions.push_back(ref_to_json(a));
    json predicates = json::array();
    for (const auto& p : rule.while_part) {
        predicates.push_back({{"device", p.device},
                              {"attribute", p.attribute},
                              {"cmp", to_string(p.comparator)},
                              {"value", value_to_json(p.literal)}});
    }
    return json{{"id", rule.id}, {"do", actions}, {"when", ref_to_json(rule.when_part)}, {"while", predicates}};
}

Rule rule_from_json(const json& j) {
    check_fields(j, "$", {"id", "do", "when", "while"});
    Rule rule;
    if (j.contains("id")) rule.id = get_string(j, "$", "id");
    const json& actions = require_array(member(j, "$", "do"), "$.do");
    if (actions.empty()) schema_error("$.do", "a rule needs at least one action");
    for (std::size_t i = 0; i < actions.size(); ++i) rule.do_part.push_back(ref_from(actions[i], indexed("$.do", i)));
    rule.when_part = ref_from(member(j, "$", "when"), "$.when");
    if (auto it = j.find("while"); it != j.end()) {
        require_array(*it, "$.while");
        for (std::size_t i = 0; i < it->size(); ++i) {
            const std::string path = indexed("$.while", i);
            const json& p = (*it)[i];
            check_fields(p, path, {"device", "attribute", "cmp", "value"});
            auto cmp = comparator_from_string(get_string(p, path, "cmp"));
            if (!cmp) schema_error(path + ".cmp", "unknown comparator");
            Value literal;
            try {
                literal = value_from_json(member(p, path, "value"));
            } catch (const SyntaxError& e) {
                schema_error(path + ".value", e.what());
            }
            rule.while_part.push_back({get_string(p, path, "device"), get_string(p, path, "attribute"), *cmp, literal});
        }
    }
    return rule;
}

json violation_to_json(const Violation& v) {
    return json{{"part", to_string(v.part)}, {"index", v.index}, {"kind", to_string(v.kind)}, {"message", v.message}};
}

}  // namespace sensation
