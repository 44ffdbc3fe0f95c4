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
#include "sensation/scenario.hpp"

#include <algorithm>
#include <filesystem>

#include "json_util.hpp"
#include "sensation/analyzer.hpp"
#include "sensation/dsl.hpp"
#include "sensation/fixtures.hpp"
#include "sensation/io.hpp"

namespace sensation {

using detail::check_fields;
using detail::get_string;
using detail::indexed;
using detail::member;
using detail::require_array;
using detail::schema_error;
using nlohmann::json;

namespace {

std::vector<Firing> firings(std::span<const TraceEntry> entries) {
    std::vector<Firing> out;
    for (const auto& e : entries) {
        if (const auto* f = std::get_if<FireEntry>(&e)) {
            for (const auto& a : f->actions) out.push_back({f->timestamp, a});
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

json firings_to_json(const std::vector<Firing>& firings) {
    json out = json::array();
    for (const auto& f : firings) out.push_back({{"t", f.timestamp}, {"action", f.action.str()}});
    return out;
}

}  // namespace

TraceDiff diff_traces(std::span<const TraceEntry> expected, std::span<const TraceEntry> actual) {
    const auto want = firings(expected);
    const auto got = firings(actual);
    TraceDiff diff;
    std::set_difference(want.begin(), want.end(), got.begin(), got.end(), std::back_inserter(diff.missing));
    std::set_difference(got.begin(), got.end(), want.begin(), want.end(), std::back_inserter(diff.extra));
    return diff;
}

RegistryResolver default_registry_resolver(std::string base_dir) {
    return [base = std::move(base_dir)](const std::string& reference) {
        if (reference == fixtures::kSmartHomeRegistry) return fixtures::smart_home();
        std::filesystem::path path(reference);
        if (path.is_relative()) path = std::filesystem::path(base) / path;
        return load_registry(read_text_file(path.string()));
    };
}

Scenario load_scenario(std::string_view source, const RegistryResolver& resolver) {
    const json doc = parse_document(source);
    check_fields(doc, "$", {"id", "note", "registry", "task", "probes", "expected"});

    Scenario s;
    s.id = get_string(doc, "$", "id");
    if (doc.contains("note")) s.note = get_string(doc, "$", "note");

    const json& registry = member(doc, "$", "registry");
    if (registry.is_string()) {
        s.registry = resolver(registry.get<std::string>());
    } else {
        s.registry = registry_from_json(registry);
    }

    const json& task = member(doc, "$", "task");
    check_fields(task, "$.task", {"description", "reference_rules", "ordered_do"});
    s.task.id = s.id;
    if (task.contains("description")) s.task.description = get_string(task, "$.task", "description");
    const json& refs = require_array(member(task, "$.task", "reference_rules"), "$.task.reference_rules");
    for (std::size_t i = 0; i < refs.size(); ++i) {
        if (!refs[i].is_string()) schema_error(indexed("$.task.reference_rules", i), "expected DSL text");
        Rule rule = parse_rule(refs[i].get<std::string>()).rule;
        rule.id = "r" + std::to_string(i + 1);
        s.task.reference_rules.push_back(std::move(rule));
    }
    s.task.ordered_do.assign(refs.size(), false);
    if (auto it = task.find("ordered_do"); it != task.end()) {
        if (it->is_boolean()) {
            s.task.ordered_do.assign(refs.size(), it->get<bool>());
        } else {
            require_array(*it, "$.task.ordered_do");
            if (it->size() != refs.size()) schema_error("$.task.ordered_do", "needs one flag per reference rule");
            for (std::size_t i = 0; i < it->size(); ++i) {
                if (!(*it)[i].is_boolean()) schema_error(indexed("$.task.ordered_do", i), "expected a boolean");
                s.task.ordered_do[i] = (*it)[i].get<bool>();
            }
        }
    }

    const json& probes = require_array(member(doc, "$", "probes"), "$.probes");
    const json& expected = require_array(member(doc, "$", "expected"), "$.expected");
    if (probes.size() != expected.size()) schema_error("$.expected", "needs one trace per probe");
    for (std::size_t i = 0; i < probes.size(); ++i) {
        try {
            s.probes.push_back(timeline_from_json(probes[i]));
            s.expected.push_back(trace_entries_from_json(expected[i]));
        } catch (const SyntaxError& e) {
            schema_error(indexed("$.probes", i), e.what());
        }
    }

    // Self-consistency: the fixture must agree with the engine and grader.
    try {
        require_valid(s.task.reference_rules, s.registry);
        for (const auto& probe : s.probes) check_timeline(probe, s.registry);
    } catch (const Error& e) {
        throw SelfConsistencyError("scenario '" + s.id + "': " + e.what());
    }
    if (grade(s.task.reference_rules, s.task, s.registry).grade.label != Grade::S) {
        throw SelfConsistencyError("scenario '" + s.id + "': reference rules do not grade S against themselves");
    }
    for (std::size_t i = 0; i < s.probes.size(); ++i) {
        const EmissionTrace trace = run_simulation(s.registry, s.task.reference_rules, s.probes[i]);
        if (trace.entries != s.expected[i]) {
            throw SelfConsistencyError("scenario '" + s.id + "': probe " + std::to_string(i) +
                                       " expected " + trace_entries_to_json(s.expected[i]).dump() + " but the engine produced " +
                                       trace_entries_to_json(trace.entries).dump());
        }
    }
    return s;
}

ScenarioReport run_scenario(const Scenario& scenario, std::span<const Rule> candidates) {
    require_valid(candidates, scenario.registry);
    ScenarioReport report;
    report.grade = grade(candidates, scenario.task, scenario.registry);
    for (std::size_t i = 0; i < scenario.probes.size(); ++i) {
        ProbeResult probe;
        probe.trace = run_simulation(scenario.registry, candidates, scenario.probes[i]);
        probe.diff = diff_traces(scenario.expected[i], probe.trace.entries);
        report.probes.push_back(std::move(probe));
    }
    report.diagnostics = analyze(candidates, scenario.registry);
    return report;
}

json scenario_report_to_json(const Scenario& scenario, const ScenarioReport& report) {
    json probes = json::array();
    for (const auto& p : report.probes) {
        probes.push_back({{"trace", trace_to_json(p.trace)},
                          {"diff", {{"missing", firings_to_json(p.diff.missing)}, {"extra", firings_to_json(p.diff.extra)}}}});
    }
    return json{{"scenario", scenario.id},
                {"grade", grade_report_to_json(report.grade)},
                {"probes", probes},
                {"diagnostics", diagnostics_to_json(report.diagnostics)}};
}

json scenario_summary_to_json(const Scenario& scenario) {
    json refs = json::array();
    for (const auto& r : scenario.task.reference_rules) refs.push_back(print_rule(r));
    return json{{"id", scenario.id},
                {"description", scenario.task.description},
                {"note", scenario.note},
                {"reference_rules", refs},
                {"probes", scenario.probes.size()}};
}

}  // namespace sensation
