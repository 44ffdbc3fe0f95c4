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

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "sensation/capability.hpp"
#include "sensation/diagnostic.hpp"
#include "sensation/engine.hpp"
#include "sensation/rule.hpp"

namespace sensation {

/// A reference task bundled with probe timelines and the traces its
/// reference rules produce on them.
struct Scenario {
    std::string id;
    std::string note;
    CapabilityRegistry registry;
    ReferenceTask task;
    std::vector<Timeline> probes;
    std::vector<std::vector<TraceEntry>> expected;
};

/// An action executed at a timestamp; the unit trace diffs compare.
struct Firing {
    std::int64_t timestamp;
    ActionRef action;

    friend auto operator<=>(const Firing&, const Firing&) = default;
    friend bool operator==(const Firing&, const Firing&) = default;
};

struct TraceDiff {
    std::vector<Firing> missing;
    std::vector<Firing> extra;

    bool empty() const noexcept { return missing.empty() && extra.empty(); }
};

/// Multiset difference of the firings in two traces.
TraceDiff diff_traces(std::span<const TraceEntry> expected, std::span<const TraceEntry> actual);

struct ProbeResult {
    EmissionTrace trace;
    TraceDiff diff;
};

struct ScenarioReport {
    GradeReport grade;
    std::vector<ProbeResult> probes;
    std::vector<Diagnostic> diagnostics;
};

/// Resolves a scenario's `registry` reference (a name or a path).
using RegistryResolver = std::function<CapabilityRegistry(const std::string& reference)>;

/// Built-in registry names first, then files relative to `base_dir`.
RegistryResolver default_registry_resolver(std::string base_dir = ".");

/// Parses a scenario document and checks that the reference rules validate,
/// grade S, and reproduce every expected trace (SelfConsistencyError
/// otherwise).
Scenario load_scenario(std::string_view source, const RegistryResolver& resolver = default_registry_resolver());

/// Runs every probe with `candidates`, diffs against the expected traces,
/// grades structurally and attaches analyzer findings.
ScenarioReport run_scenario(const Scenario& scenario, std::span<const Rule> candidates);

nlohmann::json scenario_report_to_json(const Scenario& scenario, const ScenarioReport& report);
nlohmann::json scenario_summary_to_json(const Scenario& scenario);

}  // namespace sensation
