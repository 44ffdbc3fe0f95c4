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
#include "sensation/fixtures.hpp"

#include <array>
#include <utility>

#include "sensation/error.hpp"

namespace sensation::fixtures {

namespace data {
extern const std::string_view kRegistry;
extern const std::string_view kT1;
extern const std::string_view kT2;
extern const std::string_view kT3;
extern const std::string_view kT4;
extern const std::string_view kCandidates;
}  // namespace data

namespace {

const std::array<std::pair<std::string_view, const std::string_view*>, 4> kScenarios{{
    {"T1", &data::kT1},
    {"T2", &data::kT2},
    {"T3", &data::kT3},
    {"T4", &data::kT4},
}};

}  // namespace

std::string_view registry_source() { return data::kRegistry; }

const CapabilityRegistry& smart_home() {
    static const CapabilityRegistry registry = load_registry(data::kRegistry);
    return registry;
}

std::vector<std::string> scenario_ids() {
    std::vector<std::string> out;
    for (const auto& [id, source] : kScenarios) out.emplace_back(id);
    return out;
}

std::optional<std::string_view> scenario_source(std::string_view id) {
    for (const auto& [name, source] : kScenarios) {
        if (name == id) return *source;
    }
    return std::nullopt;
}

Scenario load_builtin_scenario(std::string_view id) {
    auto source = scenario_source(id);
    if (!source) throw NotFound("unknown scenario '" + std::string(id) + "'");
    return load_scenario(*source);
}

std::string_view candidate_table_source() { return data::kCandidates; }

}  // namespace sensation::fixtures
