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

// Fixtures compiled into the library: the smart-home-v1 registry, the four
// task scenarios T1-T4 and the curated grading table.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sensation/capability.hpp"
#include "sensation/scenario.hpp"

namespace sensation::fixtures {

inline constexpr std::string_view kSmartHomeRegistry = "smart-home-v1";

std::string_view registry_source();
const CapabilityRegistry& smart_home();

std::vector<std::string> scenario_ids();
std::optional<std::string_view> scenario_source(std::string_view id);

/// Loads a built-in scenario by id; throws NotFound.
Scenario load_builtin_scenario(std::string_view id);

/// Curated candidate table: `[{task, description, rules:[dsl], expected}]`.
std::string_view candidate_table_source();

}  // namespace sensation::fixtures
