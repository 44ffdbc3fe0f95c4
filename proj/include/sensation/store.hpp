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

// File-backed rule store. One JSON document (rules.json) holds the revision,
// the next id counter and the rules; every mutation rewrites it through a
// temporary file and rename(2).

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "sensation/capability.hpp"
#include "sensation/rule.hpp"

namespace sensation {

struct StoreSnapshot {
    std::uint64_t revision = 0;
    std::uint64_t next_id = 1;
    /// Sorted by id.
    std::vector<Rule> rules;

    friend bool operator==(const StoreSnapshot&, const StoreSnapshot&) = default;
};

nlohmann::json store_to_json(const StoreSnapshot& snapshot);
StoreSnapshot store_from_json(const nlohmann::json& j);

struct AddRule {
    Rule rule;
};
struct ReplaceRule {
    std::string id;
    Rule rule;
};
struct DeleteRule {
    std::string id;
};
using Mutation = std::variant<AddRule, ReplaceRule, DeleteRule>;

struct MutationResult {
    std::uint64_t revision;
    std::string id;
    /// The stored rule; empty for deletions.
    std::optional<Rule> rule;
};

/// Points in a write where the fault hook runs. Throwing from the hook
/// aborts the write at that point.
enum class WriteStage { TempOpened, TempWritten, TempSynced, Renamed };
std::string_view to_string(WriteStage stage);

class RuleStore {
public:
    using FaultHook = std::function<void(WriteStage)>;

    /// Opens (or creates) `data_dir/rules.json`. Stored rules are
    /// re-validated against `registry`; a leftover temporary file is removed.
    RuleStore(std::filesystem::path data_dir, const CapabilityRegistry& registry);

    RuleStore(const RuleStore&) = delete;
    RuleStore& operator=(const RuleStore&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }

    StoreSnapshot snapshot() const;
    std::uint64_t revision() const;
    /// Throws NotFound.
    Rule get(const std::string& id) const;

    /// Validates, canonicalizes and commits. The id of an added rule is
    /// assigned here (`r<N>`, never reused). When `expected_revision` is
    /// set and differs from the current revision, throws StaleRevision.
    /// Errors leave both memory and disk unchanged.
    MutationResult apply(const Mutation& mutation, std::optional<std::uint64_t> expected_revision = std::nullopt);

    MutationResult add(Rule rule, std::optional<std::uint64_t> expected_revision = std::nullopt);
    MutationResult replace(const std::string& id, Rule rule,
                           std::optional<std::uint64_t> expected_revision = std::nullopt);
    MutationResult remove(const std::string& id, std::optional<std::uint64_t> expected_revision = std::nullopt);

    void set_fault_hook(FaultHook hook);

private:
    void persist(const StoreSnapshot& next);

    std::filesystem::path dir_;
    std::filesystem::path path_;
    const CapabilityRegistry& registry_;
    mutable std::shared_mutex mutex_;
    StoreSnapshot state_;
    FaultHook fault_;
};

}  // namespace sensation
