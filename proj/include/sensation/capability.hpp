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

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

namespace sensation {

/// A typed attribute value: boolean, integer, or a symbol (enumeration member
/// or place name).
using Value = std::variant<bool, std::int64_t, std::string>;

std::string to_string(const Value& value);
nlohmann::json value_to_json(const Value& value);
Value value_from_json(const nlohmann::json& j);

enum class DomainKind { Boolean, Enumeration, BoundedInteger, Place };

std::string_view to_string(DomainKind kind);

/// Largest bounded-integer domain accepted; keeps every domain enumerable.
inline constexpr std::int64_t kMaxIntegerDomain = 1024;

class AttributeDomain {
public:
    static AttributeDomain boolean();
    static AttributeDomain enumeration(std::vector<std::string> symbols);
    static AttributeDomain place(std::vector<std::string> locations);
    static AttributeDomain bounded_integer(std::int64_t lo, std::int64_t hi);

    DomainKind kind() const noexcept { return kind_; }
    const std::vector<std::string>& symbols() const noexcept { return symbols_; }
    std::int64_t lo() const noexcept { return lo_; }
    std::int64_t hi() const noexcept { return hi_; }

    bool contains(const Value& value) const;
    /// Number of values; domains are always finite.
    std::size_t size() const noexcept;
    /// The i-th value in canonical enumeration order (false < true, lo..hi,
    /// declaration order for symbols).
    Value at(std::size_t index) const;
    /// Ordering comparators are legal only on bounded integers.
    bool ordered() const noexcept { return kind_ == DomainKind::BoundedInteger; }

    friend bool operator==(const AttributeDomain&, const AttributeDomain&) = default;

private:
    DomainKind kind_ = DomainKind::Boolean;
    std::vector<std::string> symbols_;
    std::int64_t lo_ = 0;
    std::int64_t hi_ = 0;
};

struct Attribute {
    std::string id;
    AttributeDomain domain;
    Value initial;

    friend bool operator==(const Attribute&, const Attribute&) = default;
};

/// Identifies one attribute of one device.
struct AttributeKey {
    std::string device;
    std::string attribute;

    std::string str() const { return device + "." + attribute; }

    friend auto operator<=>(const AttributeKey&, const AttributeKey&) = default;
    friend bool operator==(const AttributeKey&, const AttributeKey&) = default;
};

struct StateEffect {
    std::string device;
    std::string attribute;
    Value value;

    AttributeKey key() const { return {device, attribute}; }

    friend bool operator==(const StateEffect&, const StateEffect&) = default;
};

/// Reference to a capability, `device.capability`.
struct CapabilityRef {
    std::string device;
    std::string capability;

    std::string str() const { return device + "." + capability; }

    friend auto operator<=>(const CapabilityRef&, const CapabilityRef&) = default;
    friend bool operator==(const CapabilityRef&, const CapabilityRef&) = default;
};

enum class CapabilityKind { Event, State, Action };

std::string_view to_string(CapabilityKind kind);

struct Capability {
    std::string id;
    std::string device;
    CapabilityKind kind = CapabilityKind::Event;
    std::vector<StateEffect> effects;
    std::vector<CapabilityRef> emits;

    CapabilityRef ref() const { return {device, id}; }

    friend bool operator==(const Capability&, const Capability&) = default;
};

struct Device {
    std::string id;
    std::string label;
    std::vector<Attribute> attributes;
    std::vector<Capability> capabilities;

    const Attribute* find_attribute(std::string_view attribute) const;
    const Capability* find_capability(std::string_view capability) const;

    friend bool operator==(const Device&, const Device&) = default;
};

enum class Comparator { Eq, Ne, Lt, Gt, Le, Ge };

std::string_view to_string(Comparator cmp);
std::optional<Comparator> comparator_from_string(std::string_view text);
bool is_ordering(Comparator cmp);

struct StatePredicate {
    std::string device;
    std::string attribute;
    Comparator comparator = Comparator::Eq;
    Value literal;

    AttributeKey key() const { return {device, attribute}; }

    friend auto operator<=>(const StatePredicate&, const StatePredicate&) = default;
    friend bool operator==(const StatePredicate&, const StatePredicate&) = default;
};

/// Snapshot of every declared attribute at one instant.
struct WorldState {
    std::map<AttributeKey, Value> values;
    std::int64_t clock = 0;

    /// Throws ReferenceError when the attribute is not part of the snapshot.
    const Value& at(const AttributeKey& key) const;

    friend bool operator==(const WorldState&, const WorldState&) = default;
};

nlohmann::json world_to_json(const WorldState& world);

enum class Slot { Do, When, While };

std::string_view to_string(Slot slot);
std::optional<Slot> slot_from_string(std::string_view text);
CapabilityKind kind_for_slot(Slot slot);

/// Immutable set of devices. Construction checks every invariant: unique
/// ids, resolvable effect/emit targets, in-domain values.
class CapabilityRegistry {
public:
    CapabilityRegistry() = default;
    CapabilityRegistry(std::string version, std::vector<Device> devices);

    const std::string& version() const noexcept { return version_; }
    const std::vector<Device>& devices() const noexcept { return devices_; }

    const Device* find_device(std::string_view device) const;
    const Capability* find_capability(std::string_view device, std::string_view capability) const;
    const Capability* find_capability(const CapabilityRef& ref) const {
        return find_capability(ref.device, ref.capability);
    }
    const Attribute* find_attribute(std::string_view device, std::string_view attribute) const;
    const Attribute* find_attribute(const AttributeKey& key) const {
        return find_attribute(key.device, key.attribute);
    }

    /// Every capability in registry order.
    std::vector<const Capability*> capabilities() const;

    WorldState initial_world() const;

    friend bool operator==(const CapabilityRegistry& a, const CapabilityRegistry& b) {
        return a.version_ == b.version_ && a.devices_ == b.devices_;
    }

private:
    std::string version_;
    std::vector<Device> devices_;
};

CapabilityRegistry load_registry(std::string_view source);
CapabilityRegistry registry_from_json(const nlohmann::json& document);
nlohmann::json registry_to_json(const CapabilityRegistry& registry);
std::string serialize_registry(const CapabilityRegistry& registry);

/// Capabilities legal for a composer slot (DO→action, WHEN→event,
/// WHILE→state), optionally restricted to one device, in registry order.
std::vector<Capability> filter_capabilities(const CapabilityRegistry& registry, Slot slot,
                                            const std::optional<std::string>& device = std::nullopt);

/// Returns a copy of `world` with the effects applied in order. Effects are
/// checked against `registry` when one is supplied.
WorldState apply_effects(const WorldState& world, std::span<const StateEffect> effects,
                         const CapabilityRegistry* registry = nullptr);

bool eval_predicate(const WorldState& world, const StatePredicate& predicate);

/// Parses a JSON document, converting parse failures to SyntaxError with
/// line and column.
nlohmann::json parse_document(std::string_view source);

}  // namespace sensation
