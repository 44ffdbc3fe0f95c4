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
#include "sensation/capability.hpp"

#include <algorithm>
#include <set>

#include "json_util.hpp"
#include "sensation/error.hpp"

namespace sensation {

using detail::check_fields;
using detail::get_string;
using detail::indexed;
using detail::member;
using detail::require_array;
using detail::require_object;
using detail::schema_error;
using nlohmann::json;

std::string to_string(const Value& value) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, bool>) {
                return v ? "true" : "false";
            } else if constexpr (std::is_same_v<T, std::int64_t>) {
                return std::to_string(v);
            } else {
                return v;
            }
        },
        value);
}

json value_to_json(const Value& value) {
    return std::visit([](const auto& v) { return json(v); }, value);
}

Value value_from_json(const json& j) {
    if (j.is_boolean()) return j.get<bool>();
    if (j.is_number_integer()) return j.get<std::int64_t>();
    if (j.is_string()) return j.get<std::string>();
    throw SyntaxError("value must be a boolean, integer or string, got " + j.dump());
}

std::string_view to_string(DomainKind kind) {
    switch (kind) {
        case DomainKind::Boolean: return "boolean";
        case DomainKind::Enumeration: return "enumeration";
        case DomainKind::BoundedInteger: return "bounded-integer";
        case DomainKind::Place: return "place";
    }
    return "?";
}

namespace {

void check_symbols(const std::vector<std::string>& symbols, std::string_view what) {
    if (symbols.empty()) throw DomainError(std::string(what) + " domain must list at least one value");
    std::set<std::string> seen;
    for (const auto& s : symbols) {
        if (!seen.insert(s).second) throw DomainError(std::string(what) + " domain repeats value '" + s + "'");
    }
}

}  // namespace

AttributeDomain AttributeDomain::boolean() { return AttributeDomain{}; }

AttributeDomain AttributeDomain::enumeration(std::vector<std::string> symbols) {
    check_symbols(symbols, "enumeration");
    AttributeDomain d;
    d.kind_ = DomainKind::Enumeration;
    d.symbols_ = std::move(symbols);
    return d;
}

AttributeDomain AttributeDomain::place(std::vector<std::string> locations) {
    check_symbols(locations, "place");
    AttributeDomain d;
    d.kind_ = DomainKind::Place;
    d.symbols_ = std::move(locations);
    return d;
}

AttributeDomain AttributeDomain::bounded_integer(std::int64_t lo, std::int64_t hi) {
    if (lo > hi) throw DomainError("bounded-integer domain has lo > hi");
    if (hi - lo + 1 > kMaxIntegerDomain) {
        throw DomainError("bounded-integer domain exceeds " + std::to_string(kMaxIntegerDomain) + " values");
    }
    AttributeDomain d;
    d.kind_ = DomainKind::BoundedInteger;
    d.lo_ = lo;
    d.hi_ = hi;
    return d;
}

bool AttributeDomain::contains(const Value& value) const {
    switch (kind_) {
        case DomainKind::Boolean:
            return std::holds_alternative<bool>(value);
        case DomainKind::BoundedInteger: {
            const auto* n = std::get_if<std::int64_t>(&value);
            return n != nullptr && *n >= lo_ && *n <= hi_;
        }
        case DomainKind::Enumeration:
        case DomainKind::Place: {
            const auto* s = std::get_if<std::string>(&value);
            return s != nullptr && std::find(symbols_.begin(), symbols_.end(), *s) != symbols_.end();
        }
    }
    return false;
}

std::size_t AttributeDomain::size() const noexcept {
    switch (kind_) {
        case DomainKind::Boolean: return 2;
        case DomainKind::BoundedInteger: return static_cast<std::size_t>(hi_ - lo_ + 1);
        case DomainKind::Enumeration:
        case DomainKind::Place: return symbols_.size();
    }
    return 0;
}

Value AttributeDomain::at(std::size_t index) const {
    switch (kind_) {
        case DomainKind::Boolean: return index != 0;
        case DomainKind::BoundedInteger: return lo_ + static_cast<std::int64_t>(index);
        case DomainKind::Enumeration:
        case DomainKind::Place: return symbols_.at(index);
    }
    return false;
}

std::string_view to_string(CapabilityKind kind) {
    switch (kind) {
        case CapabilityKind::Event: return "event";
        case CapabilityKind::State: return "state";
        case CapabilityKind::Action: return "action";
    }
    return "?";
}

const Attribute* Device::find_attribute(std::string_view attribute) const {
    for (const auto& a : attributes) {
        if (a.id == attribute) return &a;
    }
    return nullptr;
}

const Capability* Device::find_capability(std::string_view capability) const {
    for (const auto& c : capabilities) {
        if (c.id == capability) return &c;
    }
    return nullptr;
}

std::string_view to_string(Comparator cmp) {
    switch (cmp) {
        case Comparator::Eq: return "=";
        case Comparator::Ne: return "!=";
        case Comparator::Lt: return "<";
        case Comparator::Gt: return ">";
        case Comparator::Le: return "<=";
        case Comparator::Ge: return ">=";
    }
    return "?";
}

std::optional<Comparator> comparator_from_string(std::string_view text) {
    for (auto c : {Comparator::Eq, Comparator::Ne, Comparator::Lt, Comparator::Gt, Comparator::Le, Comparator::Ge}) {
        if (to_string(c) == text) return c;
    }
    return std::nullopt;
}

bool is_ordering(Comparator cmp) { return cmp != Comparator::Eq && cmp != Comparator::Ne; }

const Value& WorldState::at(const AttributeKey& key) const {
    auto it = values.find(key);
    if (it == values.end()) {
        throw ReferenceError(ReferenceError::Reason::Dangling, key.str(),
                             "attribute '" + key.str() + "' is not part of the world state");
    }
    return it->second;
}

json world_to_json(const WorldState& world) {
    json values = json::object();
    for (const auto& [key, value] : world.values) values[key.str()] = value_to_json(value);
    return json{{"clock", world.clock}, {"values", values}};
}

std::string_view to_string(Slot slot) {
    switch (slot) {
        case Slot::Do: return "do";
        case Slot::When: return "when";
        case Slot::While: return "while";
    }
    return "?";
}

std::optional<Slot> slot_from_string(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    for (auto s : {Slot::Do, Slot::When, Slot::While}) {
        if (to_string(s) == lower) return s;
    }
    return std::nullopt;
}

CapabilityKind kind_for_slot(Slot slot) {
    switch (slot) {
        case Slot::Do: return CapabilityKind::Action;
        case Slot::When: return CapabilityKind::Event;
        case Slot::While: return CapabilityKind::State;
    }
    return CapabilityKind::Event;
}

// ---------------------------------------------------------------------------
// Registry construction

CapabilityRegistry::CapabilityRegistry(std::string version, std::vector<Device> devices)
    : version_(std::move(version)), devices_(std::move(devices)) {
    std::set<std::string> device_ids;
    for (auto& device : devices_) {
        if (!device_ids.insert(device.id).second) throw SyntaxError("duplicate device id '" + device.id + "'");
        std::set<std::string> attribute_ids;
        for (const auto& attribute : device.attributes) {
            if (!attribute_ids.insert(attribute.id).second) {
                throw SyntaxError("duplicate attribute '" + device.id + "." + attribute.id + "'");
            }
            if (!attribute.domain.contains(attribute.initial)) {
                throw DomainError("initial value " + to_string(attribute.initial) + " of '" + device.id + "." +
                                  attribute.id + "' is outside its domain");
            }
        }
        std::set<std::string> capability_ids;
        for (auto& capability : device.capabilities) {
            capability.device = device.id;
            if (!capability_ids.insert(capability.id).second) {
                throw SyntaxError("duplicate capability '" + device.id + "." + capability.id + "'");
            }
        }
    }

    // Cross references resolve only once every device is known.
    for (const auto& device : devices_) {
        for (const auto& capability : device.capabilities) {
            const std::string qualified = device.id + "." + capability.id;
            switch (capability.kind) {
                case CapabilityKind::State:
                    if (device.find_attribute(capability.id) == nullptr) {
                        throw ReferenceError(ReferenceError::Reason::Dangling, qualified,
                                             "state capability '" + qualified + "' names no declared attribute");
                    }
                    if (!capability.effects.empty() || !capability.emits.empty()) {
                        throw SyntaxError("state capability '" + qualified + "' may not declare effects or emits");
                    }
                    break;
                case CapabilityKind::Event:
                    if (!capability.emits.empty()) {
                        throw SyntaxError("event capability '" + qualified + "' may not emit events");
                    }
                    break;
                case CapabilityKind::Action:
                    break;
            }
            for (const auto& effect : capability.effects) {
                const Attribute* target = find_attribute(effect.device, effect.attribute);
                if (target == nullptr) {
                    throw ReferenceError(ReferenceError::Reason::Dangling, effect.key().str(),
                                         "effect of '" + qualified + "' targets undeclared attribute '" +
                                             effect.key().str() + "'");
                }
                if (!target->domain.contains(effect.value)) {
                    throw DomainError("effect of '" + qualified + "' assigns " + to_string(effect.value) +
                                      " outside the domain of '" + effect.key().str() + "'");
                }
            }
            for (const auto& emitted : capability.emits) {
                const Capability* event = find_capability(emitted);
                if (event == nullptr) {
                    throw ReferenceError(ReferenceError::Reason::Dangling, emitted.str(),
                                         "'" + qualified + "' emits undeclared event '" + emitted.str() + "'");
                }
                if (event->kind != CapabilityKind::Event) {
                    throw ReferenceError(ReferenceError::Reason::KindMismatch, emitted.str(),
                                         "'" + qualified + "' emits '" + emitted.str() + "', which is not an event");
                }
            }
        }
    }
}

const Device* CapabilityRegistry::find_device(std::string_view device) const {
    for (const auto& d : devices_) {
        if (d.id == device) return &d;
    }
    return nullptr;
}

const Capability* CapabilityRegistry::find_capability(std::string_view device, std::string_view capability) const {
    const Device* d = find_device(device);
    return d == nullptr ? nullptr : d->find_capability(capability);
}

const Attribute* CapabilityRegistry::find_attribute(std::string_view device, std::string_view attribute) const {
    const Device* d = find_device(device);
    return d == nullptr ? nullptr : d->find_attribute(attribute);
}

std::vector<const Capability*> CapabilityRegistry::capabilities() const {
    std::vector<const Capability*> out;
    for (const auto& d : devices_) {
        for (const auto& c : d.capabilities) out.push_back(&c);
    }
    return out;
}

WorldState CapabilityRegistry::initial_world() const {
    WorldState world;
    for (const auto& d : devices_) {
        for (const auto& a : d.attributes) world.values.emplace(AttributeKey{d.id, a.id}, a.initial);
    }
    return world;
}

// ---------------------------------------------------------------------------
// Registry file format

json parse_document(std::string_view source) {
    try {
        return json::parse(source.begin(), source.end());
    } catch (const json::parse_error& e) {
        // Convert the byte offset into a 1-based line/column.
        std::size_t offset = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, source.size());
        std::size_t line = 1;
        std::size_t column = 1;
        for (std::size_t i = 0; i < offset; ++i) {
            if (source[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        throw SyntaxError("malformed JSON document", line, column);
    }
}

namespace {

StateEffect effect_from_json(const json& j, const std::string& path) {
    check_fields(j, path, {"device", "attribute", "value"});
    StateEffect effect{get_string(j, path, "device"), get_string(j, path, "attribute"), false};
    const json& value = member(j, path, "value");
    try {
        effect.value = value_from_json(value);
    } catch (const SyntaxError& e) {
        schema_error(path + ".value", e.what());
    }
    return effect;
}

CapabilityRef ref_from_json(const json& j, const std::string& path) {
    check_fields(j, path, {"device", "capability"});
    return CapabilityRef{get_string(j, path, "device"), get_string(j, path, "capability")};
}

Attribute attribute_from_json(const std::string& id, const json& j, const std::string& path) {
    require_object(j, path);
    const std::string kind = get_string(j, path, "kind");
    Value initial;
    try {
        initial = value_from_json(member(j, path, "initial"));
    } catch (const SyntaxError& e) {
        schema_error(path + ".initial", e.what());
    }
    auto symbols = [&] {
        const json& values = require_array(member(j, path, "values"), path + ".values");
        std::vector<std::string> out;
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (!values[i].is_string()) schema_error(indexed(path + ".values", i), "expected a string");
            out.push_back(values[i].get<std::string>());
        }
        return out;
    };
    if (kind == "boolean") {
        check_fields(j, path, {"kind", "initial"});
        return Attribute{id, AttributeDomain::boolean(), initial};
    }
    if (kind == "enumeration") {
        check_fields(j, path, {"kind", "values", "initial"});
        return Attribute{id, AttributeDomain::enumeration(symbols()), initial};
    }
    if (kind == "place") {
        check_fields(j, path, {"kind", "values", "initial"});
        return Attribute{id, AttributeDomain::place(symbols()), initial};
    }
    if (kind == "bounded-integer") {
        check_fields(j, path, {"kind", "lo", "hi", "initial"});
        return Attribute{id,
                         AttributeDomain::bounded_integer(detail::get_integer(j, path, "lo"),
                                                          detail::get_integer(j, path, "hi")),
                         initial};
    }
    schema_error(path + ".kind", "unknown attribute kind '" + kind + "'");
}

CapabilityKind capability_kind_from_string(const std::string& text, const std::string& path) {
    for (auto k : {CapabilityKind::Event, CapabilityKind::State, CapabilityKind::Action}) {
        if (to_string(k) == text) return k;
    }
    schema_error(path, "unknown capability kind '" + text + "'");
}

Capability capability_from_json(const std::string& device, const json& j, const std::string& path) {
    check_fields(j, path, {"id", "kind", "effects", "emits"});
    Capability c;
    c.id = get_string(j, path, "id");
    c.device = device;
    c.kind = capability_kind_from_string(get_string(j, path, "kind"), path + ".kind");
    if (auto it = j.find("effects"); it != j.end()) {
        require_array(*it, path + ".effects");
        for (std::size_t i = 0; i < it->size(); ++i) {
            c.effects.push_back(effect_from_json((*it)[i], indexed(path + ".effects", i)));
        }
    }
    if (auto it = j.find("emits"); it != j.end()) {
        require_array(*it, path + ".emits");
        for (std::size_t i = 0; i < it->size(); ++i) {
            c.emits.push_back(ref_from_json((*it)[i], indexed(path + ".emits", i)));
        }
    }
    return c;
}

Device device_from_json(const json& j, const std::string& path) {
    check_fields(j, path, {"id", "label", "attributes", "capabilities"});
    Device d;
    d.id = get_string(j, path, "id");
    d.label = j.contains("label") ? get_string(j, path, "label") : d.id;
    if (auto it = j.find("attributes"); it != j.end()) {
        require_object(*it, path + ".attributes");
        for (const auto& [id, spec] : it->items()) {
            d.attributes.push_back(attribute_from_json(id, spec, path + ".attributes." + id));
        }
    }
    if (auto it = j.find("capabilities"); it != j.end()) {
        require_array(*it, path + ".capabilities");
        for (std::size_t i = 0; i < it->size(); ++i) {
            d.capabilities.push_back(capability_from_json(d.id, (*it)[i], indexed(path + ".capabilities", i)));
        }
    }
    return d;
}

json attribute_to_json(const Attribute& a) {
    json j{{"kind", to_string(a.domain.kind())}, {"initial", value_to_json(a.initial)}};
    switch (a.domain.kind()) {
        case DomainKind::Boolean: break;
        case DomainKind::Enumeration:
        case DomainKind::Place: j["values"] = a.domain.symbols(); break;
        case DomainKind::BoundedInteger:
            j["lo"] = a.domain.lo();
            j["hi"] = a.domain.hi();
            break;
    }
    return j;
}

}  // namespace

CapabilityRegistry registry_from_json(const json& document) {
    check_fields(document, "$", {"version", "devices"});
    std::string version = get_string(document, "$", "version");
    const json& devices = require_array(member(document, "$", "devices"), "$.devices");
    std::vector<Device> out;
    for (std::size_t i = 0; i < devices.size(); ++i) out.push_back(device_from_json(devices[i], indexed("$.devices", i)));
    return CapabilityRegistry(std::move(version), std::move(out));
}

CapabilityRegistry load_registry(std::string_view source) { return registry_from_json(parse_document(source)); }

json registry_to_json(const CapabilityRegistry& registry) {
    json devices = json::array();
    for (const auto& d : registry.devices()) {
        json attributes = json::object();
        for (const auto& a : d.attributes) attributes[a.id] = attribute_to_json(a);
        json capabilities = json::array();
        for (const auto& c : d.capabilities) {
            json effects = json::array();
            for (const auto& e : c.effects) {
                effects.push_back({{"device", e.device}, {"attribute", e.attribute}, {"value", value_to_json(e.value)}});
            }
            json emits = json::array();
            for (const auto& r : c.emits) emits.push_back({{"device", r.device}, {"capability", r.capability}});
            capabilities.push_back({{"id", c.id}, {"kind", to_string(c.kind)}, {"effects", effects}, {"emits", emits}});
        }
        devices.push_back(
            {{"id", d.id}, {"label", d.label}, {"attributes", attributes}, {"capabilities", capabilities}});
    }
    return json{{"version", registry.version()}, {"devices", devices}};
}

std::string serialize_registry(const CapabilityRegistry& registry) { return registry_to_json(registry).dump(2); }

// ---------------------------------------------------------------------------
// Operations

std::vector<Capability> filter_capabilities(const CapabilityRegistry& registry, Slot slot,
                                            const std::optional<std::string>& device) {
    if (device && registry.find_device(*device) == nullptr) throw UnknownDevice(*device);
    const CapabilityKind wanted = kind_for_slot(slot);
    std::vector<Capability> out;
    for (const Capability* c : registry.capabilities()) {
        if (c->kind != wanted) continue;
        if (device && c->device != *device) continue;
        out.push_back(*c);
    }
    return out;
}

WorldState apply_effects(const WorldState& world, std::span<const StateEffect> effects,
                         const CapabilityRegistry* registry) {
    WorldState next = world;
    for (const auto& effect : effects) {
        auto it = next.values.find(effect.key());
        if (it == next.values.end()) {
            throw ReferenceError(ReferenceError::Reason::Dangling, effect.key().str(),
                                 "effect targets undeclared attribute '" + effect.key().str() + "'");
        }
        bool in_domain = it->second.index() == effect.value.index();
        if (registry != nullptr) {
            const Attribute* attribute = registry->find_attribute(effect.key());
            in_domain = attribute != nullptr && attribute->domain.contains(effect.value);
        }
        if (!in_domain) {
            throw DomainError("value " + to_string(effect.value) + " is outside the domain of '" +
                              effect.key().str() + "'");
        }
        it->second = effect.value;
    }
    return next;
}

bool eval_predicate(const WorldState& world, const StatePredicate& predicate) {
    const Value& stored = world.at(predicate.key());
    if (stored.index() != predicate.literal.index()) {
        throw ReferenceError(ReferenceError::Reason::IncomparableDomain, predicate.key().str(),
                             "literal " + to_string(predicate.literal) + " has the wrong type for '" +
                                 predicate.key().str() + "'");
    }
    if (is_ordering(predicate.comparator) && !std::holds_alternative<std::int64_t>(stored)) {
        throw ReferenceError(ReferenceError::Reason::IncomparableDomain, predicate.key().str(),
                             "comparator '" + std::string(to_string(predicate.comparator)) +
                                 "' is not defined on '" + predicate.key().str() + "'");
    }
    switch (predicate.comparator) {
        case Comparator::Eq: return stored == predicate.literal;
        case Comparator::Ne: return stored != predicate.literal;
        default: break;
    }
    const auto lhs = std::get<std::int64_t>(stored);
    const auto rhs = std::get<std::int64_t>(predicate.literal);
    switch (predicate.comparator) {
        case Comparator::Lt: return lhs < rhs;
        case Comparator::Gt: return lhs > rhs;
        case Comparator::Le: return lhs <= rhs;
        case Comparator::Ge: return lhs >= rhs;
        default: return false;
    }
}

}  // namespace sensation
