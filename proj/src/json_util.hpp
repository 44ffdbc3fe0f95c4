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

// Strict schema helpers shared by every document loader. All failures are
// reported as SyntaxError naming the JSON path.

#include <initializer_list>
#include <string>
#include <string_view>

#include "json.hpp"
#include "sensation/error.hpp"

namespace sensation::detail {

using nlohmann::json;

[[noreturn]] inline void schema_error(const std::string& path, const std::string& what) {
    throw SyntaxError(path + ": " + what);
}

inline const json& require_object(const json& j, const std::string& path) {
    if (!j.is_object()) schema_error(path, "expected an object");
    return j;
}

inline const json& require_array(const json& j, const std::string& path) {
    if (!j.is_array()) schema_error(path, "expected an array");
    return j;
}

/// Rejects members outside `allowed`.
inline void check_fields(const json& j, const std::string& path, std::initializer_list<std::string_view> allowed) {
    require_object(j, path);
    for (const auto& [key, value] : j.items()) {
        bool known = false;
        for (auto name : allowed) known = known || key == name;
        if (!known) schema_error(path, "unknown field '" + key + "'");
    }
}

inline const json& member(const json& j, const std::string& path, const char* name) {
    auto it = j.find(name);
    if (it == j.end()) schema_error(path, std::string("missing field '") + name + "'");
    return *it;
}

inline std::string get_string(const json& j, const std::string& path, const char* name) {
    const json& v = member(j, path, name);
    if (!v.is_string()) schema_error(path + "." + name, "expected a string");
    return v.get<std::string>();
}

inline std::int64_t get_integer(const json& j, const std::string& path, const char* name) {
    const json& v = member(j, path, name);
    if (!v.is_number_integer()) schema_error(path + "." + name, "expected an integer");
    return v.get<std::int64_t>();
}

inline std::string indexed(const std::string& path, std::size_t i) {
    return path + "[" + std::to_string(i) + "]";
}

}  // namespace sensation::detail
