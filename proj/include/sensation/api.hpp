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

// JSON API of the authoring backend. The handler is a pure function of the
// request and the store, so it can be exercised without a socket; server.hpp
// puts it behind HTTP. The *_document builders are shared with the CLI,
// which prints them with render_json for byte-identical output.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "sensation/capability.hpp"
#include "sensation/engine.hpp"
#include "sensation/error.hpp"
#include "sensation/rule.hpp"
#include "sensation/scenario.hpp"
#include "sensation/store.hpp"

namespace sensation {

/// Machine-readable error codes. The set is closed: every error response
/// carries exactly one of these.
enum class ApiCode {
    BadRequest,           // 400 malformed body, query or document
    ParseError,           // 400 DSL text does not parse
    InvalidTimeline,      // 400 timeline out of order or referencing unknown capabilities
    NotFound,             // 404 unknown route or rule id
    UnknownDevice,        // 404
    UnknownScenario,      // 404
    UnknownTask,          // 404
    MethodNotAllowed,     // 405
    StaleRevision,        // 409
    UnresolvedReference,  // 422
    KindMismatch,         // 422
    Incomparable,         // 422
    OutOfDomain,          // 422
    DomainTooLarge,       // 422
    StorageError,         // 500
    Internal,             // 500
};

std::string_view to_string(ApiCode code);
int http_status(ApiCode code);
const std::vector<ApiCode>& all_api_codes();

class ApiError : public Error {
public:
    ApiError(ApiCode code, const std::string& message, nlohmann::json detail = nlohmann::json::object());

    ApiCode code() const noexcept { return code_; }
    int status() const noexcept { return http_status(code_); }
    /// Extra members merged into the error object (span, violations, ...).
    const nlohmann::json& detail() const noexcept { return detail_; }

private:
    ApiCode code_;
    nlohmann::json detail_;
};

/// Maps any library exception to its ApiError.
ApiError to_api_error(std::exception_ptr error);

/// `{"error": {"code", "message", ...detail}}`
nlohmann::json api_error_to_json(const ApiError& error);

/// Two-space indented JSON plus a trailing newline; the only serializer
/// used for API bodies and CLI --json output.
std::string render_json(const nlohmann::json& document);

// ---------------------------------------------------------------------------
// Documents

/// Rules from a request member: an array of DSL strings and/or AST objects,
/// or one string in rules-file format. Positional ids `r<N>` unless an AST
/// carries its own. Rules come back canonicalized.
std::vector<Rule> rules_from_request(const nlohmann::json& rules);

/// Parses a single rule from `{dsl}` or `{ast}`.
Rule rule_from_request(const nlohmann::json& body);

/// Canonicalizes each rule, keeping ids.
std::vector<Rule> canonical_rules(std::vector<Rule> rules);

nlohmann::json capabilities_document(const CapabilityRegistry& registry, Slot slot,
                                     const std::optional<std::string>& device);
nlohmann::json rule_document(const Rule& rule);
nlohmann::json rules_document(const StoreSnapshot& snapshot);
nlohmann::json validate_document(const Rule& rule, const CapabilityRegistry& registry);
nlohmann::json analyze_document(const std::vector<Diagnostic>& diagnostics);
nlohmann::json simulate_document(const Scenario& scenario, const ScenarioReport& report);
nlohmann::json simulate_timeline_document(const EmissionTrace& trace);
nlohmann::json grade_document(const std::string& task, const GradeReport& report);
nlohmann::json scenarios_document(std::span<const Scenario> scenarios);

// ---------------------------------------------------------------------------
// Handler

struct HttpRequest {
    std::string method;
    std::string path;
    std::map<std::string, std::string> query;
    std::string body;
};

struct HttpResponse {
    int status = 200;
    std::string body;
};

/// One service instance: the active registry, the rule store in `data_dir`
/// and the built-in scenarios. Thread-safe; store mutations serialize inside
/// RuleStore.
class Api {
public:
    Api(CapabilityRegistry registry, std::filesystem::path data_dir);

    HttpResponse handle(const HttpRequest& request);

    const CapabilityRegistry& registry() const noexcept { return *registry_; }
    RuleStore& store() noexcept { return *store_; }
    const Scenario& scenario(const std::string& id) const;

private:
    nlohmann::json dispatch(const HttpRequest& request, int& status);
    std::vector<Rule> request_rules(const nlohmann::json& body) const;

    std::unique_ptr<CapabilityRegistry> registry_;
    std::unique_ptr<RuleStore> store_;
    std::vector<Scenario> scenarios_;
};

}  // namespace sensation
