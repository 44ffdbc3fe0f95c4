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
#include "sensation/api.hpp"

#include <algorithm>

#include "sensation/analyzer.hpp"
#include "sensation/dsl.hpp"
#include "sensation/fixtures.hpp"

namespace sensation {

using nlohmann::json;

namespace {

struct CodeInfo {
    ApiCode code;
    std::string_view name;
    int status;
};

constexpr CodeInfo kCodes[] = {
    {ApiCode::BadRequest, "BAD_REQUEST", 400},
    {ApiCode::ParseError, "PARSE_ERROR", 400},
    {ApiCode::InvalidTimeline, "INVALID_TIMELINE", 400},
    {ApiCode::NotFound, "NOT_FOUND", 404},
    {ApiCode::UnknownDevice, "UNKNOWN_DEVICE", 404},
    {ApiCode::UnknownScenario, "UNKNOWN_SCENARIO", 404},
    {ApiCode::UnknownTask, "UNKNOWN_TASK", 404},
    {ApiCode::MethodNotAllowed, "METHOD_NOT_ALLOWED", 405},
    {ApiCode::StaleRevision, "STALE_REVISION", 409},
    {ApiCode::UnresolvedReference, "UNRESOLVED_REFERENCE", 422},
    {ApiCode::KindMismatch, "KIND_MISMATCH", 422},
    {ApiCode::Incomparable, "INCOMPARABLE", 422},
    {ApiCode::OutOfDomain, "OUT_OF_DOMAIN", 422},
    {ApiCode::DomainTooLarge, "DOMAIN_TOO_LARGE", 422},
    {ApiCode::StorageError, "STORAGE_ERROR", 500},
    {ApiCode::Internal, "INTERNAL", 500},
};

const CodeInfo& info(ApiCode code) {
    for (const auto& c : kCodes) {
        if (c.code == code) return c;
    }
    return kCodes[std::size(kCodes) - 1];
}

ApiCode code_for(ViolationKind kind) {
    switch (kind) {
        case ViolationKind::Unresolved: return ApiCode::UnresolvedReference;
        case ViolationKind::KindMismatch: return ApiCode::KindMismatch;
        case ViolationKind::Incomparable: return ApiCode::Incomparable;
        case ViolationKind::OutOfDomain: return ApiCode::OutOfDomain;
    }
    return ApiCode::Internal;
}

json span_to_json(const SourceSpan& span) {
    return json{{"line", span.line}, {"column", span.column}, {"length", span.length}};
}

}  // namespace

std::string_view to_string(ApiCode code) { return info(code).name; }

int http_status(ApiCode code) { return info(code).status; }

const std::vector<ApiCode>& all_api_codes() {
    static const std::vector<ApiCode> codes = [] {
        std::vector<ApiCode> out;
        for (const auto& c : kCodes) out.push_back(c.code);
        return out;
    }();
    return codes;
}

ApiError::ApiError(ApiCode code, const std::string& message, json detail)
    : Error(message), code_(code), detail_(std::move(detail)) {}

ApiError to_api_error(std::exception_ptr error) {
    try {
        std::rethrow_exception(error);
    } catch (const ApiError& e) {
        return e;
    } catch (const ParseError& e) {
        return {ApiCode::ParseError, e.what(), {{"span", span_to_json(e.span())}, {"expected", e.expected()}}};
    } catch (const ValidationError& e) {
        const auto& violations = e.report().violations;
        json list = json::array();
        for (const auto& v : violations) list.push_back(violation_to_json(v));
        const ApiCode code = violations.empty() ? ApiCode::Internal : code_for(violations.front().kind);
        return {code, e.what(), {{"rule", e.rule_id()}, {"violations", list}}};
    } catch (const ReferenceError& e) {
        switch (e.reason()) {
            case ReferenceError::Reason::Dangling:
                return {ApiCode::UnresolvedReference, e.what(), {{"target", e.target()}}};
            case ReferenceError::Reason::KindMismatch:
                return {ApiCode::KindMismatch, e.what(), {{"target", e.target()}}};
            case ReferenceError::Reason::IncomparableDomain:
                return {ApiCode::Incomparable, e.what(), {{"target", e.target()}}};
        }
        return {ApiCode::Internal, e.what()};
    } catch (const UnknownDevice& e) {
        return {ApiCode::UnknownDevice, e.what(), {{"device", e.device()}}};
    } catch (const DomainError& e) {
        return {ApiCode::OutOfDomain, e.what()};
    } catch (const DomainTooLarge& e) {
        return {ApiCode::DomainTooLarge, e.what()};
    } catch (const TimelineError& e) {
        return {ApiCode::InvalidTimeline, e.what()};
    } catch (const SyntaxError& e) {
        return {ApiCode::BadRequest, e.what()};
    } catch (const StaleRevision& e) {
        return {ApiCode::StaleRevision, e.what()};
    } catch (const NotFound& e) {
        return {ApiCode::NotFound, e.what()};
    } catch (const StorageError& e) {
        return {ApiCode::StorageError, e.what()};
    } catch (const std::exception& e) {
        return {ApiCode::Internal, e.what()};
    } catch (...) {
        return {ApiCode::Internal, "unknown error"};
    }
}

json api_error_to_json(const ApiError& error) {
    json body{{"code", to_string(error.code())}, {"message", error.what()}};
    for (const auto& [key, value] : error.detail().items()) body[key] = value;
    return json{{"error", body}};
}

std::string render_json(const json& document) { return document.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Documents

std::vector<Rule> canonical_rules(std::vector<Rule> rules) {
    for (auto& r : rules) r = canonicalize(r);
    return rules;
}

std::vector<Rule> rules_from_request(const json& rules) {
    if (rules.is_string()) return canonical_rules(parse_rules_file(rules.get<std::string>()));
    if (!rules.is_array()) throw ApiError(ApiCode::BadRequest, "'rules' must be an array or a rules-file string");
    std::vector<Rule> out;
    for (std::size_t i = 0; i < rules.size(); ++i) {
        const json& item = rules[i];
        Rule rule;
        if (item.is_string()) {
            rule = parse_rule(item.get<std::string>()).rule;
        } else if (item.is_object()) {
            rule = rule_from_json(item);
        } else {
            throw ApiError(ApiCode::BadRequest, "rules[" + std::to_string(i) + "] must be DSL text or an AST object");
        }
        if (rule.id.empty()) rule.id = "r" + std::to_string(i + 1);
        out.push_back(canonicalize(rule));
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        for (std::size_t j = i + 1; j < out.size(); ++j) {
            if (out[i].id == out[j].id) throw ApiError(ApiCode::BadRequest, "duplicate rule id '" + out[i].id + "'");
        }
    }
    return out;
}

Rule rule_from_request(const json& body) {
    if (!body.is_object()) throw ApiError(ApiCode::BadRequest, "request body must be an object");
    const bool has_dsl = body.contains("dsl");
    const bool has_ast = body.contains("ast");
    if (has_dsl == has_ast) throw ApiError(ApiCode::BadRequest, "request needs exactly one of 'dsl' or 'ast'");
    if (has_dsl) {
        if (!body["dsl"].is_string()) throw ApiError(ApiCode::BadRequest, "'dsl' must be a string");
        return parse_rule(body["dsl"].get<std::string>()).rule;
    }
    return rule_from_json(body["ast"]);
}

json capabilities_document(const CapabilityRegistry& registry, Slot slot, const std::optional<std::string>& device) {
    json list = json::array();
    for (const auto& c : filter_capabilities(registry, slot, device)) {
        json entry{{"device", c.device}, {"id", c.id}, {"kind", to_string(c.kind)}, {"ref", c.ref().str()}};
        list.push_back(std::move(entry));
    }
    return json{{"slot", to_string(slot)}, {"device", device ? json(*device) : json(nullptr)}, {"capabilities", list}};
}

json rule_document(const Rule& rule) { return json{{"id", rule.id}, {"dsl", print_rule(rule)}, {"ast", rule_to_json(rule)}}; }

json rules_document(const StoreSnapshot& snapshot) {
    json list = json::array();
    for (const auto& r : snapshot.rules) list.push_back(rule_document(r));
    return json{{"revision", snapshot.revision}, {"rules", list}};
}

json validate_document(const Rule& rule, const CapabilityRegistry& registry) {
    const Rule canonical = canonicalize(rule);
    const ValidationReport report = validate_rule(canonical, registry);
    json violations = json::array();
    for (const auto& v : report.violations) violations.push_back(violation_to_json(v));
    return json{{"valid", report.ok()},
                {"dsl", print_rule(canonical)},
                {"ast", rule_to_json(canonical)},
                {"violations", violations}};
}

json analyze_document(const std::vector<Diagnostic>& diagnostics) {
    return json{{"diagnostics", diagnostics_to_json(diagnostics)}};
}

json simulate_document(const Scenario& scenario, const ScenarioReport& report) {
    return scenario_report_to_json(scenario, report);
}

json simulate_timeline_document(const EmissionTrace& trace) { return json{{"trace", trace_to_json(trace)}}; }

json grade_document(const std::string& task, const GradeReport& report) {
    json out = grade_report_to_json(report);
    out["task"] = task;
    return out;
}

json scenarios_document(std::span<const Scenario> scenarios) {
    json list = json::array();
    for (const auto& s : scenarios) list.push_back(scenario_summary_to_json(s));
    return json{{"scenarios", list}};
}

// ---------------------------------------------------------------------------
// Handler

namespace {

json parse_body(const std::string& body) {
    if (body.find_first_not_of(" \t\r\n") == std::string::npos) return json::object();
    json doc = json::parse(body, nullptr, false);
    if (doc.is_discarded()) throw ApiError(ApiCode::BadRequest, "request body is not valid JSON");
    if (!doc.is_object()) throw ApiError(ApiCode::BadRequest, "request body must be a JSON object");
    return doc;
}

std::optional<std::uint64_t> parse_revision(const json& value) {
    if (value.is_null()) return std::nullopt;
    if (!value.is_number_unsigned()) throw ApiError(ApiCode::BadRequest, "'revision' must be a non-negative integer");
    return value.get<std::uint64_t>();
}

std::optional<std::uint64_t> body_revision(const json& body) {
    auto it = body.find("revision");
    return it == body.end() ? std::nullopt : parse_revision(*it);
}

std::optional<std::uint64_t> query_revision(const std::map<std::string, std::string>& query) {
    auto it = query.find("revision");
    if (it == query.end()) return std::nullopt;
    const std::string& text = it->second;
    if (text.empty() || text.size() > 19 || !std::all_of(text.begin(), text.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        throw ApiError(ApiCode::BadRequest, "'revision' must be a non-negative integer");
    }
    return std::stoull(text);
}

[[noreturn]] void method_not_allowed(const std::string& method, const std::string& path) {
    throw ApiError(ApiCode::MethodNotAllowed, method + " is not supported on " + path);
}

}  // namespace

Api::Api(CapabilityRegistry registry, std::filesystem::path data_dir)
    : registry_(std::make_unique<CapabilityRegistry>(std::move(registry))),
      store_(std::make_unique<RuleStore>(std::move(data_dir), *registry_)) {
    for (const auto& id : fixtures::scenario_ids()) scenarios_.push_back(fixtures::load_builtin_scenario(id));
}

const Scenario& Api::scenario(const std::string& id) const {
    for (const auto& s : scenarios_) {
        if (s.id == id) return s;
    }
    throw ApiError(ApiCode::UnknownScenario, "unknown scenario '" + id + "'");
}

std::vector<Rule> Api::request_rules(const json& body) const {
    if (auto it = body.find("rules"); it != body.end()) return rules_from_request(*it);
    return store_->snapshot().rules;
}

HttpResponse Api::handle(const HttpRequest& request) {
    HttpResponse response;
    try {
        int status = 200;
        const json document = dispatch(request, status);
        response.status = status;
        response.body = render_json(document);
    } catch (...) {
        const ApiError error = to_api_error(std::current_exception());
        response.status = error.status();
        response.body = render_json(api_error_to_json(error));
    }
    return response;
}

json Api::dispatch(const HttpRequest& request, int& status) {
    const std::string& method = request.method;
    const std::string& path = request.path;
    constexpr std::string_view kPrefix = "/api/";
    if (path.compare(0, kPrefix.size(), kPrefix) != 0) throw ApiError(ApiCode::NotFound, "no route for " + path);
    std::string route = path.substr(kPrefix.size());
    if (!route.empty() && route.back() == '/') route.pop_back();

    if (route == "registry") {
        if (method != "GET") method_not_allowed(method, path);
        return registry_to_json(*registry_);
    }
    if (route == "capabilities") {
        if (method != "GET") method_not_allowed(method, path);
        auto slot_it = request.query.find("slot");
        if (slot_it == request.query.end()) throw ApiError(ApiCode::BadRequest, "missing query parameter 'slot'");
        auto slot = slot_from_string(slot_it->second);
        if (!slot) throw ApiError(ApiCode::BadRequest, "slot must be one of do, when, while");
        std::optional<std::string> device;
        if (auto it = request.query.find("device"); it != request.query.end() && !it->second.empty()) device = it->second;
        return capabilities_document(*registry_, *slot, device);
    }
    if (route == "scenarios") {
        if (method != "GET") method_not_allowed(method, path);
        return scenarios_document(scenarios_);
    }
    if (route == "rules") {
        if (method == "GET") return rules_document(store_->snapshot());
        if (method != "POST") method_not_allowed(method, path);
        const json body = parse_body(request.body);
        const MutationResult result = store_->add(rule_from_request(body), body_revision(body));
        status = 201;
        json out = rule_document(*result.rule);
        out["revision"] = result.revision;
        return out;
    }
    if (route.rfind("rules/", 0) == 0) {
        const std::string id = route.substr(6);
        if (id.empty() || id.find('/') != std::string::npos) throw ApiError(ApiCode::NotFound, "no route for " + path);
        if (method == "GET") return rule_document(store_->get(id));
        if (method == "PUT") {
            const json body = parse_body(request.body);
            const MutationResult result = store_->replace(id, rule_from_request(body), body_revision(body));
            json out = rule_document(*result.rule);
            out["revision"] = result.revision;
            return out;
        }
        if (method == "DELETE") {
            const MutationResult result = store_->remove(id, query_revision(request.query));
            return json{{"deleted", result.id}, {"revision", result.revision}};
        }
        method_not_allowed(method, path);
    }
    if (route == "validate") {
        if (method != "POST") method_not_allowed(method, path);
        return validate_document(rule_from_request(parse_body(request.body)), *registry_);
    }
    if (route == "analyze") {
        if (method != "POST") method_not_allowed(method, path);
        const std::vector<Rule> rules = request_rules(parse_body(request.body));
        return analyze_document(analyze(rules, *registry_));
    }
    if (route == "simulate") {
        if (method != "POST") method_not_allowed(method, path);
        const json body = parse_body(request.body);
        const bool has_scenario = body.contains("scenario");
        if (has_scenario == body.contains("timeline")) {
            throw ApiError(ApiCode::BadRequest, "request needs exactly one of 'scenario' or 'timeline'");
        }
        const std::vector<Rule> rules = request_rules(body);
        if (has_scenario) {
            if (!body["scenario"].is_string()) throw ApiError(ApiCode::BadRequest, "'scenario' must be a string");
            const Scenario& s = scenario(body["scenario"].get<std::string>());
            return simulate_document(s, run_scenario(s, rules));
        }
        const Timeline timeline = timeline_from_json(body["timeline"]);
        check_timeline(timeline, *registry_);
        require_valid(rules, *registry_);
        return simulate_timeline_document(run_simulation(*registry_, rules, timeline));
    }
    if (route == "grade") {
        if (method != "POST") method_not_allowed(method, path);
        const json body = parse_body(request.body);
        auto task = body.find("task");
        if (task == body.end() || !task->is_string()) throw ApiError(ApiCode::BadRequest, "missing string member 'task'");
        const std::string id = task->get<std::string>();
        const auto it = std::find_if(scenarios_.begin(), scenarios_.end(), [&](const Scenario& s) { return s.id == id; });
        if (it == scenarios_.end()) throw ApiError(ApiCode::UnknownTask, "unknown task '" + id + "'");
        const std::vector<Rule> rules = request_rules(body);
        return grade_document(id, grade(rules, it->task, it->registry));
    }
    throw ApiError(ApiCode::NotFound, "no route for " + path);
}

}  // namespace sensation
