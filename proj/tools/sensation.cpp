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
// sensation: command-line front end for the rule toolkit.

#include <chrono>
#include <csignal>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "sensation/analyzer.hpp"
#include "sensation/api.hpp"
#include "sensation/dsl.hpp"
#include "sensation/fixtures.hpp"
#include "sensation/io.hpp"
#include "sensation/server.hpp"

using namespace sensation;
using nlohmann::json;

namespace {

constexpr int kClean = 0;
constexpr int kFindings = 1;
constexpr int kInvalid = 2;
constexpr int kIoError = 3;

struct Options {
    std::string registry;
    std::string rules;
    std::string scenario;
    std::string timeline;
    std::string task;
    std::string legacy;
    std::string data_dir = "data";
    std::string host = "127.0.0.1";
    int port = 8080;
    bool json = false;
};

CapabilityRegistry active_registry(const Options& o) {
    if (o.registry.empty()) return fixtures::smart_home();
    return load_registry(read_text_file(o.registry));
}

std::vector<Rule> load_rules(const Options& o) {
    return canonical_rules(parse_rules_file(read_text_file(o.rules)));
}

Scenario resolve_scenario(const std::string& ref) {
    if (fixtures::scenario_source(ref)) return fixtures::load_builtin_scenario(ref);
    const std::filesystem::path path(ref);
    return load_scenario(read_text_file(ref), default_registry_resolver(path.parent_path().string()));
}

void print(const json& doc) { std::cout << render_json(doc); }

std::string firing_line(const TraceEntry& entry) {
    if (const auto* f = std::get_if<FireEntry>(&entry)) {
        std::string line = "t=" + std::to_string(f->timestamp) + " depth=" + std::to_string(f->depth) + " " + f->rule +
                           " on " + f->trigger.str() + ":";
        for (const auto& a : f->actions) line += " " + a.str();
        return line;
    }
    const auto& l = std::get<LoopAborted>(entry);
    std::string line = "t=" + std::to_string(l.timestamp) + " depth=" + std::to_string(l.depth) + " loop aborted:";
    for (const auto& id : l.chain) line += " " + id;
    return line;
}

void print_grade(const std::string& task, const GradeReport& report) {
    std::cout << task << ": " << to_string(report.grade.label) << " (" << report.grade.score << ")\n";
    for (const auto& m : report.matches) {
        std::cout << "  " << m.reference << " " << to_string(m.match);
        for (const auto& c : m.candidates) std::cout << " " << c;
        std::cout << "\n";
    }
    if (!report.unmatched.empty()) {
        std::cout << "  unmatched:";
        for (const auto& id : report.unmatched) std::cout << " " << id;
        std::cout << "\n";
    }
}

int cmd_check(const Options& o) {
    const CapabilityRegistry registry = active_registry(o);
    const std::vector<Rule> rules = load_rules(o);
    json results = json::array();
    bool ok = true;
    for (const auto& r : rules) {
        json doc = validate_document(r, registry);
        doc["id"] = r.id;
        ok = ok && doc["valid"].get<bool>();
        results.push_back(std::move(doc));
    }
    if (o.json) {
        print(json{{"valid", ok}, {"rules", results}});
    } else {
        for (const auto& doc : results) {
            std::cout << doc["id"].get<std::string>() << ": " << (doc["valid"].get<bool>() ? "ok" : "invalid") << "\n";
            for (const auto& v : doc["violations"]) {
                std::cout << "  " << v["part"].get<std::string>() << "[" << v["index"].get<std::size_t>()
                          << "] " << v["kind"].get<std::string>() << ": " << v["message"].get<std::string>() << "\n";
            }
        }
    }
    return ok ? kClean : kInvalid;
}

int cmd_fmt(const Options& o) {
    const std::vector<Rule> rules = load_rules(o);
    if (o.json) {
        json list = json::array();
        for (const auto& r : rules) list.push_back(rule_document(r));
        print(json{{"rules", list}});
    } else {
        std::cout << print_rules_file(rules);
    }
    return kClean;
}

int cmd_analyze(const Options& o) {
    const CapabilityRegistry registry = active_registry(o);
    const std::vector<Diagnostic> diagnostics = analyze(load_rules(o), registry);
    if (o.json) {
        print(analyze_document(diagnostics));
    } else {
        for (const auto& d : diagnostics) std::cout << render_diagnostic(d) << "\n";
        if (diagnostics.empty()) std::cout << "no findings\n";
    }
    return diagnostics.empty() ? kClean : kFindings;
}

int cmd_simulate(const Options& o) {
    const std::vector<Rule> rules = load_rules(o);
    if (o.scenario.empty() == o.timeline.empty()) throw CLI::ValidationError("simulate needs exactly one of --scenario or --timeline");
    if (!o.timeline.empty()) {
        const CapabilityRegistry registry = active_registry(o);
        const Timeline timeline = load_timeline(read_text_file(o.timeline));
        check_timeline(timeline, registry);
        require_valid(rules, registry);
        const EmissionTrace trace = run_simulation(registry, rules, timeline);
        if (o.json) {
            print(simulate_timeline_document(trace));
        } else {
            for (const auto& e : trace.entries) std::cout << firing_line(e) << "\n";
        }
        return trace.aborted() ? kFindings : kClean;
    }
    const Scenario scenario = resolve_scenario(o.scenario);
    const ScenarioReport report = run_scenario(scenario, rules);
    if (o.json) {
        print(simulate_document(scenario, report));
    } else {
        print_grade(scenario.id, report.grade);
        for (std::size_t i = 0; i < report.probes.size(); ++i) {
            const auto& probe = report.probes[i];
            std::cout << "probe " << i << (probe.diff.empty() ? " matches" : " differs") << "\n";
            for (const auto& e : probe.trace.entries) std::cout << "  " << firing_line(e) << "\n";
            for (const auto& f : probe.diff.missing) std::cout << "  missing t=" << f.timestamp << " " << f.action.str() << "\n";
            for (const auto& f : probe.diff.extra) std::cout << "  extra t=" << f.timestamp << " " << f.action.str() << "\n";
        }
        for (const auto& d : report.diagnostics) std::cout << render_diagnostic(d) << "\n";
    }
    bool clean = report.grade.grade.label == Grade::S && report.diagnostics.empty();
    for (const auto& p : report.probes) clean = clean && p.diff.empty();
    return clean ? kClean : kFindings;
}

int cmd_grade(const Options& o) {
    const Scenario scenario = resolve_scenario(o.task);
    const GradeReport report = grade(load_rules(o), scenario.task, scenario.registry);
    if (o.json) {
        print(grade_document(scenario.id, report));
    } else {
        print_grade(scenario.id, report);
    }
    return report.grade.label == Grade::S ? kClean : kFindings;
}

int cmd_import_legacy(const Options& o) {
    const CapabilityRegistry registry = active_registry(o);
    const std::vector<LegacyRule> legacy = load_legacy(read_text_file(o.legacy));
    json reports = json::array();
    bool clean = true;
    std::vector<Rule> converted;
    for (const auto& l : legacy) {
        const ImportReport report = import_legacy(l, registry);
        clean = clean && report.diagnostics.empty();
        if (report.converted) converted.push_back(*report.converted);
        reports.push_back(import_report_to_json(report));
        if (!o.json) {
            for (const auto& d : report.diagnostics) std::cout << "# " << render_diagnostic(d) << "\n";
        }
    }
    if (o.json) {
        print(json{{"imports", reports}});
    } else {
        std::cout << print_rules_file(converted);
    }
    return clean ? kClean : kFindings;
}

volatile std::sig_atomic_t g_stop = 0;

int cmd_serve(const Options& o) {
    ServeConfig config;
    config.host = o.host;
    config.port = o.port;
    config.data_dir = o.data_dir;
    if (!o.registry.empty()) config.registry_path = o.registry;
    auto service = serve(config);
    std::cerr << "listening on http://" << o.host << ":" << service->port() << "/api\n";
    std::signal(SIGINT, [](int) { g_stop = 1; });
    std::signal(SIGTERM, [](int) { g_stop = 1; });
    while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    service->stop();
    return kClean;
}

int exit_code_for(std::exception_ptr error) {
    try {
        std::rethrow_exception(error);
    } catch (const StorageError&) {
        return kIoError;
    } catch (const BindError&) {
        return kIoError;
    } catch (const Error&) {
        return kInvalid;
    } catch (...) {
        return kIoError;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Trigger-action rule toolkit: check, format, analyze, simulate and grade DO/WHEN/WHILE rules"};
    app.require_subcommand(1);
    Options o;

    auto add_registry = [&](CLI::App* c) { c->add_option("--registry", o.registry, "Capability registry file (default: built-in smart-home-v1)"); };
    auto add_rules = [&](CLI::App* c) { c->add_option("--rules", o.rules, "Rules file, one rule per line")->required(); };
    auto add_json = [&](CLI::App* c) { c->add_flag("--json", o.json, "Machine-readable output"); };

    auto* check = app.add_subcommand("check", "Parse and validate a rules file");
    add_registry(check), add_rules(check), add_json(check);
    auto* fmt = app.add_subcommand("fmt", "Print a rules file in canonical form");
    add_rules(fmt), add_json(fmt);
    auto* analyze_cmd = app.add_subcommand("analyze", "Report contradictions, loops and redundancy");
    add_registry(analyze_cmd), add_rules(analyze_cmd), add_json(analyze_cmd);
    auto* simulate = app.add_subcommand("simulate", "Run rules on a scenario or a timeline");
    add_registry(simulate), add_rules(simulate), add_json(simulate);
    simulate->add_option("--scenario", o.scenario, "Built-in scenario id or scenario file");
    simulate->add_option("--timeline", o.timeline, "Timeline file (uses --registry)");
    auto* grade_cmd = app.add_subcommand("grade", "Grade rules against a task");
    add_rules(grade_cmd), add_json(grade_cmd);
    grade_cmd->add_option("--task", o.task, "Built-in task id or scenario file")->required();
    auto* import = app.add_subcommand("import-legacy", "Convert legacy IF-THEN rules");
    add_registry(import), add_json(import);
    import->add_option("file", o.legacy, "Legacy rules file")->required();
    auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP API");
    add_registry(serve_cmd);
    serve_cmd->add_option("--port", o.port, "Port to listen on (0 picks one)");
    serve_cmd->add_option("--host", o.host, "Address to bind");
    serve_cmd->add_option("--data-dir", o.data_dir, "Directory holding rules.json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInvalid;
    }

    try {
        if (check->parsed()) return cmd_check(o);
        if (fmt->parsed()) return cmd_fmt(o);
        if (analyze_cmd->parsed()) return cmd_analyze(o);
        if (simulate->parsed()) return cmd_simulate(o);
        if (grade_cmd->parsed()) return cmd_grade(o);
        if (import->parsed()) return cmd_import_legacy(o);
        if (serve_cmd->parsed()) return cmd_serve(o);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "sensation: " << e.what() << "\n";
        return kInvalid;
    } catch (...) {
        const auto error = std::current_exception();
        const ApiError api = to_api_error(error);
        if (o.json) {
            print(api_error_to_json(api));
        } else {
            std::cerr << "sensation: " << api.what() << "\n";
        }
        return exit_code_for(error);
    }
    return kInvalid;
}
