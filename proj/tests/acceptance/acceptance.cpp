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
// Acceptance suite: one PASS/FAIL line per criterion.
// Usage: acceptance <path-to-sensation-cli>

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

#include "sensation/analyzer.hpp"
#include "sensation/api.hpp"
#include "sensation/dsl.hpp"
#include "sensation/engine.hpp"
#include "sensation/fixtures.hpp"
#include "sensation/io.hpp"
#include "sensation/scenario.hpp"
#include "sensation/store.hpp"
#include "testkit.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sensation;

namespace {

std::string g_cli;

struct Failed {
    std::string what;
};

void require(bool condition, const std::string& what) {
    if (!condition) throw Failed{what};
}

class TempDir {
public:
    TempDir() : path_(fs::temp_directory_path() / ("sensation-acceptance-" + std::to_string(::getpid()) + "-" +
                                                   std::to_string(counter_++))) {
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    const fs::path& path() const { return path_; }

private:
    static inline int counter_ = 0;
    fs::path path_;
};

std::vector<Rule> rules(const std::string& text) { return parse_rules_file(text); }

// ---------------------------------------------------------------------------

std::string fixture_execution() {
    const auto start = std::chrono::steady_clock::now();
    for (const auto& id : fixtures::scenario_ids()) {
        const Scenario s = fixtures::load_builtin_scenario(id);
        const ScenarioReport report = run_scenario(s, s.task.reference_rules);
        require(report.grade.grade.label == Grade::S, id + " reference rules do not grade S");
        require(report.probes.size() == s.expected.size(), id + " probe count");
        for (std::size_t i = 0; i < report.probes.size(); ++i) {
            require(report.probes[i].trace.entries == s.expected[i], id + " probe " + std::to_string(i) + " differs");
        }
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    require(seconds < 5.0, "took " + std::to_string(seconds) + " s");
    std::ostringstream out;
    out << fixtures::scenario_ids().size() << " scenarios in " << static_cast<int>(seconds * 1000) << " ms";
    return out.str();
}

std::string grading_table() {
    const json table = json::parse(fixtures::candidate_table_source());
    require(table.size() >= 12, "fewer than 12 candidate sets");
    std::size_t agree = 0;
    for (const auto& row : table) {
        const Scenario s = fixtures::load_builtin_scenario(row["task"].get<std::string>());
        std::vector<Rule> candidates;
        for (const auto& text : row["rules"]) {
            candidates.push_back(parse_rule(text.get<std::string>()).rule);
            candidates.back().id = "c" + std::to_string(candidates.size());
        }
        const GradeLabel label = grade(candidates, s.task, s.registry).grade;
        const std::string expected = row["expected"].get<std::string>();
        const int expected_score = expected == "S" ? 2 : expected == "P" ? 1 : 0;
        require(std::string(to_string(label.label)) == expected && label.score == expected_score,
                row["description"].get<std::string>() + ": got " + std::string(to_string(label.label)));
        ++agree;
    }

    // Named anchors, with hand-fixed labels and scores.
    auto check = [](const std::string& task, const std::vector<std::string>& texts, Grade want, int score) {
        const Scenario s = fixtures::load_builtin_scenario(task);
        std::vector<Rule> c;
        for (const auto& t : texts) c.push_back(parse_rule(t).rule);
        const GradeLabel got = grade(c, s.task, s.registry).grade;
        require(got.label == want && got.score == score, task + " anchor");
    };
    check("T1", {"DO camera_front.start_recording WHEN doorbell.buzzed"}, Grade::S, 2);
    check("T2",
          {"DO window_1.close THEN window_2.close THEN alarm.arm WHEN weather.rain_started WHILE user.location != home_street"},
          Grade::P, 1);
    const Scenario t3 = fixtures::load_builtin_scenario("T3");
    check("T3", {print_rule(t3.task.reference_rules.front())}, Grade::P, 1);
    check("T2", {"DO window_1.close THEN window_2.close WHEN weather.rain_started"}, Grade::F, 0);
    return std::to_string(agree) + "/" + std::to_string(table.size()) + " candidate sets agree";
}

// Parser -------------------------------------------------------------------

using testkit::coin;
using testkit::pick;

std::string random_ident(testkit::Rng& rng) {
    static const std::set<std::string> keywords{"do", "then", "when", "while", "and", "true", "false"};
    static const std::string first = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_";
    static const std::string rest = first + "0123456789";
    for (;;) {
        std::string s(1, first[pick(rng, first.size())]);
        for (std::size_t n = pick(rng, 8); n > 0; --n) s += rest[pick(rng, rest.size())];
        std::string lower = s;
        for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (!keywords.count(lower)) return s;
    }
}

Value random_literal(testkit::Rng& rng) {
    switch (pick(rng, 4)) {
        case 0: return coin(rng);
        case 1: return static_cast<std::int64_t>(rng());
        case 2: return random_ident(rng);
        default: {
            static const std::string chars = "ab Z09_-.,:\"\\\n\t#@!";
            std::string s;
            for (std::size_t n = pick(rng, 10); n > 0; --n) s += chars[pick(rng, chars.size())];
            return s;
        }
    }
}

Rule random_structural_rule(testkit::Rng& rng) {
    static const Comparator cmps[] = {Comparator::Eq, Comparator::Ne, Comparator::Lt,
                                      Comparator::Gt, Comparator::Le, Comparator::Ge};
    Rule r;
    for (std::size_t n = 1 + pick(rng, 3); n > 0; --n) r.do_part.push_back({random_ident(rng), random_ident(rng)});
    r.when_part = {random_ident(rng), random_ident(rng)};
    for (std::size_t n = pick(rng, 4); n > 0; --n) {
        r.while_part.push_back({random_ident(rng), random_ident(rng), cmps[pick(rng, 6)], random_literal(rng)});
    }
    return r;
}

std::string parser_properties() {
    testkit::Rng rng(7001);
    const int round_trips = 1000;
    for (int i = 0; i < round_trips; ++i) {
        const Rule r = random_structural_rule(rng);
        const std::string text = print_rule(r);
        require(parse_rule(text).rule == r, "round trip: " + text);
    }
    const int fuzz = 10000;
    int rejected = 0;
    for (int i = 0; i < fuzz; ++i) {
        std::string input;
        for (std::size_t n = pick(rng, 64); n > 0; --n) input += static_cast<char>(rng() & 0xff);
        if (i % 2) input = print_rule(random_structural_rule(rng)).substr(0, pick(rng, 40)) + input.substr(0, 4);
        try {
            parse_rule(input);
        } catch (const ParseError&) {
            ++rejected;
        }
    }
    return std::to_string(round_trips) + " round trips, " + std::to_string(fuzz) + " fuzz inputs (" +
           std::to_string(rejected) + " rejected)";
}

// Analyzer -----------------------------------------------------------------

std::vector<std::string> replay(const CapabilityRegistry& r, const std::vector<Rule>& rs, const Assignment& world,
                                const CapabilityRef& event) {
    WorldState w = r.initial_world();
    for (const auto& [k, v] : world) w.values[k] = v;
    const EmissionTrace t =
        run_simulation_from(r, rs, Timeline({{0, EventStimulus{event, json::object()}}}), w, EngineConfig{1});
    std::vector<std::string> out;
    for (const auto& e : t.entries) {
        if (const auto* f = std::get_if<FireEntry>(&e); f && f->depth == 0) out.push_back(f->rule);
    }
    return out;
}

std::string analyzer_oracle() {
    testkit::Rng rng(8080);
    const int pairs = 600;
    int contradictions = 0, redundancies = 0, witnesses = 0;
    for (int i = 0; i < pairs; ++i) {
        const CapabilityRegistry r = testkit::random_registry(rng);
        const auto [a, b] = testkit::random_rule_pair(rng, r);
        const std::vector<Rule> pair{a, b};
        const std::string label = print_rule(a) + " / " + print_rule(b);

        const auto cs = detect_contradictions(pair, r);
        require(!cs.empty() == testkit::oracle_contradiction(a, b, r), "contradiction disagrees: " + label);
        contradictions += !cs.empty();
        for (const auto& d : cs) {
            const auto& w = std::get<ContradictionWitness>(d.witness);
            require(replay(r, pair, w.world, w.event) == std::vector<std::string>{"r1", "r2"},
                    "contradiction witness does not replay: " + label);
            ++witnesses;
        }

        std::set<std::pair<std::string, std::string>> got, want;
        for (const auto& d : detect_redundancy(pair, r)) {
            const auto& w = std::get<RedundancyWitness>(d.witness);
            got.emplace(w.redundant, w.subsumer);
            if (w.world) {
                require(replay(r, pair, *w.world, w.event).size() == 2, "redundancy witness does not replay: " + label);
                ++witnesses;
            }
        }
        if (testkit::oracle_redundant(b, a, r)) want.emplace("r2", "r1");
        if (testkit::oracle_redundant(a, b, r)) want.emplace("r1", "r2");
        require(got == want, "redundancy disagrees: " + label);
        redundancies += !want.empty();
    }
    return std::to_string(pairs) + " pairs, " + std::to_string(contradictions) + " contradictions, " +
           std::to_string(redundancies) + " redundancies, " + std::to_string(witnesses) + " witnesses replayed";
}

// Loops --------------------------------------------------------------------

bool aborts(const CapabilityRegistry& r, const std::vector<Rule>& rs, const WorldState& w, const CapabilityRef& event) {
    return run_simulation_from(r, rs, Timeline({{0, EventStimulus{event, json::object()}}}), w).aborted();
}

/// detect_loops reports an error-severity cycle iff some single-event
/// stimulus aborts. Error cycles must abort from their witness world;
/// otherwise no event may abort from any world over the read attributes.
void check_loop_coherence(const CapabilityRegistry& r, const std::vector<Rule>& rs, const std::string& name) {
    bool firing_cycle = false;
    for (const auto& d : detect_loops(rs, r)) {
        const auto& w = std::get<LoopWitness>(d.witness);
        require((d.severity == Severity::Error) == w.world.has_value(), name + ": severity and witness disagree");
        if (!w.world) continue;
        firing_cycle = true;
        WorldState world = r.initial_world();
        for (const auto& [k, v] : *w.world) world.values[k] = v;
        require(aborts(r, rs, world, w.events.back()), name + ": reported cycle does not abort");
    }
    if (firing_cycle) return;
    std::vector<CapabilityRef> events;
    for (const auto* c : testkit::capabilities_of(r, CapabilityKind::Event)) events.push_back(c->ref());
    testkit::for_each_world(r, testkit::read_keys(rs), [&](const WorldState& w) {
        for (const auto& e : events) require(!aborts(r, rs, w, e), name + ": unreported loop aborts on " + e.str());
    });
}

std::string loop_coherence() {
    const CapabilityRegistry& home = fixtures::smart_home();
    const auto window = rules("DO window_1.close WHEN window_1.opened\nDO window_1.open WHEN window_1.closed\n");
    const EmissionTrace t = run_simulation(home, window, Timeline({{0, EventStimulus{{"window_1", "opened"}, json::object()}}}));
    require(t.aborted(), "window pair does not abort");
    require(std::get<LoopAborted>(t.entries.back()).depth == 16, "window pair aborts at the wrong depth");

    const std::vector<std::pair<std::string, std::string>> seeded{
        {"window pair", "DO window_1.close WHEN window_1.opened\nDO window_1.open WHEN window_1.closed\n"},
        {"self loop", "DO alarm.arm WHEN alarm.armed_on\n"},
        {"three cycle",
         "DO window_2.open WHEN window_1.opened\nDO alarm.arm WHEN window_2.opened\nDO window_1.open WHEN alarm.armed_on\n"},
        {"gated", "DO window_1.close WHEN window_1.opened WHILE alarm.armed = true\nDO window_1.open WHEN window_1.closed\n"},
        {"blocked",
         "DO window_1.close WHEN window_1.opened\nDO window_1.open WHEN window_1.closed WHILE window_1.is_open = true\n"},
        {"chain", "DO window_1.open WHEN doorbell.buzzed\nDO alarm.arm WHEN window_1.opened\n"},
    };
    int cases = 0;
    for (const auto& [name, text] : seeded) {
        check_loop_coherence(home, rules(text), name);
        ++cases;
    }
    for (const auto& id : fixtures::scenario_ids()) {
        const Scenario s = fixtures::load_builtin_scenario(id);
        check_loop_coherence(s.registry, s.task.reference_rules, id);
        ++cases;
    }
    testkit::Rng rng(616);
    for (int i = 0; i < 200; ++i) {
        const CapabilityRegistry r = testkit::random_registry(rng, 2000);
        std::vector<Rule> rs;
        for (int n = 1; n <= 4; ++n) rs.push_back(testkit::random_rule(rng, r, "r" + std::to_string(n)));
        check_loop_coherence(r, rs, "random set " + std::to_string(i));
        ++cases;
    }
    return std::to_string(cases) + " rule sets; window pair aborts at depth 16";
}

// Legacy -------------------------------------------------------------------

std::string legacy_import() {
    const CapabilityRegistry& home = fixtures::smart_home();
    const fs::path dir = fs::path(SENSATION_FIXTURE_DIR) / "legacy";
    auto only = [&](const std::string& file) {
        const auto legacy = load_legacy(read_text_file((dir / file).string()));
        require(legacy.size() == 1, file + ": expected one rule");
        return import_legacy(legacy.front(), home);
    };
    const ImportReport two = only("two_events.json");
    require(!two.converted && two.diagnostics.size() == 1 && two.diagnostics[0].kind == DiagnosticKind::TimeWindowFallacy,
            "two-event trigger is not a TimeWindowFallacy");
    const ImportReport state = only("state_only.json");
    require(!state.converted && state.diagnostics.size() == 1 &&
                state.diagnostics[0].kind == DiagnosticKind::FlippedTrigger,
            "state-only trigger is not a FlippedTrigger");
    const ImportReport t4 = only("t4_open_door.json");
    require(t4.converted.has_value() && t4.diagnostics.empty(), "one-event rule did not convert");
    const Scenario s = fixtures::load_builtin_scenario("T4");
    const std::vector<Rule> converted{*t4.converted};
    require(grade(converted, s.task, s.registry).grade.label == Grade::S, "converted rule does not grade S on T4");
    return "TimeWindowFallacy, FlippedTrigger, T4 conversion grades S";
}

// Determinism --------------------------------------------------------------

std::string determinism() {
    std::size_t traces = 0;
    for (const auto& id : fixtures::scenario_ids()) {
        const Scenario s = fixtures::load_builtin_scenario(id);
        for (const auto& probe : s.probes) {
            const std::string first = trace_to_json(run_simulation(s.registry, s.task.reference_rules, probe)).dump();
            for (int i = 1; i < 100; ++i) {
                require(trace_to_json(run_simulation(s.registry, s.task.reference_rules, probe)).dump() == first,
                        id + " trace differs on run " + std::to_string(i));
            }
            ++traces;
        }
    }
    return std::to_string(traces) + " probe traces x 100 runs identical";
}

// Service ------------------------------------------------------------------

std::string run_cli(const std::string& args) {
    const std::string command = g_cli + " " + args + " 2>/dev/null";
    FILE* pipe = ::popen(command.c_str(), "r");
    require(pipe != nullptr, "cannot run " + g_cli);
    std::string out;
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
    ::pclose(pipe);
    return out;
}

struct InjectedFault {};

std::string service_coherence() {
    TempDir dir;
    const std::vector<std::string> lines{
        "DO window_1.close THEN window_2.close WHEN weather.rain_started WHILE user.location != home_street",
        "DO door_front.open_door WHEN camera_front.person_approaching WHILE user.location = home_street",
        "DO door_front.lock WHEN camera_front.person_approaching",
        "DO camera_front.start_recording WHEN doorbell.buzzed",
        "DO window_1.close WHEN window_1.opened",
        "DO window_1.open WHEN window_1.closed"};
    const fs::path rules_file = dir.path() / "rules.txt";
    {
        std::ofstream out(rules_file);
        for (const auto& l : lines) out << l << "\n";
    }
    Api api(fixtures::smart_home(), dir.path() / "data");
    for (const auto& l : lines) {
        require(api.handle({"POST", "/api/rules", {}, json{{"dsl", l}}.dump()}).status == 201, "POST /api/rules failed");
    }
    int compared = 0;
    const std::string r = " --rules " + rules_file.string() + " --json";
    for (const auto& id : fixtures::scenario_ids()) {
        require(run_cli("simulate --scenario " + id + r) ==
                    api.handle({"POST", "/api/simulate", {}, json{{"scenario", id}}.dump()}).body,
                "simulate " + id + " differs");
        require(run_cli("grade --task " + id + r) ==
                    api.handle({"POST", "/api/grade", {}, json{{"task", id}}.dump()}).body,
                "grade " + id + " differs");
        compared += 2;
    }
    require(run_cli("analyze" + r) == api.handle({"POST", "/api/analyze", {}, "{}"}).body, "analyze differs");
    ++compared;

    // Injected failures at each write stage.
    int injected = 0;
    for (WriteStage stage : {WriteStage::TempOpened, WriteStage::TempWritten, WriteStage::TempSynced, WriteStage::Renamed}) {
        TempDir store_dir;
        StoreSnapshot before;
        {
            RuleStore store(store_dir.path(), fixtures::smart_home());
            store.add(parse_rule(lines[0]).rule);
            before = store.snapshot();
            store.set_fault_hook([stage](WriteStage s) {
                if (s == stage) throw InjectedFault{};
            });
            try {
                store.add(parse_rule(lines[1]).rule);
                require(false, "fault hook did not fire");
            } catch (const InjectedFault&) {
            }
        }
        const StoreSnapshot on_disk =
            store_from_json(json::parse(read_text_file((store_dir.path() / "rules.json").string())));
        require(stage == WriteStage::Renamed ? on_disk.revision == 2 : on_disk == before, "document changed by failed write");
        RuleStore reopened(store_dir.path(), fixtures::smart_home());
        ++injected;
    }

    // Processes killed mid-write.
    TempDir crash_dir;
    { RuleStore init(crash_dir.path(), fixtures::smart_home()); }
    testkit::Rng rng(31);
    const int kills = 20;
    for (int round = 0; round < kills; ++round) {
        const pid_t child = ::fork();
        require(child >= 0, "fork failed");
        if (child == 0) {
            try {
                RuleStore store(crash_dir.path(), fixtures::smart_home());
                for (std::size_t i = 0;; ++i) {
                    const auto added = store.add(parse_rule(lines[i % lines.size()]).rule);
                    if (i % 3 == 0) store.remove(added.id);
                }
            } catch (...) {
            }
            ::_exit(1);
        }
        std::this_thread::sleep_for(std::chrono::microseconds(200 + rng() % 4000));
        ::kill(child, SIGKILL);
        int status = 0;
        ::waitpid(child, &status, 0);
        store_from_json(json::parse(read_text_file((crash_dir.path() / "rules.json").string())));
        RuleStore reopened(crash_dir.path(), fixtures::smart_home());
    }
    return std::to_string(compared) + " CLI/API documents byte-equal, " + std::to_string(injected) +
           " injected faults, " + std::to_string(kills) + " kills; rules.json intact";
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: acceptance <sensation-cli>\n";
        return 2;
    }
    g_cli = argv[1];

    const std::vector<std::pair<std::string, std::string (*)()>> criteria{
        {"fixture-execution", fixture_execution},   {"grading-table", grading_table},
        {"parser-properties", parser_properties},   {"analyzer-oracle", analyzer_oracle},
        {"loop-coherence", loop_coherence},         {"legacy-import", legacy_import},
        {"engine-determinism", determinism},        {"service-coherence", service_coherence},
    };
    int failures = 0;
    for (const auto& [name, run] : criteria) {
        std::string line;
        try {
            line = "PASS " + name + ": " + run();
        } catch (const Failed& f) {
            line = "FAIL " + name + ": " + f.what;
            ++failures;
        } catch (const std::exception& e) {
            line = "FAIL " + name + ": " + e.what();
            ++failures;
        }
        std::cout << line << std::endl;
    }
    std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed" << std::endl;
    return failures == 0 ? 0 : 1;
}
