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
#include <gtest/gtest.h>

#include <limits>
#include <stdexcept>

#include "sensation/dsl.hpp"
#include "sensation/engine.hpp"
#include "sensation/fixtures.hpp"
#include "testkit.hpp"

namespace sensation {
namespace {

const CapabilityRegistry& home() { return fixtures::smart_home(); }

std::vector<Rule> rules(const std::string& text) { return parse_rules_file(text); }

Stimulus event_at(std::int64_t t, std::string device, std::string capability) {
    return {t, EventStimulus{{std::move(device), std::move(capability)}, nlohmann::json::object()}};
}

Stimulus set_at(std::int64_t t, std::string device, std::string attribute, Value v) {
    return {t, StateEffect{std::move(device), std::move(attribute), std::move(v)}};
}

std::vector<FireEntry> fires(const EmissionTrace& trace) {
    std::vector<FireEntry> out;
    for (const auto& e : trace.entries) {
        if (const auto* f = std::get_if<FireEntry>(&e)) out.push_back(*f);
    }
    return out;
}

const std::string kT2 =
    "DO window_1.close THEN window_2.close WHEN weather.rain_started WHILE user.location != home_street\n";
const std::string kWindowLoop = "DO window_1.close WHEN window_1.opened\nDO window_1.open WHEN window_1.closed\n";

TEST(Simulate, T2FiresWhenAway) {
    const Timeline away({set_at(1000, "user", "location", std::string("away")), event_at(2000, "weather", "rain_started")});
    const auto f = fires(run_simulation(home(), rules(kT2), away));
    ASSERT_EQ(f.size(), 1u);
    EXPECT_EQ(f[0].timestamp, 2000);
    EXPECT_EQ(f[0].depth, 0);
    EXPECT_EQ(f[0].actions, (std::vector<ActionRef>{{"window_1", "close"}, {"window_2", "close"}}));

    const Timeline home_street(
        {set_at(1000, "user", "location", std::string("home_street")), event_at(2000, "weather", "rain_started")});
    EXPECT_TRUE(run_simulation(home(), rules(kT2), home_street).entries.empty());
}

TEST(Simulate, WindowLoopAbortsAtDepth16) {
    const Timeline t({event_at(0, "window_1", "opened")});
    const EmissionTrace trace = run_simulation(home(), rules(kWindowLoop), t);
    ASSERT_TRUE(trace.aborted());
    const auto& last = std::get<LoopAborted>(trace.entries.back());
    EXPECT_EQ(last.depth, 16);
    EXPECT_EQ(last.pending, (std::vector<EventRef>{{"window_1", "closed"}}));
    EXPECT_EQ(last.chain.size(), 17u);

    // Oracle: the unbounded interpreter keeps alternating to depth 20.
    const auto oracle = testkit::interpret(home(), rules(kWindowLoop), home().initial_world(), {"window_1", "opened"}, 20);
    EXPECT_TRUE(oracle.exceeded);
    ASSERT_EQ(oracle.firings.size(), 21u);
    for (int d = 0; d <= 20; ++d) EXPECT_EQ(oracle.firings[d], (testkit::Firing{d, d % 2 == 0 ? "r1" : "r2"}));

    const auto f = fires(trace);
    ASSERT_EQ(f.size(), 17u);
    for (int d = 0; d <= 16; ++d) {
        EXPECT_EQ(f[d].depth, oracle.firings[d].depth);
        EXPECT_EQ(f[d].rule, oracle.firings[d].rule);
    }
}

TEST(Simulate, CustomDepthBound) {
    const Timeline t({event_at(0, "window_1", "opened")});
    const EmissionTrace trace = run_simulation(home(), rules(kWindowLoop), t, EngineConfig{3});
    EXPECT_EQ(fires(trace).size(), 4u);
    EXPECT_EQ(std::get<LoopAborted>(trace.entries.back()).depth, 3);
    EXPECT_THROW(run_simulation(home(), rules(kWindowLoop), t, EngineConfig{0}), std::invalid_argument);
}

TEST(Simulate, FanOutStopsAtEventBudget) {
    // Each armed_on fires one rule that emits two more.
    const auto rs = rules("DO alarm.arm THEN alarm.arm WHEN alarm.armed_on\n");
    const Timeline t({event_at(0, "alarm", "armed_on")});
    for (std::size_t budget : {std::size_t{1}, std::size_t{100}, EngineConfig{}.max_cascade_events}) {
        EngineConfig config;
        config.max_cascade_events = budget;
        // Level d holds 2^d events; find the first level that overflows.
        std::size_t total = 0;
        int last = -1;
        for (int d = 0; d <= config.max_cascade_depth; ++d) {
            total += std::size_t{1} << d;
            if (total > budget) break;
            last = d;
        }
        const EmissionTrace trace = run_simulation(home(), rs, t, config);
        ASSERT_TRUE(trace.aborted());
        const auto& abort = std::get<LoopAborted>(trace.entries.back());
        EXPECT_EQ(abort.depth, last) << budget;
        EXPECT_EQ(abort.pending.size(), std::size_t{1} << (last + 1));
        EXPECT_EQ(fires(trace).size(), (std::size_t{1} << (last + 1)) - 1);
    }
}

TEST(Dispatch, NoMatchingRule) {
    const WorldState w = home().initial_world();
    const auto r = dispatch_event(home(), w, {}, {{"window_1", "opened"}, {}}, 0);
    EXPECT_TRUE(r.fired.empty());
    EXPECT_TRUE(r.enqueued.empty());
    EXPECT_EQ(r.world.at({"window_1", "is_open"}), Value(true));
    EXPECT_THROW(dispatch_event(home(), w, {}, {{"window_1", "opened"}, {}}, 17), DepthExceeded);
}

TEST(Dispatch, AscendingIdOrderForEveryInputOrder) {
    std::vector<Rule> rs = rules(
        "@r10: DO alarm.arm WHEN doorbell.buzzed\n"
        "@r2: DO camera_front.start_recording WHEN doorbell.buzzed\n"
        "@r1: DO window_1.close WHEN doorbell.buzzed\n");
    std::sort(rs.begin(), rs.end(), [](const Rule& a, const Rule& b) { return a.id < b.id; });
    int orderings = 0;
    do {
        const auto r = dispatch_event(home(), home().initial_world(), rs, {{"doorbell", "buzzed"}, {}}, 0);
        std::vector<std::string> ids;
        for (const auto& f : r.fired) ids.push_back(f.rule);
        EXPECT_EQ(ids, (std::vector<std::string>{"r1", "r2", "r10"}));
        ++orderings;
    } while (std::next_permutation(rs.begin(), rs.end(), [](const Rule& a, const Rule& b) { return a.id < b.id; }));
    EXPECT_EQ(orderings, 6);
}

TEST(Dispatch, WhileSeesIntrinsicEffects) {
    const auto rs = rules("DO alarm.arm WHEN window_1.opened WHILE window_1.is_open = true\n");
    const auto r = dispatch_event(home(), home().initial_world(), rs, {{"window_1", "opened"}, {}}, 0);
    ASSERT_EQ(r.fired.size(), 1u);
    EXPECT_EQ(r.enqueued, (std::vector<PendingEvent>{{{"alarm", "armed_on"}, {"r1"}}}));
}

TEST(Dispatch, SelectionUsesOneSnapshot) {
    // r1 arms the alarm; r2 requires it disarmed. Both are selected on the
    // snapshot before r1's actions run.
    const auto rs = rules(
        "DO alarm.arm WHEN doorbell.buzzed\n"
        "DO camera_front.start_recording WHEN doorbell.buzzed WHILE alarm.armed = false\n");
    const auto r = dispatch_event(home(), home().initial_world(), rs, {{"doorbell", "buzzed"}, {}}, 0);
    ASSERT_EQ(r.fired.size(), 2u);
    EXPECT_EQ(r.world.at({"alarm", "armed"}), Value(true));
}

TEST(Dispatch, ActionEffectsApplyInSequence) {
    const auto rs = rules("DO door_front.unlock THEN door_front.open_door THEN door_front.lock WHEN doorbell.buzzed\n");
    const auto r = dispatch_event(home(), home().initial_world(), rs, {{"doorbell", "buzzed"}, {}}, 0);
    ASSERT_EQ(r.fired.size(), 1u);
    EXPECT_EQ(r.world.at({"door_front", "locked"}), Value(true));
    EXPECT_EQ(r.world.at({"door_front", "is_open"}), Value(true));
    EXPECT_GE(r.fired[0].effects.size(), 3u);
}

TEST(Simulate, SnapshotIncludesEarlierSameTimestampStimuli) {
    const auto rs = rules("DO window_1.close WHEN weather.rain_started WHILE alarm.armed = true\n");
    const Timeline before({set_at(5, "alarm", "armed", true), event_at(5, "weather", "rain_started")});
    const Timeline after({event_at(5, "weather", "rain_started"), set_at(5, "alarm", "armed", true)});
    EXPECT_EQ(fires(run_simulation(home(), rs, before)).size(), 1u);
    EXPECT_EQ(fires(run_simulation(home(), rs, after)).size(), 0u);
}

TEST(Simulate, CascadeIsBreadthFirst) {
    const auto rs = rules(
        "DO alarm.arm THEN window_1.close WHEN doorbell.buzzed\n"
        "DO camera_front.start_recording WHEN alarm.armed_on\n"
        "DO camera_front.stop_recording WHEN window_1.closed\n");
    const auto f = fires(run_simulation(home(), rs, Timeline({event_at(1, "doorbell", "buzzed")})));
    ASSERT_EQ(f.size(), 3u);
    EXPECT_EQ(f[0].depth, 0);
    EXPECT_EQ(f[1].rule, "r2");
    EXPECT_EQ(f[1].depth, 1);
    EXPECT_EQ(f[2].rule, "r3");
    EXPECT_EQ(f[2].depth, 1);
    EXPECT_EQ(f[2].trigger, (EventRef{"window_1", "closed"}));
}

TEST(Simulate, NoRulesLaw) {
    testkit::Rng rng(17);
    for (int i = 0; i < 200; ++i) {
        const CapabilityRegistry r = testkit::random_registry(rng);
        auto events = testkit::capabilities_of(r, CapabilityKind::Event);
        auto keys = testkit::all_attribute_keys(r);
        std::vector<Stimulus> stimuli;
        WorldState expected = r.initial_world();
        std::int64_t t = 0;
        for (std::size_t n = testkit::pick(rng, 10); n > 0; --n) {
            t += static_cast<std::int64_t>(testkit::pick(rng, 3));
            if (testkit::coin(rng)) {
                const Capability* e = events[testkit::pick(rng, events.size())];
                stimuli.push_back({t, EventStimulus{e->ref(), nullptr}});
                testkit::apply(expected, e->effects);
            } else {
                const AttributeKey& k = keys[testkit::pick(rng, keys.size())];
                const auto values = testkit::domain_values(r.find_attribute(k)->domain);
                const Value v = values[testkit::pick(rng, values.size())];
                stimuli.push_back({t, StateEffect{k.device, k.attribute, v}});
                expected.values[k] = v;
            }
        }
        expected.clock = stimuli.empty() ? 0 : t;
        const EmissionTrace trace = run_simulation(r, {}, Timeline(stimuli));
        EXPECT_TRUE(trace.entries.empty());
        EXPECT_EQ(trace.final_world.values, expected.values);
    }
}

TEST(Simulate, MatchesReferenceInterpreter) {
    testkit::Rng rng(23);
    int aborted = 0;
    for (int i = 0; i < 400; ++i) {
        const CapabilityRegistry r = testkit::random_registry(rng);
        std::vector<Rule> rs;
        for (std::size_t n = 1 + testkit::pick(rng, 5); n > 0; --n) rs.push_back(testkit::random_rule(rng, r, "r" + std::to_string(n)));
        auto events = testkit::capabilities_of(r, CapabilityKind::Event);
        const CapabilityRef e = events[testkit::pick(rng, events.size())]->ref();
        // Depth bound only; the interpreter has no event budget.
        const EngineConfig config{1 + static_cast<int>(testkit::pick(rng, 6)), std::numeric_limits<std::size_t>::max()};
        const EmissionTrace trace = run_simulation(r, rs, Timeline({{0, EventStimulus{e, nullptr}}}), config);
        const auto oracle = testkit::interpret(r, rs, r.initial_world(), e, config.max_cascade_depth);
        EXPECT_EQ(trace.aborted(), oracle.exceeded);
        aborted += oracle.exceeded;
        const auto f = fires(trace);
        ASSERT_EQ(f.size(), oracle.firings.size());
        for (std::size_t k = 0; k < f.size(); ++k) {
            EXPECT_EQ(f[k].depth, oracle.firings[k].depth);
            EXPECT_EQ(f[k].rule, oracle.firings[k].rule);
            EXPECT_LE(f[k].depth, config.max_cascade_depth);
        }
        if (!oracle.exceeded) EXPECT_EQ(trace.final_world.values, oracle.world.values);
        // Unbounded run agrees on whether the cascade ever stops.
        if (!trace.aborted()) EXPECT_FALSE(testkit::interpret(r, rs, r.initial_world(), e, 2 * config.max_cascade_depth).exceeded);
    }
    EXPECT_GT(aborted, 0);
}

TEST(Simulate, DeterministicAndOrdered) {
    const auto rs = rules(kT2 + kWindowLoop);
    const Timeline t({set_at(0, "user", "location", std::string("away")), event_at(10, "weather", "rain_started"),
                      event_at(10, "window_1", "opened"), event_at(20, "doorbell", "buzzed")});
    const std::string first = trace_to_json(run_simulation(home(), rs, t)).dump();
    for (int i = 0; i < 20; ++i) EXPECT_EQ(trace_to_json(run_simulation(home(), rs, t)).dump(), first);

    const EmissionTrace trace = run_simulation(home(), rs, t);
    std::int64_t last_t = 0;
    int last_depth = 0;
    for (const auto& e : trace.entries) {
        const std::int64_t ts = std::visit([](const auto& x) { return x.timestamp; }, e);
        const int depth = std::visit([](const auto& x) { return x.depth; }, e);
        ASSERT_GE(ts, last_t);
        // Depth restarts at 0 for each stimulus.
        if (ts == last_t && depth != 0) EXPECT_GE(depth, last_depth);
        last_t = ts;
        last_depth = depth;
    }
}

TEST(Timeline, RejectsDecreasingTimestamps) {
    EXPECT_THROW(Timeline({event_at(5, "doorbell", "buzzed"), event_at(4, "doorbell", "buzzed")}), TimelineError);
    EXPECT_THROW(load_timeline(R"([{"t": 5, "event": {"device": "doorbell", "capability": "buzzed"}},
                                   {"t": 1, "event": {"device": "doorbell", "capability": "buzzed"}}])"),
                 TimelineError);
}

TEST(Timeline, CheckedAgainstRegistry) {
    EXPECT_THROW(check_timeline(Timeline({event_at(0, "doorbell", "rang")}), home()), TimelineError);
    EXPECT_THROW(check_timeline(Timeline({event_at(0, "window_1", "open")}), home()), TimelineError);
    EXPECT_THROW(check_timeline(Timeline({set_at(0, "weather", "temperature", std::int64_t{99})}), home()), TimelineError);
    EXPECT_NO_THROW(check_timeline(Timeline({set_at(0, "weather", "temperature", std::int64_t{30})}), home()));
}

TEST(Timeline, JsonRoundTrip) {
    const Timeline t({set_at(0, "user", "location", std::string("away")), event_at(3, "doorbell", "buzzed")});
    EXPECT_EQ(timeline_from_json(timeline_to_json(t)), t);
}

TEST(Trace, JsonRoundTrip) {
    const EmissionTrace trace =
        run_simulation(home(), rules(kWindowLoop), Timeline({event_at(0, "window_1", "opened")}));
    EXPECT_EQ(trace_entries_from_json(trace_entries_to_json(trace.entries)), trace.entries);
    const auto j = trace_to_json(trace);
    EXPECT_TRUE(j.contains("entries"));
    EXPECT_TRUE(j.contains("final_world"));
}

TEST(Simulate, RejectsInvalidRules) {
    EXPECT_THROW(run_simulation(home(), rules("DO window_1.close WHEN alarm.armed\n"), Timeline()), ValidationError);
}

}  // namespace
}  // namespace sensation
