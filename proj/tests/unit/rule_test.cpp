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

#include "sensation/dsl.hpp"
#include "sensation/fixtures.hpp"
#include "sensation/rule.hpp"
#include "testkit.hpp"

namespace sensation {
namespace {

Rule rule(const std::string& text, const std::string& id = "c1") {
    Rule r = parse_rule(text).rule;
    r.id = id;
    return r;
}

const Scenario& scenario(const std::string& id) {
    static std::map<std::string, Scenario> cache;
    auto it = cache.find(id);
    if (it == cache.end()) it = cache.emplace(id, fixtures::load_builtin_scenario(id)).first;
    return it->second;
}

TEST(Validate, SpecExamples) {
    const CapabilityRegistry& r = fixtures::smart_home();
    EXPECT_TRUE(validate_rule(rule("DO camera_front.start_recording WHEN doorbell.buzzed"), r).ok());

    const auto flipped = validate_rule(rule("DO window_1.close WHEN alarm.armed"), r);
    ASSERT_EQ(flipped.violations.size(), 1u);
    EXPECT_EQ(flipped.violations[0].part, RulePart::When);
    EXPECT_EQ(flipped.violations[0].kind, ViolationKind::KindMismatch);

    const auto ordered = validate_rule(rule("DO window_1.close WHEN weather.rain_started WHILE weather.condition < rain"), r);
    ASSERT_EQ(ordered.violations.size(), 1u);
    EXPECT_EQ(ordered.violations[0].part, RulePart::While);
    EXPECT_EQ(ordered.violations[0].index, 0u);
    EXPECT_EQ(ordered.violations[0].kind, ViolationKind::Incomparable);
}

TEST(Validate, ReportsEveryPart) {
    const CapabilityRegistry& r = fixtures::smart_home();
    const auto report = validate_rule(
        rule("DO doorbell.buzzed THEN window_9.close WHEN window_1.close WHILE weather.temperature = 99 AND "
             "user.location = mars"),
        r);
    std::vector<std::pair<RulePart, ViolationKind>> got;
    for (const auto& v : report.violations) got.emplace_back(v.part, v.kind);
    const std::vector<std::pair<RulePart, ViolationKind>> want{
        {RulePart::Do, ViolationKind::KindMismatch},   {RulePart::Do, ViolationKind::Unresolved},
        {RulePart::When, ViolationKind::KindMismatch}, {RulePart::While, ViolationKind::OutOfDomain},
        {RulePart::While, ViolationKind::OutOfDomain},
    };
    EXPECT_EQ(got, want);
    EXPECT_EQ(report.violations[1].index, 1u);
}

TEST(Validate, RequireValidThrows) {
    const std::vector<Rule> rules{rule("DO window_1.close WHEN alarm.armed", "r7")};
    try {
        require_valid(rules, fixtures::smart_home());
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.rule_id(), "r7");
    }
}

TEST(Canonicalize, SpecExamples) {
    const Rule messy = rule("DO window_1.close WHEN weather.rain_started WHILE user.location != home_street AND "
                            "alarm.armed = true AND alarm.armed = true");
    const Rule c = canonicalize(messy);
    ASSERT_EQ(c.while_part.size(), 2u);
    EXPECT_EQ(c.while_part[0].device, "alarm");
    EXPECT_EQ(c.while_part[1].device, "user");
    EXPECT_EQ(canonicalize(c), c);

    const Rule seq = rule("DO window_2.close THEN window_1.close WHEN weather.rain_started");
    EXPECT_EQ(canonicalize(seq).do_part, seq.do_part);
}

TEST(Canonicalize, IdempotentOnRandomRules) {
    testkit::Rng rng(5);
    for (int i = 0; i < 500; ++i) {
        const CapabilityRegistry r = testkit::random_registry(rng);
        const Rule x = testkit::random_rule(rng, r, "r1");
        const Rule c = canonicalize(x);
        EXPECT_EQ(canonicalize(c), c);
        EXPECT_TRUE(std::is_sorted(c.while_part.begin(), c.while_part.end()));
        EXPECT_EQ(std::adjacent_find(c.while_part.begin(), c.while_part.end()), c.while_part.end());
        EXPECT_EQ(c.do_part, x.do_part);
    }
}

TEST(RuleJson, RoundTrip) {
    testkit::Rng rng(9);
    for (int i = 0; i < 300; ++i) {
        const CapabilityRegistry r = testkit::random_registry(rng);
        const Rule x = testkit::random_rule(rng, r, "r" + std::to_string(i));
        EXPECT_EQ(rule_from_json(rule_to_json(x)), x);
    }
    EXPECT_THROW(rule_from_json(nlohmann::json::parse(R"({"do": [], "when": {"device": "a", "capability": "b"}})")),
                 SyntaxError);
}

TEST(Grade, SpecExamples) {
    {
        const auto& t1 = scenario("T1");
        const std::vector<Rule> c{rule("DO camera_front.start_recording WHEN doorbell.buzzed")};
        const auto g = grade(c, t1.task, t1.registry).grade;
        EXPECT_EQ(g.label, Grade::S);
        EXPECT_EQ(g.score, 2);
    }
    const auto& t2 = scenario("T2");
    {
        const std::vector<Rule> c{rule("DO window_1.close THEN window_2.close THEN alarm.arm WHEN weather.rain_started "
                                       "WHILE user.location != home_street")};
        const auto report = grade(c, t2.task, t2.registry);
        EXPECT_EQ(report.grade.label, Grade::P);
        EXPECT_EQ(report.grade.score, 1);
        EXPECT_EQ(report.matches[0].match, MatchClass::Partial);
    }
    {
        const std::vector<Rule> c{rule("DO window_1.close THEN window_2.close WHEN weather.rain_started")};
        const auto report = grade(c, t2.task, t2.registry);
        EXPECT_EQ(report.grade.label, Grade::F);
        EXPECT_EQ(report.grade.score, 0);
    }
    {
        const auto& t3 = scenario("T3");
        const std::vector<Rule> c{rule("DO window_1.close THEN window_2.close WHEN alarm.armed_on")};
        EXPECT_EQ(grade(c, t3.task, t3.registry).grade.label, Grade::P);
    }
}

// Independent statement of the three match classes for one candidate and
// one reference, used to confirm classify_match case by case.
MatchClass match_by_definition(const Rule& cand, const Rule& ref, bool ordered) {
    const Rule c = canonicalize(cand);
    const Rule r = canonicalize(ref);
    const bool same_do = ordered ? c.do_part == r.do_part
                                 : testkit::sub_multiset(c.do_part, r.do_part) &&
                                       testkit::sub_multiset(r.do_part, c.do_part);
    if (c.when_part == r.when_part && c.while_part == r.while_part && same_do) return MatchClass::Exact;
    const bool while_sup = std::includes(c.while_part.begin(), c.while_part.end(), r.while_part.begin(), r.while_part.end());
    const bool extras = c.while_part.size() > r.while_part.size() || c.do_part.size() > r.do_part.size();
    if (c.when_part == r.when_part && while_sup && testkit::sub_multiset(r.do_part, c.do_part) && extras) {
        return MatchClass::Partial;
    }
    return MatchClass::Miss;
}

TEST(Grade, ClassifyAgreesWithDefinition) {
    testkit::Rng rng(21);
    int partial = 0, exact = 0;
    for (int i = 0; i < 2000; ++i) {
        const CapabilityRegistry r = testkit::random_registry(rng);
        auto [a, b] = testkit::random_rule_pair(rng, r);
        for (bool ordered : {false, true}) {
            const MatchClass m = classify_match(b, a, ordered);
            EXPECT_EQ(m, match_by_definition(b, a, ordered));
            partial += m == MatchClass::Partial;
            exact += m == MatchClass::Exact;
        }
    }
    EXPECT_GT(partial, 50);
    EXPECT_GT(exact, 50);
}

TEST(Grade, OrderedDo) {
    ReferenceTask task{"x", "", {rule("DO window_1.close THEN window_2.close WHEN weather.rain_started", "r1")}, {true}};
    const std::vector<Rule> swapped{rule("DO window_2.close THEN window_1.close WHEN weather.rain_started")};
    EXPECT_EQ(grade(swapped, task, fixtures::smart_home()).grade.label, Grade::F);
    task.ordered_do = {false};
    EXPECT_EQ(grade(swapped, task, fixtures::smart_home()).grade.label, Grade::S);
}

TEST(Grade, InvalidCandidateThrows) {
    const auto& t1 = scenario("T1");
    const std::vector<Rule> c{rule("DO camera_front.start_recording WHEN alarm.armed")};
    EXPECT_THROW(grade(c, t1.task, t1.registry), InvalidCandidate);
}

TEST(Grade, SelfGradingIsS) {
    for (const auto& id : fixtures::scenario_ids()) {
        const auto& s = scenario(id);
        EXPECT_EQ(grade(s.task.reference_rules, s.task, s.registry).grade.label, Grade::S) << id;
    }
}

std::vector<Rule> mutate(testkit::Rng& rng, std::vector<Rule> rules, const CapabilityRegistry& r) {
    const std::size_t n = testkit::pick(rng, 3);
    for (std::size_t k = 0; k < n && !rules.empty(); ++k) {
        Rule& x = rules[testkit::pick(rng, rules.size())];
        switch (testkit::pick(rng, 5)) {
            case 0: x.while_part.push_back(testkit::random_predicate(rng, r)); break;
            case 1: x.do_part.push_back(testkit::random_rule(rng, r, "x").do_part[0]); break;
            case 2:
                if (!x.while_part.empty()) x.while_part.pop_back();
                break;
            case 3: x.when_part = testkit::random_rule(rng, r, "x").when_part; break;
            default: rules.push_back(testkit::random_rule(rng, r, "x")); break;
        }
    }
    for (std::size_t i = 0; i < rules.size(); ++i) rules[i].id = "c" + std::to_string(i + 1);
    return rules;
}

TEST(Grade, PermutationInvariant) {
    testkit::Rng rng(31);
    for (const auto& id : fixtures::scenario_ids()) {
        const auto& s = scenario(id);
        for (int i = 0; i < 100; ++i) {
            std::vector<Rule> cand = mutate(rng, s.task.reference_rules, s.registry);
            const Grade want = grade(cand, s.task, s.registry).grade.label;
            std::shuffle(cand.begin(), cand.end(), rng);
            for (auto& c : cand) std::shuffle(c.while_part.begin(), c.while_part.end(), rng);
            EXPECT_EQ(grade(cand, s.task, s.registry).grade.label, want);
        }
    }
}

TEST(Grade, SNeverCoexistsWithPartial) {
    testkit::Rng rng(37);
    for (const auto& id : fixtures::scenario_ids()) {
        const auto& s = scenario(id);
        for (int i = 0; i < 200; ++i) {
            const auto report = grade(mutate(rng, s.task.reference_rules, s.registry), s.task, s.registry);
            if (report.grade.label != Grade::S) continue;
            for (const auto& m : report.matches) EXPECT_EQ(m.match, MatchClass::Exact);
            EXPECT_TRUE(report.unmatched.empty());
        }
    }
}

TEST(Grade, MonotoneUnderDeletingWhenMatch) {
    testkit::Rng rng(41);
    for (const auto& id : fixtures::scenario_ids()) {
        const auto& s = scenario(id);
        for (int i = 0; i < 200; ++i) {
            std::vector<Rule> cand = mutate(rng, s.task.reference_rules, s.registry);
            const int before = grade(cand, s.task, s.registry).grade.score;
            const Rule& ref = s.task.reference_rules[testkit::pick(rng, s.task.reference_rules.size())];
            auto it = std::find_if(cand.begin(), cand.end(), [&](const Rule& c) { return c.when_part == ref.when_part; });
            if (it == cand.end()) continue;
            cand.erase(it);
            EXPECT_LE(grade(cand, s.task, s.registry).grade.score, before);
        }
    }
}

TEST(Grade, LabelScoreMapping) {
    EXPECT_EQ(GradeLabel::from(Grade::S).score, 2);
    EXPECT_EQ(GradeLabel::from(Grade::P).score, 1);
    EXPECT_EQ(GradeLabel::from(Grade::F).score, 0);
}

TEST(RuleId, NaturalOrder) {
    EXPECT_TRUE(rule_id_less("r2", "r10"));
    EXPECT_FALSE(rule_id_less("r10", "r2"));
    EXPECT_TRUE(rule_id_less("a", "b"));
    EXPECT_FALSE(rule_id_less("r1", "r1"));
}

}  // namespace
}  // namespace sensation
