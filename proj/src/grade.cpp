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
#include <algorithm>

#include "sensation/rule.hpp"

namespace sensation {

using nlohmann::json;

std::string_view to_string(Grade grade) {
    switch (grade) {
        case Grade::S: return "S";
        case Grade::P: return "P";
        case Grade::F: return "F";
    }
    return "?";
}

std::string_view to_string(MatchClass m) {
    switch (m) {
        case MatchClass::Miss: return "miss";
        case MatchClass::Partial: return "partial";
        case MatchClass::Exact: return "exact";
    }
    return "?";
}

namespace {

std::vector<ActionRef> sorted(std::vector<ActionRef> v) {
    std::sort(v.begin(), v.end());
    return v;
}

/// Sub-multiset test on sorted inputs.
template <typename T>
bool includes_sorted(const std::vector<T>& super, const std::vector<T>& sub) {
    return std::includes(super.begin(), super.end(), sub.begin(), sub.end());
}

std::string candidate_name(const Rule& rule, std::size_t index) {
    return rule.id.empty() ? "#" + std::to_string(index) : rule.id;
}

}  // namespace

MatchClass classify_match(const Rule& candidate, const Rule& reference, bool ordered_do) {
    if (candidate.when_part != reference.when_part) return MatchClass::Miss;

    // Canonical WHILE lists are sorted and duplicate-free, i.e. sorted sets.
    const Rule cand = canonicalize(candidate);
    const Rule ref = canonicalize(reference);
    const auto cand_do = sorted(cand.do_part);
    const auto ref_do = sorted(ref.do_part);

    const bool do_equal = ordered_do ? cand.do_part == ref.do_part : cand_do == ref_do;
    if (do_equal && cand.while_part == ref.while_part) return MatchClass::Exact;

    const bool covers = includes_sorted(cand.while_part, ref.while_part) && includes_sorted(cand_do, ref_do);
    const bool has_extras = cand.while_part.size() > ref.while_part.size() || cand_do.size() > ref_do.size();
    return covers && has_extras ? MatchClass::Partial : MatchClass::Miss;
}

GradeReport grade(std::span<const Rule> candidates, const ReferenceTask& task, const CapabilityRegistry& registry) {
    for (const auto& c : candidates) {
        ValidationReport report = validate_rule(c, registry);
        if (!report.ok()) throw InvalidCandidate(c.id, std::move(report));
    }

    GradeReport out;
    std::vector<bool> matched(candidates.size(), false);
    bool all_exact = true;
    bool any_hit = false;
    for (std::size_t r = 0; r < task.reference_rules.size(); ++r) {
        const Rule& reference = task.reference_rules[r];
        const bool ordered = r < task.ordered_do.size() && task.ordered_do[r];
        std::vector<MatchClass> classes;
        classes.reserve(candidates.size());
        MatchClass best = MatchClass::Miss;
        for (const auto& c : candidates) {
            classes.push_back(classify_match(c, reference, ordered));
            best = std::max(best, classes.back());
        }
        ReferenceMatch m{reference.id, best, {}};
        if (best != MatchClass::Miss) {
            for (std::size_t i = 0; i < candidates.size(); ++i) {
                if (classes[i] != best) continue;
                matched[i] = true;
                m.candidates.push_back(candidate_name(candidates[i], i));
            }
        }
        all_exact = all_exact && best == MatchClass::Exact;
        any_hit = any_hit || best != MatchClass::Miss;
        out.matches.push_back(std::move(m));
    }
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (!matched[i]) out.unmatched.push_back(candidate_name(candidates[i], i));
    }

    if (all_exact && out.unmatched.empty()) {
        out.grade = GradeLabel::from(Grade::S);
    } else if (!any_hit) {
        out.grade = GradeLabel::from(Grade::F);
    } else {
        out.grade = GradeLabel::from(Grade::P);
    }
    return out;
}

json grade_report_to_json(const GradeReport& report) {
    json matches = json::array();
    for (const auto& m : report.matches) {
        matches.push_back({{"reference", m.reference}, {"match", to_string(m.match)}, {"candidates", m.candidates}});
    }
    return json{{"grade", to_string(report.grade.label)},
                {"score", report.grade.score},
                {"matches", matches},
                {"unmatched", report.unmatched}};
}

}  // namespace sensation
