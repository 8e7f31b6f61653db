// tests/augment_test.cc

// Copyright 2026  EmoAug authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <map>
#include <set>

#include <doctest.h>

#include "emoaug/augment.h"

using namespace emoaug;

namespace {

UtteranceRecord Rec(const std::string& id, const std::string& spk,
                    const std::string& emo, const std::string& ses = "ses1") {
  UtteranceRecord r;
  r.utt_id = id;
  r.speaker = spk;
  r.emotion = emo;
  r.session = ses;
  return r;
}

// Per-emotion counts in an augmentation plan, sources counted once per row.
std::array<int64_t, 4> PlanCounts(const AugmentationPlan& plan,
                                  const Manifest& m) {
  std::map<std::string, std::string> emotion_of;
  for (const auto& r : m) emotion_of[r.utt_id] = r.emotion;
  std::array<int64_t, 4> counts{};
  for (const auto& row : plan.rows)
    ++counts[EmotionIndex(emotion_of.at(row.source_id))];
  return counts;
}

}  // namespace

TEST_CASE("balance quotas: 1103/1636/1708/1084 -> 605/72/0/624") {
  const std::array<int64_t, 4> counts = {1103, 1636, 1708, 1084};
  const auto quotas = BalanceQuotas(counts);
  CHECK(quotas[0] == 605);
  CHECK(quotas[1] == 72);
  CHECK(quotas[2] == 0);
  CHECK(quotas[3] == 624);
  // Post-augmentation totals are equal at the max class count.
  for (int e = 0; e < 4; ++e) CHECK(counts[e] + quotas[e] == 1708);
}

TEST_CASE("n=0 without balancing yields an empty plan") {
  Manifest m = {Rec("a", "s1", "angry"), Rec("b", "s1", "angry")};
  AugmentationPlan plan = BuildPlan(m, 0, false, 1);
  CHECK(plan.rows.empty());
}

TEST_CASE("each source gets n same-cell references, never itself") {
  Manifest m;
  for (int i = 0; i < 3; ++i)
    m.push_back(Rec("a" + std::to_string(i), "s1", "happy"));
  for (int i = 0; i < 4; ++i)
    m.push_back(Rec("b" + std::to_string(i), "s2", "happy"));
  AugmentationPlan plan = BuildPlan(m, 2, false, 7);
  CHECK(plan.rows.size() == 14);  // 7 sources x 2
  ValidatePlan(plan, m);
  std::map<std::string, std::set<std::string>> refs;
  for (const auto& row : plan.rows) {
    CHECK(row.source_id != row.ref_id);
    CHECK_FALSE(row.with_replacement);  // cells large enough for n=2
    refs[row.source_id].insert(row.ref_id);
  }
  // n=2 within a 3-cell: both other members used as references.
  CHECK(refs["a0"] == std::set<std::string>{"a1", "a2"});
}

TEST_CASE("requesting more references than the cell holds wraps with a flag") {
  Manifest m = {Rec("a", "s1", "sad"), Rec("b", "s1", "sad")};
  AugmentationPlan plan = BuildPlan(m, 3, false, 2);
  CHECK(plan.rows.size() == 6);
  int flagged = 0;
  for (const auto& row : plan.rows)
    if (row.with_replacement) ++flagged;
  CHECK(flagged == 4);  // per source: 1 unique reference, then 2 repeats
}

TEST_CASE("singleton cells are skipped with a warning") {
  Manifest m = {Rec("a", "s1", "angry"), Rec("b", "s1", "happy"),
                Rec("c", "s1", "happy")};
  AugmentationPlan plan = BuildPlan(m, 1, false, 3);
  CHECK(plan.rows.size() == 2);  // only the happy pair
  REQUIRE(plan.warnings.size() == 1);
  CHECK(plan.warnings[0].find("angry") != std::string::npos);
}

TEST_CASE("balancing raises every class to the max count") {
  Manifest m;
  // One speaker so every class cell can pair internally (cells of 1 are
  // ineligible); per-class counts 4/6/8/2.
  const std::array<int, 4> per_class = {4, 6, 8, 2};
  for (int e = 0; e < 4; ++e) {
    for (int i = 0; i < per_class[e]; ++i) {
      m.push_back(Rec(std::string(kEmotions[e]) + std::to_string(i), "s1",
                      kEmotions[e]));
    }
  }
  AugmentationPlan plan = BuildPlan(m, 0, true, 11);
  ValidatePlan(plan, m);
  const auto generated = PlanCounts(plan, m);
  CHECK(generated[0] == 4);  // 8 - 4
  CHECK(generated[1] == 2);
  CHECK(generated[2] == 0);
  CHECK(generated[3] == 6);
}

TEST_CASE("balance combined with n keeps post-augmentation classes equal") {
  Manifest m;
  const std::array<int, 4> per_class = {4, 6, 8, 2};
  for (int e = 0; e < 4; ++e)
    for (int i = 0; i < per_class[e]; ++i)
      m.push_back(Rec(std::string(kEmotions[e]) + std::to_string(i), "s1",
                      kEmotions[e]));
  const int n = 2;
  AugmentationPlan plan = BuildPlan(m, n, true, 13);
  const auto counts = ClassCounts(m);
  const auto generated = PlanCounts(plan, m);
  for (int e = 0; e < 4; ++e)
    CHECK(counts[e] + generated[e] == (1 + n) * 8);
}

TEST_CASE("plans are deterministic per seed") {
  Manifest m;
  for (int i = 0; i < 10; ++i)
    m.push_back(Rec("u" + std::to_string(i), "s" + std::to_string(i % 2),
                    kEmotions[i % 4]));
  AugmentationPlan p1 = BuildPlan(m, 2, false, 42);
  AugmentationPlan p2 = BuildPlan(m, 2, false, 42);
  REQUIRE(p1.rows.size() == p2.rows.size());
  for (size_t i = 0; i < p1.rows.size(); ++i) {
    CHECK(p1.rows[i].source_id == p2.rows[i].source_id);
    CHECK(p1.rows[i].ref_id == p2.rows[i].ref_id);
    CHECK(p1.rows[i].out_id == p2.rows[i].out_id);
  }
}

TEST_CASE("plan validation catches violations") {
  Manifest m = {Rec("a", "s1", "angry"), Rec("b", "s1", "angry"),
                Rec("c", "s2", "angry"), Rec("d", "s1", "happy")};
  AugmentationPlan plan;
  plan.rows.push_back({"a", "b", "x0", false});
  CHECK_NOTHROW(ValidatePlan(plan, m));
  plan.rows.push_back({"a", "c", "x1", false});  // cross-speaker
  CHECK_THROWS_AS(ValidatePlan(plan, m), ContractError);
  plan.rows.back() = {"a", "d", "x1", false};  // cross-emotion
  CHECK_THROWS_AS(ValidatePlan(plan, m), ContractError);
  plan.rows.back() = {"a", "a", "x1", false};  // self-pair
  CHECK_THROWS_AS(ValidatePlan(plan, m), ContractError);
  plan.rows.back() = {"a", "zzz", "x1", false};  // unknown id
  CHECK_THROWS_AS(ValidatePlan(plan, m), ContractError);
}

TEST_CASE("duplicate utterance ids are rejected") {
  Manifest m = {Rec("a", "s1", "angry"), Rec("a", "s1", "angry")};
  CHECK_THROWS_AS(BuildPlan(m, 1, false, 0), DataError);
}
