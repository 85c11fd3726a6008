// Copyright 2026 The figchain Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace figchain;
using testing_support::read_fixture;

namespace {

QuestionBank bank() { return parse_question_bank(read_fixture("assessment/bank.json")); }

const char* kHeader = "participant_id,version_tag,phase,question_id,choice_index,response_time_ms\n";

template <class F>
std::pair<ErrorKind, std::string> error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return {e.kind(), e.location()};
  }
  return {ErrorKind::Io, ""};
}

// Accuracy per (group, version) computed straight from the records.
std::map<std::pair<std::string, std::string>, double> cell_oracle(const std::vector<ResponseRecord>& recs,
                                                                  const QuestionBank& b) {
  std::map<std::pair<std::string, std::string>, std::pair<int, int>> n;
  for (const auto& r : recs) {
    if (r.phase != Phase::Formal) continue;
    auto& c = n[{b.find(r.question_id)->lo_group(), r.version_tag}];
    c.first += r.choice_index == b.find(r.question_id)->correct_index;
    ++c.second;
  }
  std::map<std::pair<std::string, std::string>, double> out;
  for (const auto& [k, v] : n) out[k] = static_cast<double>(v.first) / v.second;
  return out;
}

}  // namespace

TEST(Assessment, BankParsesWithObjectives) {
  auto b = bank();
  EXPECT_EQ(b.objectives.size(), 12u);
  EXPECT_EQ(b.questions.size(), 31u);
  EXPECT_EQ(b.objectives[0].render(), "The viewer will identify objective 1 of chart (a)");
  EXPECT_EQ(b.find("qa5")->lo_group(), "a-LO5&a-LO6");
  EXPECT_EQ(b.find("qa1")->all_choices("V0")[3], "I don't know");
  auto again = parse_question_bank(dump(to_json(*b.find("qa1"))).insert(0, "[").append("]"));
  EXPECT_EQ(to_json(again.questions[0]), to_json(*b.find("qa1")));
}

TEST(Assessment, InvalidQuestionsAreRejected) {
  const char* bad[] = {
      R"([{"id":"q","phase":"formal","text_variants":{"V0":"t"},"choices":["a","b"],"correct_index":0,"lo_links":["L"]}])",
      R"([{"id":"q","phase":"formal","text_variants":{"V0":"t"},"choices":["a","b","c"],"correct_index":3,"lo_links":["L"]}])",
      R"([{"id":"q","phase":"formal","text_variants":{"V0":"t"},"choices":["a","b","c"],"correct_index":0,"lo_links":[]}])",
      R"([{"id":"q","phase":"formal","text_variants":{},"choices":["a","b","c"],"correct_index":0,"lo_links":["L"]}])",
      R"([{"id":"q","phase":"formal","text_variants":{"V0":"t"},"choices":["a","b","I don't know"],"correct_index":0,"lo_links":["L"]}])",
      R"({"learning_objectives":[{"id":"A","verb":"v","statement":"s","chart_ref":"c"}],
          "questions":[{"id":"q","phase":"formal","text_variants":{"V0":"t"},"choices":["a","b","c"],"correct_index":0,"lo_links":["B"]}]})",
  };
  for (const char* t : bad) EXPECT_EQ(error_of([&] { parse_question_bank(t); }).first, ErrorKind::InvalidQuestion) << t;
}

TEST(Assessment, ScoresOnlyFormalRows) {
  auto b = bank();
  auto in = ingest_responses(read_fixture("assessment/six_rows.csv"), b);
  ASSERT_EQ(in.records.size(), 6u);
  EXPECT_TRUE(in.warnings.empty());
  auto s = score(in.records);
  EXPECT_DOUBLE_EQ(s.value, 0.75);
  EXPECT_EQ(s.n_records, 4u);
  EXPECT_EQ(s.rule_name, "mean-accuracy");
}

TEST(Assessment, ScoringRulesArePluggable) {
  auto in = ingest_responses(read_fixture("assessment/six_rows.csv"), bank());
  ScoringRule all{"all-rows", [](const std::vector<ResponseRecord>& r) {
                    double k = 0;
                    for (const auto& x : r) k += x.correct;
                    return Score{k / static_cast<double>(r.size()), "all-rows", r.size()};
                  }};
  EXPECT_DOUBLE_EQ(score(in.records, all).value, 4.0 / 6.0);
  EXPECT_EQ(error_of([] { score({}); }).first, ErrorKind::EmptyRecords);
  auto mixed = in.records;
  mixed[1].version_tag = "V1";
  EXPECT_EQ(error_of([&] { score(mixed); }).first, ErrorKind::MixedVersions);
  std::vector<ResponseRecord> pre_only = {in.records[0]};
  EXPECT_EQ(error_of([&] { score(pre_only); }).first, ErrorKind::EmptyRecords);
}

TEST(Assessment, IngestErrorsCarryRowNumbers) {
  auto b = bank();
  auto row = [&](const std::string& r) { return std::string(kHeader) + "p1,V0,formal,qa1,1,10\n" + r + "\n"; };
  EXPECT_EQ(error_of([&] { ingest_responses(row("p2,V0,formal,qz,1,10"), b); }),
            std::make_pair(ErrorKind::UnknownQuestion, std::string("row 3")));
  EXPECT_EQ(error_of([&] { ingest_responses(row("p2,V0,formal,qa1,4,10"), b); }).first, ErrorKind::ChoiceOutOfRange);
  EXPECT_EQ(error_of([&] { ingest_responses(row("p2,V0,formal,qa1,-1,10"), b); }).first, ErrorKind::ChoiceOutOfRange);
  EXPECT_EQ(error_of([&] { ingest_responses(row("p1,V0,formal,qa1,2,10"), b); }).first, ErrorKind::DuplicateResponse);
  EXPECT_EQ(error_of([&] { ingest_responses(row("p2,V0,post,qa1,1,10"), b); }).first, ErrorKind::SchemaError);
  EXPECT_EQ(error_of([&] { ingest_responses(row("p2,V0,pre,qa1,1,10"), b); }).first, ErrorKind::SchemaError);
  EXPECT_EQ(error_of([&] { ingest_responses(row("p2,V9,formal,qa1,1,10"), b); }).first, ErrorKind::SchemaError);
  EXPECT_EQ(error_of([&] { ingest_responses(row("p2,V0,formal,qa1,x,10"), b); }).first, ErrorKind::SchemaError);
  EXPECT_EQ(error_of([&] { ingest_responses(row("p2,V0,formal,qa1,1"), b); }).first, ErrorKind::SchemaError);
  EXPECT_EQ(error_of([&] { ingest_responses("id,version,phase\n", b); }),
            std::make_pair(ErrorKind::SchemaError, std::string("row 1")));
}

TEST(Assessment, SuppliedCorrectColumnIsRecomputed) {
  auto b = bank();
  std::string csv = std::string("participant_id,version_tag,phase,question_id,choice_index,response_time_ms,correct\n") +
                    "p1,V0,formal,qa1,1,10,0\n\"p,2\",V1,formal,qa1,3,10,1\n";
  auto in = ingest_responses(csv, b);
  ASSERT_EQ(in.records.size(), 2u);
  EXPECT_TRUE(in.records[0].correct);
  EXPECT_FALSE(in.records[1].correct);
  EXPECT_EQ(in.records[1].participant_id, "p,2");
  EXPECT_EQ(in.warnings.size(), 2u);
}

TEST(Assessment, DontKnowNeverIncreasesAnyCell) {
  auto b = bank();
  std::vector<const Question*> formal;
  for (const auto& q : b.questions)
    if (q.phase == Phase::Formal) formal.push_back(&q);
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<ResponseRecord> recs;
    std::string csv = kHeader;
    int participants = 2 + static_cast<int>(rng() % 6);
    for (int p = 0; p < participants; ++p)
      for (const auto* q : formal) {
        if (rng() % 3 == 0) continue;
        csv += "p" + std::to_string(p) + "," + (p % 2 ? "V1" : "V0") + ",formal," + q->id + "," +
               std::to_string(rng() % 4) + ",100\n";
      }
    auto in = ingest_responses(csv, b);
    if (in.records.empty()) continue;
    auto table = lo_accuracy_table(in.records, b);
    auto oracle = cell_oracle(in.records, b);
    for (const auto& row : table.rows)
      for (const auto& [v, cell] : row.cells) EXPECT_DOUBLE_EQ(cell.accuracy, (oracle[{row.group, v}]));
    // Switch a random subset to "I don't know".
    auto flipped = in.records;
    for (auto& r : flipped)
      if (rng() % 4 == 0) {
        r.choice_index = kDontKnowIndex;
        r.correct = false;
      }
    auto after = lo_accuracy_table(flipped, b);
    ASSERT_EQ(after.rows.size(), table.rows.size());
    for (std::size_t k = 0; k < table.rows.size(); ++k)
      for (const auto& [v, cell] : after.rows[k].cells)
        EXPECT_LE(cell.accuracy, table.rows[k].cells.at(v).accuracy);
    for (const auto& v : versions_of(in.records))
      EXPECT_LE(score(records_for(flipped, v)).value, score(records_for(in.records, v)).value);
  }
}

TEST(Assessment, LoTableGroupsAndFlagsImprovement) {
  auto b = bank();
  std::string csv = std::string(kHeader) +
                    "p1,V0,formal,qa1,1,10\n"
                    "p2,V1,formal,qa1,1,10\n"
                    "p1,V0,formal,qa5,0,10\n"
                    "p2,V1,formal,qa5,2,10\n"
                    "p3,V1,formal,qa5,0,10\n"
                    "p1,V0,pre,qa1-pre,1,10\n";
  auto t = lo_accuracy_table(ingest_responses(csv, b).records, b);
  EXPECT_EQ(t.versions, (std::vector<std::string>{"V0", "V1"}));
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0].group, "a-LO1");
  EXPECT_EQ(t.rows[1].group, "a-LO5&a-LO6");
  EXPECT_FALSE(t.rows[0].cells.at("V1").improved);
  EXPECT_EQ(t.rows[0].cells.at("V0").total, 1u);
  const auto& c = t.rows[1].cells;
  EXPECT_DOUBLE_EQ(c.at("V0").accuracy, 0.0);
  EXPECT_DOUBLE_EQ(c.at("V1").accuracy, 0.5);
  EXPECT_TRUE(c.at("V1").improved);
}

TEST(Assessment, NaturalOrder) {
  EXPECT_TRUE(natural_less("V2", "V10"));
  EXPECT_TRUE(natural_less("a-LO9", "a-LO10"));
  EXPECT_FALSE(natural_less("V10", "V2"));
  EXPECT_TRUE(natural_less("a", "b"));
}

TEST(Assessment, AdaptationSubstitutesLongestTermsOnce) {
  Question q = *bank().find("qa3");
  q.text_variants["V0"] = "GSAT rose; GSAT change vs GSAT";
  q.choices = {"GSAT", "temperature", "none"};
  auto r = adapt_question(q, "V0", "V2",
                          {{"GSAT", "global surface temperature"}, {"GSAT change", "temperature change"},
                           {"ERF", "effective radiative forcing"}});
  EXPECT_EQ(r.question.text_variants.at("V2"),
            "global surface temperature rose; temperature change vs global surface temperature");
  EXPECT_EQ(r.question.choices_for("V2")[0], "global surface temperature");
  EXPECT_EQ(r.question.choices_for("V0")[0], "GSAT");
  EXPECT_EQ(r.question.correct_index, q.correct_index);
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_NE(r.warnings[0].find("ERF"), std::string::npos);
  std::size_t total = 0;
  for (const auto& s : r.log) total += s.count;
  EXPECT_EQ(total, 4u);
  // No feedback: a replacement containing its own term is not re-expanded.
  auto loop = adapt_question(q, "V0", "V3", {{"GSAT", "GSAT (global)"}});
  EXPECT_EQ(loop.question.text_variants.at("V3"), "GSAT (global) rose; GSAT (global) change vs GSAT (global)");
  EXPECT_EQ(error_of([&] { adapt_question(q, "V7", "V8", {}); }).first, ErrorKind::InvalidQuestion);
}

TEST(Assessment, PretestsDropTheFigureReference) {
  auto b = bank();
  std::size_t formal = 0;
  for (const auto& q : b.questions) formal += q.phase == Phase::Formal;
  EXPECT_EQ(formal, 22u);
  auto pre = derive_pretests(b);
  ASSERT_EQ(pre.size(), 9u);
  for (const auto& p : pre) {
    SCOPED_TRACE(p.id);
    EXPECT_EQ(p.phase, Phase::Pre);
    EXPECT_TRUE(p.needs_review);
    const Question* expected = b.find(p.id);
    ASSERT_NE(expected, nullptr);
    EXPECT_EQ(p.text_variants, expected->text_variants);
    EXPECT_EQ(p.correct_index, expected->correct_index);
  }
  EXPECT_EQ(pre[0].text_variants.at("V0"), "Which emitted component has the largest effect?");
  EXPECT_EQ(error_of([&] { derive_pretest(*b.find("qa3")); }).first, ErrorKind::NoAnnotatedSpan);
  EXPECT_EQ(error_of([&] { derive_pretest(*b.find("qa1-pre")); }).first, ErrorKind::InvalidQuestion);
}
