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

#include <sstream>

#include "support.hpp"

using namespace figchain;
using testing_support::bars_map;
using testing_support::figure;
using testing_support::ops_map;
using testing_support::read_fixture;

namespace {

std::vector<std::string> messages() {
  std::vector<std::string> out;
  std::istringstream in(read_fixture("ops/messages.txt"));
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> rules(const LintResult& r) {
  std::vector<std::string> out;
  for (const auto& f : r.findings) out.emplace_back(to_string(f.rule));
  return out;
}

}  // namespace

TEST(Lint, TheFiveOperationsAreClean) {
  auto msgs = messages();
  for (int k = 0; k < 5; ++k) {
    auto before = figure("ops/A" + std::to_string(k) + ".svg");
    auto after = figure("ops/A" + std::to_string(k + 1) + ".svg");
    auto r = lint_operation(msgs[static_cast<std::size_t>(k)], before, after, ops_map());
    EXPECT_TRUE(r.findings.empty()) << "Op" << k + 1 << ": " << (r.findings.empty() ? "" : r.findings[0].message);
    EXPECT_FALSE(r.changes.empty());
    EXPECT_FALSE(r.fidelity);
  }
}

TEST(Lint, SquashedCommitFailsSingleAspect) {
  auto r = lint_operation("[title: everything at once]", figure("ops/A0.svg"), figure("ops/A5.svg"), ops_map(), {},
                          "abc123");
  ASSERT_TRUE(r.has_errors());
  const LintFinding* single = nullptr;
  for (const auto& f : r.findings)
    if (f.rule == LintRule::SingleAspect) single = &f;
  ASSERT_NE(single, nullptr);
  EXPECT_EQ(single->location, "abc123");
  for (const char* t : {"title", "axes-title", "legend-general", "legend-title", "size-height"})
    EXPECT_NE(single->message.find(t), std::string::npos) << t;
  // One undocumented finding per change outside 'title'; axes-title has two.
  int undocumented = 0;
  for (const auto& f : r.findings) undocumented += f.rule == LintRule::UndocumentedChange;
  EXPECT_EQ(undocumented, 5);
}

TEST(Lint, WrongDeclaredClassIsUndocumented) {
  auto a0 = figure("ops/A0.svg");
  auto r = lint_operation("[axes-title: update title text]", a0, figure("ops/A1.svg"), ops_map());
  EXPECT_EQ(rules(r), std::vector<std::string>{"C2-UNDOCUMENTED-CHANGE"});
  EXPECT_EQ(r.findings[0].location, "/0");
}

TEST(Lint, BadMessageIsReportedEvenWhenTheDiffIsClean) {
  auto r = lint_operation("update title", figure("ops/A0.svg"), figure("ops/A1.svg"), ops_map(), {}, "c1");
  EXPECT_EQ(rules(r), std::vector<std::string>{"C2-MSG-FORMAT"});
  EXPECT_EQ(r.findings[0].location, "c1");
  auto unknown = lint_operation("[heading: update]", figure("ops/A0.svg"), figure("ops/A1.svg"), ops_map());
  EXPECT_EQ(rules(unknown), std::vector<std::string>{"C2-MSG-FORMAT"});
}

TEST(Lint, EmptyOperationWarns) {
  auto a = figure("ops/A0.svg");
  auto r = lint_operation("[title: nothing]", a, a, ops_map());
  ASSERT_EQ(r.findings.size(), 1u);
  EXPECT_EQ(r.findings[0].severity, Severity::Warning);
  EXPECT_FALSE(r.has_errors());
}

TEST(Lint, MarkGeometryRunsTheFidelityCheck) {
  auto base = figure("bars/base.svg");
  auto bad = lint_operation("[marks-bar: taller bar]", base, figure("bars/taller.svg"), bars_map());
  EXPECT_EQ(rules(bad), std::vector<std::string>{"C1-DATA"});
  EXPECT_EQ(bad.findings[0].location, testing_support::path_of_id(base, "bar-b"));
  ASSERT_TRUE(bad.fidelity);
  EXPECT_EQ(bad.fidelity->status, FidelityStatus::Violation);

  auto ok = lint_operation("[marks-bar: rescale]", base, figure("bars/rescale.svg"), bars_map());
  // The canvas size changes too, which is a separate aspect.
  EXPECT_EQ(rules(ok), (std::vector<std::string>{"C2-SINGLE-ASPECT", "C2-UNDOCUMENTED-CHANGE", "C2-UNDOCUMENTED-CHANGE"}));
  ASSERT_TRUE(ok.fidelity);
  EXPECT_EQ(ok.fidelity->status, FidelityStatus::Pass);

  auto recolor = lint_operation("[marks-bar: recolor]", base, figure("bars/recolor.svg"), bars_map());
  EXPECT_TRUE(recolor.findings.empty());
  EXPECT_FALSE(recolor.fidelity);
}

TEST(Lint, MixedTitleAndBarEditReportsBothRules) {
  auto r = lint_operation("[title: update title text]", figure("ops/A0.svg"), figure("ops/title_and_bar.svg"),
                          ops_map());
  auto got = rules(r);
  EXPECT_NE(std::find(got.begin(), got.end(), "C2-SINGLE-ASPECT"), got.end());
  EXPECT_NE(std::find(got.begin(), got.end(), "C1-DATA"), got.end());
}

TEST(Lint, UnknownDeclarationWarnsWithoutMarks) {
  auto r = lint_operation("[title: update title text]", figure("ops/A0.svg"), figure("ops/A1.svg"), ops_map(),
                          {"log-scale-z"});
  ASSERT_EQ(r.findings.size(), 1u);
  EXPECT_EQ(r.findings[0].rule, LintRule::DataFidelity);
  EXPECT_EQ(r.findings[0].severity, Severity::Warning);
}
