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

#include <algorithm>
#include <random>
#include <sstream>

#include "support.hpp"

using namespace figchain;
using testing_support::fixture;
using testing_support::ops_map;
using testing_support::read_fixture;
using testing_support::temp_dir;

namespace {

ImprovementManifest five_ops() {
  std::vector<std::string> msgs;
  std::istringstream in(read_fixture("ops/messages.txt"));
  for (std::string line; std::getline(in, line);) msgs.push_back(line);
  ImprovementManifest m;
  m.figure_info = {"7.6", "iteration1-improvement1", "2026-03-01T09:00:00Z"};
  m.author_info = {"A. Author", "author@example.org"};
  for (int k = 1; k <= 5; ++k) {
    OperationInput op{"c" + std::to_string(k), msgs[static_cast<std::size_t>(k - 1)], {},
                      fixture("ops/A" + std::to_string(k - 1) + ".svg"), fixture("ops/A" + std::to_string(k) + ".svg")};
    m.operations.push_back(run_operation(k, op, ops_map()));
  }
  m.assessment_info.questions = {"q1", "q2"};
  m.assessment_info.responses = "responses.csv";
  m.assessment_info.scoring_method = "mean-accuracy";
  return m;
}

Verdict verdict(int op, Decision d, std::string name, ReviewerRole role, std::string ts, std::string comment = {}) {
  if (d == Decision::Reject && comment.empty()) comment = "needs work";
  return Verdict{op, d, std::move(name), role, std::move(comment), std::move(ts), std::nullopt};
}

std::vector<Verdict> all_approved(int n) {
  std::vector<Verdict> v;
  for (int k = 1; k <= n; ++k) v.push_back(verdict(k, Decision::Approve, "C", ReviewerRole::Climate, "2026-03-02T10:00:00Z"));
  return v;
}

template <class F>
ErrorKind kind_of(F&& f, std::string* where = nullptr) {
  try {
    f();
  } catch (const Error& e) {
    if (where) *where = e.location();
    return e.kind();
  }
  return ErrorKind::Io;
}

struct TempDir {
  std::filesystem::path path = temp_dir("audit");
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST(Audit, Sha256MatchesKnownVectors) {
  EXPECT_EQ(sha256_hex(""), "sha256:e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "sha256:ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Audit, TimestampsMustBeUtc) {
  EXPECT_TRUE(is_utc_timestamp("2026-03-01T10:00:00Z"));
  EXPECT_TRUE(is_utc_timestamp("2026-03-01T10:00:00.125Z"));
  EXPECT_FALSE(is_utc_timestamp("2026-03-01T10:00:00+01:00"));
  EXPECT_FALSE(is_utc_timestamp("2026-03-01 10:00:00"));
  EXPECT_TRUE(is_utc_timestamp(utc_now()));
}

TEST(Audit, BundleIsSelfContained) {
  TempDir tmp;
  auto written = assemble_bundle(five_ops(), tmp.path);
  auto loaded = load_bundle(tmp.path);
  ASSERT_EQ(loaded.operations.size(), 5u);
  for (const auto& op : loaded.operations) {
    SCOPED_TRACE(op_label(op.id));
    EXPECT_EQ(op.before_svg, "op" + std::to_string(op.id) + "/before.svg");
    EXPECT_EQ(op.after_digest, sha256_hex(read_file(tmp.path / op.after_svg)));
    // Re-linting from the bundle alone reproduces diff.json byte for byte.
    auto again = run_operation(op.id,
                               {op.commit_ref, op.message, op.declared_transforms, tmp.path / op.before_svg,
                                tmp.path / op.after_svg},
                               ops_map());
    std::string sub = "op" + std::to_string(op.id);
    EXPECT_EQ(dump(diff_document(again.changes, again.fidelity, again.findings)),
              read_file(tmp.path / sub / "diff.json"));
    EXPECT_TRUE(again.findings.empty());
  }
  EXPECT_EQ(read_file(tmp.path / "op2/after.svg"), read_fixture("ops/A2.svg"));
  EXPECT_EQ(dump(to_json(loaded)), read_file(tmp.path / "manifest.json"));
  // Assembling twice gives identical bytes.
  TempDir second;
  assemble_bundle(five_ops(), second.path);
  for (const char* f : {"manifest.json", "op1/diff.json", "op5/diff.json"})
    EXPECT_EQ(read_file(tmp.path / f), read_file(second.path / f)) << f;
}

TEST(Audit, DiffJsonCarriesTheChangeList) {
  TempDir tmp;
  assemble_bundle(five_ops(), tmp.path);
  auto j = Json::parse(read_file(tmp.path / "op3/diff.json"));
  ASSERT_EQ(j.at("changes").size(), 1u);
  EXPECT_EQ(j["changes"][0]["kind"], "Remove");
  EXPECT_EQ(j["changes"][0]["role"], "legend-general");
  EXPECT_TRUE(j.at("findings").empty());
  EXPECT_TRUE(j.at("fidelity").is_null());
}

TEST(Audit, IncompleteManifestsNameTheSection) {
  auto base = five_ops();
  TempDir tmp;
  std::string where;
  auto m = base;
  m.figure_info.figure_number.clear();
  EXPECT_EQ(kind_of([&] { assemble_bundle(m, tmp.path); }, &where), ErrorKind::ManifestIncomplete);
  EXPECT_EQ(where, "figure_info");
  m = base;
  m.author_info.email.clear();
  EXPECT_EQ(kind_of([&] { assemble_bundle(m, tmp.path); }, &where), ErrorKind::ManifestIncomplete);
  EXPECT_EQ(where, "author_info");
  m = base;
  m.operations.clear();
  EXPECT_EQ(kind_of([&] { assemble_bundle(m, tmp.path); }, &where), ErrorKind::ManifestIncomplete);
  EXPECT_EQ(where, "operations");
  m = base;
  m.assessment_info.scoring_method.clear();
  EXPECT_EQ(kind_of([&] { assemble_bundle(m, tmp.path); }, &where), ErrorKind::ManifestIncomplete);
  EXPECT_EQ(where, "assessment_info");
  m = base;
  std::swap(m.operations[0], m.operations[1]);
  EXPECT_EQ(kind_of([&] { assemble_bundle(m, tmp.path); }, &where), ErrorKind::ManifestIncomplete);
  EXPECT_EQ(where, "operations");
  m = base;
  m.figure_info.iteration_version = "iter1";
  EXPECT_EQ(kind_of([&] { assemble_bundle(m, tmp.path); }), ErrorKind::BranchFormat);
  m = base;
  m.figure_info.creation_time = "yesterday";
  EXPECT_EQ(kind_of([&] { assemble_bundle(m, tmp.path); }, &where), ErrorKind::ManifestIncomplete);
  EXPECT_FALSE(std::filesystem::exists(tmp.path / "manifest.json"));
}

TEST(Audit, MissingSectionInManifestJson) {
  auto j = to_json(five_ops());
  for (const char* s : {"figure_info", "author_info", "operations", "assessment_info"}) {
    auto k = j;
    k.erase(s);
    std::string where;
    EXPECT_EQ(kind_of([&] { manifest_from_json(k); }, &where), ErrorKind::ManifestIncomplete);
    EXPECT_EQ(where, s);
  }
}

TEST(Audit, MissingOrBrokenArtifacts) {
  TempDir tmp;
  auto m = five_ops();
  m.operations[2].after_svg = (tmp.path / "nope.svg").string();
  EXPECT_EQ(kind_of([&] { assemble_bundle(m, tmp.path / "b"); }), ErrorKind::MissingArtifact);
  EXPECT_EQ(kind_of([&] {
              run_operation(1, {"", "[title: x]", {}, tmp.path / "nope.svg", fixture("ops/A1.svg")}, ops_map());
            }),
            ErrorKind::MissingArtifact);
  // Op3 starting somewhere other than where Op2 ended.
  m = five_ops();
  m.operations[2].before_svg = fixture("ops/A0.svg").string();
  std::string where;
  EXPECT_EQ(kind_of([&] { assemble_bundle(m, tmp.path / "c"); }, &where), ErrorKind::ManifestIncomplete);
  EXPECT_EQ(where, "operations");
  // A bundle with a file deleted no longer loads.
  assemble_bundle(five_ops(), tmp.path / "d");
  std::filesystem::remove(tmp.path / "d/op4/diff.json");
  EXPECT_EQ(kind_of([&] { load_bundle(tmp.path / "d"); }), ErrorKind::MissingArtifact);
}

TEST(Audit, VerdictParsingRules) {
  auto ok = parse_verdicts(R"([{"operation_id":"Op3","decision":"reject","reviewer":{"name":"K","role":"climate"},
                               "comment":"stroke still visible","timestamp":"2026-03-01T10:00:00Z"},
                              {"operation_id":2,"decision":"approve","reviewer":{"name":"V","role":"visualization"},
                               "timestamp":"2026-03-01T10:00:00Z","after_digest":"sha256:00"}])");
  ASSERT_EQ(ok.size(), 2u);
  EXPECT_EQ(ok[0].operation_id, 3);
  EXPECT_EQ(ok[1].reviewer_role, ReviewerRole::Visualization);
  EXPECT_EQ(*ok[1].after_digest, "sha256:00");
  EXPECT_EQ(verdict_from_json(to_json(ok[0])), ok[0]);

  const char* bad[] = {
      R"({})",
      R"([{"operation_id":"3","decision":"approve","reviewer":{"name":"K","role":"climate"},"timestamp":"2026-03-01T10:00:00Z"}])",
      R"([{"operation_id":"Op3","decision":"maybe","reviewer":{"name":"K","role":"climate"},"timestamp":"2026-03-01T10:00:00Z"}])",
      R"([{"operation_id":"Op3","decision":"reject","reviewer":{"name":"K","role":"climate"},"timestamp":"2026-03-01T10:00:00Z"}])",
      R"([{"operation_id":"Op3","decision":"approve","reviewer":{"name":"K","role":"editor"},"timestamp":"2026-03-01T10:00:00Z"}])",
      R"([{"operation_id":"Op3","decision":"approve","reviewer":{"name":"K","role":"climate"},"timestamp":"2026-03-01T10:00:00+02:00"}])",
      R"([{"operation_id":"Op3","decision":"approve","reviewer":{"name":"","role":"climate"},"timestamp":"2026-03-01T10:00:00Z"}])",
      R"(not json)",
  };
  for (const char* t : bad) EXPECT_EQ(kind_of([&] { parse_verdicts(t); }), ErrorKind::InvalidVerdict) << t;
}

TEST(Audit, CompleteOnlyWithClimateApprovalForEveryOperation) {
  auto m = five_ops();
  auto v = all_approved(5);
  auto d = decide_iteration(m, v);
  EXPECT_TRUE(d.complete);
  EXPECT_EQ(d.status(), "complete");

  v.pop_back();
  v.push_back(verdict(5, Decision::Approve, "V", ReviewerRole::Visualization, "2026-03-02T10:00:00Z"));
  d = decide_iteration(m, v);
  EXPECT_FALSE(d.complete);
  EXPECT_EQ(d.needs_revision, std::vector<int>{5});
  EXPECT_EQ(d.reasons, std::vector<std::string>{"Op5: missing climate approval"});
}

TEST(Audit, RejectionNamesOperationReviewerAndComment) {
  auto m = five_ops();
  auto v = all_approved(5);
  v.push_back(verdict(3, Decision::Reject, "K", ReviewerRole::Climate, "2026-03-02T11:00:00Z", "stroke still visible"));
  auto d = decide_iteration(m, v);
  EXPECT_FALSE(d.complete);
  EXPECT_EQ(d.reasons, std::vector<std::string>{"Op3: rejected (K: stroke still visible)"});
  auto j = to_json(d);
  EXPECT_EQ(j["status"], "needs-revision");
  EXPECT_EQ(j["needs_revision"][0], "Op3");
  // A later approval from the same reviewer supersedes the rejection.
  v.push_back(verdict(3, Decision::Approve, "K", ReviewerRole::Climate, "2026-03-02T12:00:00Z"));
  EXPECT_TRUE(decide_iteration(m, v).complete);
}

TEST(Audit, TimestampTieFavoursRejection) {
  std::vector<Verdict> v = {verdict(1, Decision::Approve, "K", ReviewerRole::Climate, "2026-03-02T10:00:00Z"),
                            verdict(1, Decision::Reject, "K", ReviewerRole::Climate, "2026-03-02T10:00:00Z")};
  auto merged = merge_verdicts(v);
  ASSERT_EQ(merged.size(), 1u);
  EXPECT_EQ(merged[0].decision, Decision::Reject);
  std::reverse(v.begin(), v.end());
  EXPECT_EQ(merge_verdicts(v), merged);
}

TEST(Audit, StaleDigestVerdictsAreIgnored) {
  auto m = five_ops();
  auto v = all_approved(5);
  v[1].after_digest = "sha256:0000";
  auto d = decide_iteration(m, v);
  EXPECT_FALSE(d.complete);
  EXPECT_EQ(d.ignored.size(), 1u);
  EXPECT_EQ(d.needs_revision, std::vector<int>{2});
  v[1].after_digest = m.operations[1].after_digest;
  EXPECT_TRUE(decide_iteration(m, v).complete);
}

TEST(Audit, VerdictOnUnknownOperation) {
  auto v = all_approved(6);
  EXPECT_EQ(kind_of([&] { decide_iteration(five_ops(), v); }), ErrorKind::UnknownOperation);
}

TEST(Audit, DecisionIsOrderFreeIdempotentAndMonotone) {
  auto m = five_ops();
  std::mt19937_64 rng(21);
  const char* names[] = {"K", "L", "V"};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Verdict> v;
    int n = 1 + static_cast<int>(rng() % 12);
    for (int k = 0; k < n; ++k) {
      int op = 1 + static_cast<int>(rng() % 5);
      auto d = rng() % 3 ? Decision::Approve : Decision::Reject;
      auto role = rng() % 4 ? ReviewerRole::Climate : ReviewerRole::Visualization;
      std::string ts = "2026-03-0" + std::to_string(1 + rng() % 3) + "T10:00:00Z";
      v.push_back(verdict(op, d, names[rng() % 3], role, ts));
    }
    auto base = to_json(decide_iteration(m, v));
    auto shuffled = v;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    EXPECT_EQ(to_json(decide_iteration(m, shuffled)), base);
    auto doubled = v;
    doubled.insert(doubled.end(), v.begin(), v.end());
    EXPECT_EQ(to_json(decide_iteration(m, doubled)), base);
    // A fresh climate rejection can never complete an iteration.
    auto more = v;
    more.push_back(verdict(1 + static_cast<int>(rng() % 5), Decision::Reject, "Z", ReviewerRole::Climate,
                           "2026-03-09T10:00:00Z"));
    EXPECT_FALSE(decide_iteration(m, more).complete);
    // Fresh climate approvals from a new reviewer never reopen a complete one.
    if (base["status"] == "complete") {
      auto plus = v;
      for (int k = 1; k <= 5; ++k)
        plus.push_back(verdict(k, Decision::Approve, "N", ReviewerRole::Climate, "2026-03-09T10:00:00Z"));
      EXPECT_TRUE(decide_iteration(m, plus).complete);
    }
  }
}

TEST(Audit, IterationLifecycle) {
  IterationRecord r("iteration1-improvement2");
  EXPECT_EQ(r.branch().improvement, 2);
  EXPECT_EQ(r.status(), IterationStatus::Draft);
  EXPECT_EQ(kind_of([&] { r.transition(IterationStatus::Complete); }), ErrorKind::InvalidTransition);
  r.transition(IterationStatus::Submitted);
  IterationDecision no;
  no.complete = false;
  r.apply(no);
  EXPECT_EQ(r.status(), IterationStatus::NeedsRevision);
  EXPECT_EQ(kind_of([&] { r.transition(IterationStatus::Complete); }), ErrorKind::InvalidTransition);
  r.transition(IterationStatus::Submitted);
  IterationDecision yes;
  yes.complete = true;
  r.apply(yes);
  EXPECT_EQ(r.status(), IterationStatus::Complete);
  EXPECT_EQ(kind_of([&] { r.transition(IterationStatus::Submitted); }), ErrorKind::InvalidTransition);
  EXPECT_EQ(kind_of([] { IterationRecord("draft-1"); }), ErrorKind::BranchFormat);
}
