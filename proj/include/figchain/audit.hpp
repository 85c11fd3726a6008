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

// Improvement manifest, reviewer bundle, verdicts and the iteration decision.
//
// Bundle layout:
//
//   <dir>/manifest.json
//   <dir>/op1/before.svg  op1/after.svg  op1/diff.json
//   <dir>/op2/...
//
// verdicts.json is a list of
//
//   {"operation_id": "Op3", "decision": "reject",
//    "reviewer": {"name": "...", "role": "climate"},
//    "comment": "...", "timestamp": "2026-03-01T10:00:00Z",
//    "after_digest": "sha256:..."}                       // optional
//
// A verdict carrying an after_digest that no longer matches the operation's
// after.svg refers to a superseded revision and is ignored.

#pragma once

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include "figchain/assessment.hpp"
#include "figchain/commit.hpp"
#include "figchain/error.hpp"
#include "figchain/json_io.hpp"
#include "figchain/lint.hpp"

namespace figchain {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Small I/O helpers

inline std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read file", p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Write to a sibling temp file, then rename over the target.
inline void atomic_write(const fs::path& p, std::string_view bytes) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  fs::path tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write file", tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out.flush()) throw Error(ErrorKind::Io, "short write", tmp.string());
  }
  fs::rename(tmp, p);
}

inline std::string sha256_hex(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr);
  static constexpr char hex[] = "0123456789abcdef";
  std::string out = "sha256:";
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

inline bool is_utc_timestamp(const std::string& s) {
  static const std::regex re(R"(^\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}(\.\d+)?Z$)");
  return std::regex_match(s, re);
}

inline std::string utc_now() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Op ids: "Op1", "Op2", ...
inline std::string op_label(int id) { return "Op" + std::to_string(id); }

inline int parse_op_label(const Json& j) {
  if (j.is_number_integer()) {
    int v = j.get<int>();
    if (v >= 1) return v;
  } else if (j.is_string()) {
    auto s = j.get<std::string>();
    if (s.size() > 2 && s.compare(0, 2, "Op") == 0 && s[2] != '0' &&
        std::all_of(s.begin() + 2, s.end(), [](char c) { return c >= '0' && c <= '9'; }) && s.size() < 11)
      return std::stoi(s.substr(2));
  }
  throw Error(ErrorKind::InvalidVerdict, "operation_id must look like 'Op1', got " + j.dump());
}

// ---------------------------------------------------------------------------
// Manifest

struct Operation {
  int id = 0;
  std::string commit_ref;
  std::string message;  // raw text; CommitMessage grammar is enforced by lint
  std::vector<std::string> declared_transforms;
  std::vector<ElementChange> changes;
  std::optional<FidelityReport> fidelity;
  std::vector<LintFinding> findings;
  std::string before_svg;  // path, relative to the bundle once assembled
  std::string after_svg;
  std::string after_digest;

  bool has_errors() const {
    return std::any_of(findings.begin(), findings.end(), [](const auto& f) { return f.severity == Severity::Error; });
  }
};

struct FigureInfo {
  std::string figure_number;
  std::string iteration_version;  // branch name, e.g. "iteration1-improvement2"
  std::string creation_time;
};

struct AuthorInfo {
  std::string name;
  std::string email;
};

struct AssessmentInfo {
  std::vector<std::string> questions;  // question ids
  std::string responses;               // responses reference (path)
  std::optional<Score> final_score;
  std::string scoring_method;
};

struct ImprovementManifest {
  FigureInfo figure_info;
  AuthorInfo author_info;
  std::vector<Operation> operations;
  AssessmentInfo assessment_info;

  const Operation* find(int id) const {
    for (const auto& op : operations)
      if (op.id == id) return &op;
    return nullptr;
  }
};

/// Throws ManifestIncomplete naming the first absent section, or
/// BranchFormat for a bad iteration_version.
inline void validate(const ImprovementManifest& m) {
  auto missing = [](const std::string& section, const std::string& what) {
    throw Error(ErrorKind::ManifestIncomplete, what, section);
  };
  const auto& fi = m.figure_info;
  if (fi.figure_number.empty()) missing("figure_info", "figure_number is empty");
  if (fi.iteration_version.empty()) missing("figure_info", "iteration_version is empty");
  if (!is_utc_timestamp(fi.creation_time)) missing("figure_info", "creation_time must be UTC ISO-8601");
  parse_branch_name(fi.iteration_version);
  if (m.author_info.name.empty()) missing("author_info", "author name is empty");
  if (m.author_info.email.empty()) missing("author_info", "author email is empty");
  if (m.operations.empty()) missing("operations", "no operations");
  for (std::size_t k = 0; k < m.operations.size(); ++k)
    if (m.operations[k].id != static_cast<int>(k) + 1)
      missing("operations", "operation ids must be Op1..OpN in order; found " + op_label(m.operations[k].id) +
                                " at position " + std::to_string(k + 1));
  if (m.assessment_info.scoring_method.empty()) missing("assessment_info", "scoring_method is empty");
}

inline Json to_json(const Score& s) {
  return Json{{"value", s.value}, {"rule_name", s.rule_name}, {"n_records", s.n_records}};
}

inline Json to_json(const Operation& op) {
  return Json{{"id", op_label(op.id)},
              {"commit_ref", op.commit_ref},
              {"message", op.message},
              {"declared_transforms", op.declared_transforms},
              {"changes", to_json(op.changes)},
              {"fidelity", to_json(op.fidelity)},
              {"findings", to_json(op.findings)},
              {"before_svg", op.before_svg},
              {"after_svg", op.after_svg},
              {"after_digest", op.after_digest}};
}

inline Json to_json(const ImprovementManifest& m) {
  Json ops = Json::array();
  for (const auto& op : m.operations) ops.push_back(to_json(op));
  const auto& a = m.assessment_info;
  return Json{{"figure_info",
               {{"figure_number", m.figure_info.figure_number},
                {"iteration_version", m.figure_info.iteration_version},
                {"creation_time", m.figure_info.creation_time}}},
              {"author_info", {{"name", m.author_info.name}, {"email", m.author_info.email}}},
              {"operations", std::move(ops)},
              {"assessment_info",
               {{"questions", a.questions},
                {"responses", a.responses},
                {"final_score", a.final_score ? to_json(*a.final_score) : Json(nullptr)},
                {"scoring_method", a.scoring_method}}}};
}

/// Reads manifest.json. The operations' changes and findings are kept; the
/// fidelity report is re-derived by re-linting.
inline ImprovementManifest manifest_from_json(const Json& j) {
  ImprovementManifest m;
  for (const char* section : {"figure_info", "author_info", "operations", "assessment_info"})
    if (!j.contains(section)) throw Error(ErrorKind::ManifestIncomplete, "section missing", section);
  auto str = [](const Json& o, const char* key, const char* section) {
    if (!o.contains(key) || !o.at(key).is_string())
      throw Error(ErrorKind::ManifestIncomplete, std::string(key) + " missing", section);
    return o.at(key).get<std::string>();
  };
  const auto& fi = j.at("figure_info");
  m.figure_info = {str(fi, "figure_number", "figure_info"), str(fi, "iteration_version", "figure_info"),
                   str(fi, "creation_time", "figure_info")};
  const auto& ai = j.at("author_info");
  m.author_info = {str(ai, "name", "author_info"), str(ai, "email", "author_info")};
  for (const auto& oj : j.at("operations")) {
    Operation op;
    op.id = parse_op_label(oj.at("id"));
    op.commit_ref = oj.value("commit_ref", "");
    op.message = str(oj, "message", "operations");
    op.declared_transforms = oj.value("declared_transforms", std::vector<std::string>{});
    for (const auto& c : oj.value("changes", Json::array())) op.changes.push_back(change_from_json(c));
    for (const auto& f : oj.value("findings", Json::array())) op.findings.push_back(finding_from_json(f));
    op.before_svg = oj.value("before_svg", "");
    op.after_svg = oj.value("after_svg", "");
    op.after_digest = oj.value("after_digest", "");
    m.operations.push_back(std::move(op));
  }
  const auto& as = j.at("assessment_info");
  if (as.contains("questions")) m.assessment_info.questions = as.at("questions").get<std::vector<std::string>>();
  m.assessment_info.responses = as.value("responses", "");
  if (as.contains("final_score") && !as.at("final_score").is_null()) {
    const auto& s = as.at("final_score");
    m.assessment_info.final_score = Score{s.at("value").get<double>(), s.at("rule_name").get<std::string>(),
                                          s.at("n_records").get<std::size_t>()};
  }
  m.assessment_info.scoring_method = as.value("scoring_method", "");
  return m;
}

// ---------------------------------------------------------------------------
// Bundle

struct OperationInput {
  std::string commit_ref;
  std::string message;
  std::vector<std::string> declared_transforms;
  fs::path before_svg;
  fs::path after_svg;
};

/// Lints one operation from its files and fills an Operation record.
inline Operation run_operation(int id, const OperationInput& in, const FigureMap& map) {
  for (const auto* p : {&in.before_svg, &in.after_svg})
    if (!fs::is_regular_file(*p))
      throw Error(ErrorKind::MissingArtifact, "file not found: " + p->string(), op_label(id));
  std::string before = read_file(in.before_svg), after = read_file(in.after_svg);
  auto result = lint_operation(in.message, parse_figure(before, in.before_svg.string()),
                               parse_figure(after, in.after_svg.string()), map, in.declared_transforms,
                               in.commit_ref.empty() ? op_label(id) : in.commit_ref);
  Operation op;
  op.id = id;
  op.commit_ref = in.commit_ref;
  op.message = in.message;
  op.declared_transforms = in.declared_transforms;
  op.changes = std::move(result.changes);
  op.fidelity = std::move(result.fidelity);
  op.findings = std::move(result.findings);
  op.before_svg = in.before_svg.string();
  op.after_svg = in.after_svg.string();
  op.after_digest = sha256_hex(after);
  return op;
}

/// Writes the reviewer bundle. `manifest.operations[k]` refers to the SVG
/// files at its before_svg/after_svg paths; in the written manifest these
/// become bundle-relative. Throws MissingArtifact or ManifestIncomplete.
inline ImprovementManifest assemble_bundle(const ImprovementManifest& manifest, const fs::path& dir) {
  validate(manifest);
  ImprovementManifest out = manifest;
  std::vector<std::pair<std::string, std::string>> bytes;
  for (const auto& op : manifest.operations) {
    for (const auto& p : {op.before_svg, op.after_svg})
      if (p.empty() || !fs::is_regular_file(p))
        throw Error(ErrorKind::MissingArtifact, "file not found: '" + p + "'", op_label(op.id));
    bytes.emplace_back(read_file(op.before_svg), read_file(op.after_svg));
  }
  for (std::size_t k = 1; k < bytes.size(); ++k) {
    if (same_tree(parse_figure(bytes[k - 1].second).root, parse_figure(bytes[k].first).root)) continue;
    throw Error(ErrorKind::ManifestIncomplete,
                op_label(static_cast<int>(k) + 1) + " does not start from the result of " +
                    op_label(static_cast<int>(k)),
                "operations");
  }
  fs::create_directories(dir);
  for (std::size_t k = 0; k < bytes.size(); ++k) {
    auto& op = out.operations[k];
    std::string sub = "op" + std::to_string(op.id);
    atomic_write(dir / sub / "before.svg", bytes[k].first);
    atomic_write(dir / sub / "after.svg", bytes[k].second);
    atomic_write(dir / sub / "diff.json", dump(diff_document(op.changes, op.fidelity, op.findings)));
    op.before_svg = sub + "/before.svg";
    op.after_svg = sub + "/after.svg";
    op.after_digest = sha256_hex(bytes[k].second);
  }
  atomic_write(dir / "manifest.json", dump(to_json(out)));
  return out;
}

/// Reads a bundle back, checking every referenced file exists.
inline ImprovementManifest load_bundle(const fs::path& dir) {
  fs::path mp = dir / "manifest.json";
  if (!fs::is_regular_file(mp)) throw Error(ErrorKind::MissingArtifact, "manifest.json not found", dir.string());
  Json j;
  try {
    j = Json::parse(read_file(mp));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::SchemaError, e.what(), mp.string());
  }
  auto m = manifest_from_json(j);
  for (const auto& op : m.operations) {
    std::string sub = "op" + std::to_string(op.id);
    for (const char* f : {"before.svg", "after.svg", "diff.json"})
      if (!fs::is_regular_file(dir / sub / f))
        throw Error(ErrorKind::MissingArtifact, sub + "/" + f + " not found", op_label(op.id));
  }
  return m;
}

// ---------------------------------------------------------------------------
// Verdicts

enum class Decision { Approve, Reject };
enum class ReviewerRole { Climate, Visualization };

constexpr std::string_view to_string(Decision d) { return d == Decision::Approve ? "approve" : "reject"; }
constexpr std::string_view to_string(ReviewerRole r) {
  return r == ReviewerRole::Climate ? "climate" : "visualization";
}

struct Verdict {
  int operation_id = 0;
  Decision decision = Decision::Approve;
  std::string reviewer_name;
  ReviewerRole reviewer_role = ReviewerRole::Climate;
  std::string comment;
  std::string timestamp;
  std::optional<std::string> after_digest;

  friend bool operator==(const Verdict&, const Verdict&) = default;
};

inline Json to_json(const Verdict& v) {
  Json j{{"operation_id", op_label(v.operation_id)},
         {"decision", std::string(to_string(v.decision))},
         {"reviewer", {{"name", v.reviewer_name}, {"role", std::string(to_string(v.reviewer_role))}}},
         {"comment", v.comment},
         {"timestamp", v.timestamp}};
  if (v.after_digest) j["after_digest"] = *v.after_digest;
  return j;
}

inline Json to_json(const std::vector<Verdict>& vs) {
  Json out = Json::array();
  for (const auto& v : vs) out.push_back(to_json(v));
  return out;
}

/// Throws InvalidVerdict.
inline Verdict verdict_from_json(const Json& j, const std::string& where = {}) {
  auto bad = [&](const std::string& why) { throw Error(ErrorKind::InvalidVerdict, why, where); };
  if (!j.is_object()) bad("verdict must be an object");
  Verdict v;
  try {
    if (!j.contains("operation_id")) bad("operation_id missing");
    v.operation_id = parse_op_label(j.at("operation_id"));
    auto d = j.at("decision").get<std::string>();
    if (d == "approve") v.decision = Decision::Approve;
    else if (d == "reject") v.decision = Decision::Reject;
    else bad("decision must be 'approve' or 'reject'");
    const auto& r = j.at("reviewer");
    v.reviewer_name = r.at("name").get<std::string>();
    auto role = r.at("role").get<std::string>();
    if (role == "climate") v.reviewer_role = ReviewerRole::Climate;
    else if (role == "visualization") v.reviewer_role = ReviewerRole::Visualization;
    else bad("reviewer role must be 'climate' or 'visualization'");
    v.comment = j.value("comment", "");
    v.timestamp = j.at("timestamp").get<std::string>();
    if (j.contains("after_digest") && !j.at("after_digest").is_null())
      v.after_digest = j.at("after_digest").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    bad(e.what());
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::InvalidVerdict) throw;
    throw Error(ErrorKind::InvalidVerdict, e.what(), where);
  }
  if (v.reviewer_name.empty()) bad("reviewer name is empty");
  if (!is_utc_timestamp(v.timestamp)) bad("timestamp must be UTC ISO-8601, e.g. 2026-03-01T10:00:00Z");
  if (v.decision == Decision::Reject && v.comment.find_first_not_of(" \t\r\n") == std::string::npos)
    bad("a reject needs a comment");
  return v;
}

inline std::vector<Verdict> parse_verdicts(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidVerdict, std::string("not valid JSON: ") + e.what());
  }
  if (!j.is_array()) throw Error(ErrorKind::InvalidVerdict, "verdicts.json must be a list");
  std::vector<Verdict> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(verdict_from_json(j[k], "entry " + std::to_string(k)));
  return out;
}

/// One verdict per (operation, reviewer name, reviewer role). The latest
/// timestamp wins; on a timestamp tie a reject outranks an approve.
inline std::vector<Verdict> merge_verdicts(const std::vector<Verdict>& verdicts) {
  std::map<std::tuple<int, std::string, ReviewerRole>, Verdict> latest;
  for (const auto& v : verdicts) {
    auto key = std::make_tuple(v.operation_id, v.reviewer_name, v.reviewer_role);
    auto it = latest.find(key);
    if (it == latest.end()) {
      latest.emplace(key, v);
      continue;
    }
    const Verdict& cur = it->second;
    bool newer = v.timestamp > cur.timestamp ||
                 (v.timestamp == cur.timestamp && v.decision == Decision::Reject && cur.decision == Decision::Approve) ||
                 (v.timestamp == cur.timestamp && v.decision == cur.decision && to_json(v).dump() > to_json(cur).dump());
    if (newer) it->second = v;
  }
  std::vector<Verdict> out;
  for (auto& [k, v] : latest) out.push_back(std::move(v));
  return out;
}

struct IterationDecision {
  bool complete = false;
  std::vector<std::string> reasons;       // one per unresolved operation
  std::vector<std::string> ignored;       // stale verdicts
  std::vector<int> needs_revision;        // operation ids

  std::string status() const { return complete ? "complete" : "needs-revision"; }
};

/// Complete iff every operation has at least one climate approval and no
/// standing climate rejection. Visualization verdicts are advisory.
inline IterationDecision decide_iteration(const ImprovementManifest& manifest, const std::vector<Verdict>& verdicts) {
  for (const auto& v : verdicts)
    if (!manifest.find(v.operation_id))
      throw Error(ErrorKind::UnknownOperation, op_label(v.operation_id) + " is not in the manifest");
  IterationDecision out;
  auto merged = merge_verdicts(verdicts);
  for (const auto& op : manifest.operations) {
    int approvals = 0;
    std::vector<std::string> rejecters;
    for (const auto& v : merged) {
      if (v.operation_id != op.id) continue;
      if (v.after_digest && !op.after_digest.empty() && *v.after_digest != op.after_digest) {
        out.ignored.push_back(op_label(op.id) + ": verdict by " + v.reviewer_name + " refers to a superseded revision");
        continue;
      }
      if (v.reviewer_role != ReviewerRole::Climate) continue;
      if (v.decision == Decision::Approve) ++approvals;
      else rejecters.push_back(v.reviewer_name + ": " + v.comment);
    }
    if (!rejecters.empty()) {
      std::string why;
      for (const auto& r : rejecters) why += (why.empty() ? "" : "; ") + r;
      out.reasons.push_back(op_label(op.id) + ": rejected (" + why + ")");
      out.needs_revision.push_back(op.id);
    } else if (approvals == 0) {
      out.reasons.push_back(op_label(op.id) + ": missing climate approval");
      out.needs_revision.push_back(op.id);
    }
  }
  out.complete = out.needs_revision.empty();
  return out;
}

inline Json to_json(const IterationDecision& d) {
  std::vector<std::string> ops;
  for (int id : d.needs_revision) ops.push_back(op_label(id));
  return Json{{"status", d.status()}, {"needs_revision", ops}, {"reasons", d.reasons}, {"ignored", d.ignored}};
}

// ---------------------------------------------------------------------------
// Iteration lifecycle

enum class IterationStatus { Draft, Submitted, NeedsRevision, Complete };

constexpr std::string_view to_string(IterationStatus s) {
  switch (s) {
    case IterationStatus::Draft: return "draft";
    case IterationStatus::Submitted: return "submitted";
    case IterationStatus::NeedsRevision: return "needs-revision";
    case IterationStatus::Complete: return "complete";
  }
  return "draft";
}

class IterationRecord {
 public:
  explicit IterationRecord(std::string branch) : branch_name_(std::move(branch)), branch_(parse_branch_name(branch_name_)) {}

  const std::string& branch_name() const { return branch_name_; }
  const BranchName& branch() const { return branch_; }
  IterationStatus status() const { return status_; }
  const std::optional<Score>& score() const { return score_; }
  void set_score(Score s) { score_ = std::move(s); }

  static bool allowed(IterationStatus from, IterationStatus to) {
    using S = IterationStatus;
    return (from == S::Draft && to == S::Submitted) || (from == S::Submitted && to == S::NeedsRevision) ||
           (from == S::NeedsRevision && to == S::Submitted) || (from == S::Submitted && to == S::Complete);
  }

  /// Throws InvalidTransition.
  void transition(IterationStatus to) {
    if (!allowed(status_, to))
      throw Error(ErrorKind::InvalidTransition,
                  std::string(to_string(status_)) + " -> " + std::string(to_string(to)) + " is not allowed",
                  branch_name_);
    status_ = to;
  }

  /// Moves a submitted record to complete or needs-revision.
  void apply(const IterationDecision& d) {
    transition(d.complete ? IterationStatus::Complete : IterationStatus::NeedsRevision);
  }

 private:
  std::string branch_name_;
  BranchName branch_;
  IterationStatus status_ = IterationStatus::Draft;
  std::optional<Score> score_;
};

}  // namespace figchain
