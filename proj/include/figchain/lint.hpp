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

// Machine-checkable review rules for one operation (one commit):
//
//   C2-MSG-FORMAT          message does not follow "[<class>: <description>]"
//   C2-SINGLE-ASPECT       the diff spans more than one class token
//   C2-UNDOCUMENTED-CHANGE the diff touches a class other than the declared one
//   C1-DATA                marks geometry changed and the fidelity check failed
//
// An empty result means only that these checks hold; human review is still
// required.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "figchain/commit.hpp"
#include "figchain/diff.hpp"
#include "figchain/fidelity.hpp"

namespace figchain {

enum class LintRule { DataFidelity, SingleAspect, MessageFormat, UndocumentedChange };
enum class Severity { Error, Warning };

constexpr std::string_view to_string(LintRule r) {
  switch (r) {
    case LintRule::DataFidelity: return "C1-DATA";
    case LintRule::SingleAspect: return "C2-SINGLE-ASPECT";
    case LintRule::MessageFormat: return "C2-MSG-FORMAT";
    case LintRule::UndocumentedChange: return "C2-UNDOCUMENTED-CHANGE";
  }
  return "C2-MSG-FORMAT";
}

constexpr std::string_view to_string(Severity s) { return s == Severity::Error ? "error" : "warning"; }

struct LintFinding {
  LintRule rule = LintRule::MessageFormat;
  Severity severity = Severity::Error;
  std::string message;
  std::string location;  // element path or commit reference
};

struct LintResult {
  std::vector<ElementChange> changes;
  std::optional<FidelityReport> fidelity;  // present when marks geometry was touched
  std::vector<LintFinding> findings;

  bool has_errors() const {
    for (const auto& f : findings)
      if (f.severity == Severity::Error) return true;
    return false;
  }
};

inline bool touches_mark_geometry(const std::vector<ElementChange>& changes) {
  for (const auto& c : changes) {
    if (c.role.first_level() != Aspect::Marks) continue;
    if (c.kind != ChangeKind::Modify || c.facets.count(Facet::Geometry)) return true;
  }
  return false;
}

/// Lints one operation given its commit message and the versions before and
/// after it. `commit_ref` is used as the location of message-level findings.
inline LintResult lint_operation(std::string_view message, const FigureDocument& old_doc,
                                 const FigureDocument& new_doc, const FigureMap& map,
                                 const std::vector<std::string>& declared = {},
                                 const std::string& commit_ref = {}) {
  LintResult out;
  out.changes = diff(old_doc, new_doc, map);
  auto add = [&](LintRule rule, Severity sev, std::string msg, std::string loc) {
    out.findings.push_back({rule, sev, std::move(msg), std::move(loc)});
  };

  std::optional<CommitMessage> parsed;
  try {
    parsed = parse_commit_message(message);
  } catch (const Error& e) {
    add(LintRule::MessageFormat, Severity::Error, e.what(), commit_ref);
  }

  if (out.changes.empty()) {
    add(LintRule::UndocumentedChange, Severity::Warning,
        "operation contains no element changes", commit_ref);
  } else {
    auto roles = operation_roles(out.changes);
    if (roles.size() > 1) {
      std::string list;
      for (const auto& r : roles) list += (list.empty() ? "" : ", ") + r.token();
      add(LintRule::SingleAspect, Severity::Error,
          "operation spans " + std::to_string(roles.size()) + " aspects: " + list, commit_ref);
    }
    if (parsed) {
      for (const auto& c : out.changes) {
        if (c.role.token() == parsed->class_token) continue;
        add(LintRule::UndocumentedChange, Severity::Error,
            std::string(to_string(c.kind)) + " of '" + c.role.token() +
                "' element is not covered by the declared class '" + parsed->class_token + "'",
            c.new_ref ? *c.new_ref : c.old_ref.value_or(""));
      }
    }
  }

  if (touches_mark_geometry(out.changes)) {
    FidelityReport report = check_data_fidelity(old_doc, new_doc, map, declared);
    for (const auto& w : report.warnings) add(LintRule::DataFidelity, Severity::Warning, w, commit_ref);
    if (report.status != FidelityStatus::Pass) {
      std::string where;
      for (const auto& p : report.offending) where += (where.empty() ? "" : ",") + p;
      add(LintRule::DataFidelity, Severity::Error,
          std::string(to_string(report.status)) + ": " + report.message, where.empty() ? commit_ref : where);
    }
    out.fidelity = std::move(report);
  } else {
    for (const auto& d : declared)
      if (!parse_transform_declaration(d))
        add(LintRule::DataFidelity, Severity::Warning, "unrecognized transform declaration '" + d + "'",
            commit_ref);
  }
  return out;
}

}  // namespace figchain
