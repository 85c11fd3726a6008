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

// JSON forms of diff results. diff.json, as read by the reviewer UI:
//
//   {"changes":  [{"kind", "role", "old_ref", "new_ref", "facets", "detail"}],
//    "fidelity": null | {"status", "mark_changes", "fitted_transform",
//                        "residual", "tolerance", "declared_transforms",
//                        "offending", "warnings", "message"},
//    "findings": [{"rule", "severity", "message", "location"}]}
//
// detail maps each key to {"old": str|null, "new": str|null} in diff order.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "figchain/diff.hpp"
#include "figchain/error.hpp"
#include "figchain/fidelity.hpp"
#include "figchain/lint.hpp"

namespace figchain {

using Json = nlohmann::ordered_json;

namespace detail {

inline Json opt(const std::optional<std::string>& s) { return s ? Json(*s) : Json(nullptr); }

inline std::optional<std::string> opt_string(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<std::string>();
}

template <class Enum, std::size_t N>
Enum enum_from(const std::string& s, const Enum (&all)[N], const char* what) {
  for (Enum e : all)
    if (to_string(e) == s) return e;
  throw Error(ErrorKind::SchemaError, std::string("unknown ") + what + " '" + s + "'");
}

}  // namespace detail

inline Json to_json(const ElementChange& c) {
  Json facets = Json::array();
  for (Facet f : c.facets) facets.push_back(std::string(to_string(f)));
  Json detail = Json::object();
  for (const auto& [k, v] : c.detail)
    detail[k] = Json{{"old", detail::opt(v.old_value)}, {"new", detail::opt(v.new_value)}};
  return Json{{"kind", std::string(to_string(c.kind))},
              {"role", c.role.token()},
              {"old_ref", detail::opt(c.old_ref)},
              {"new_ref", detail::opt(c.new_ref)},
              {"facets", std::move(facets)},
              {"detail", std::move(detail)}};
}

inline ElementChange change_from_json(const Json& j) {
  static constexpr ChangeKind kinds[] = {ChangeKind::Add, ChangeKind::Remove, ChangeKind::Modify};
  static constexpr Facet facets[] = {Facet::Geometry, Facet::Style, Facet::Text, Facet::Structure};
  try {
    ElementChange c;
    c.kind = detail::enum_from(j.at("kind").get<std::string>(), kinds, "change kind");
    c.role = Role::from_token(j.at("role").get<std::string>());
    c.old_ref = detail::opt_string(j, "old_ref");
    c.new_ref = detail::opt_string(j, "new_ref");
    for (const auto& f : j.at("facets")) c.facets.insert(detail::enum_from(f.get<std::string>(), facets, "facet"));
    for (const auto& [k, v] : j.at("detail").items())
      c.detail.push_back({k, {detail::opt_string(v, "old"), detail::opt_string(v, "new")}});
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::SchemaError, std::string("bad change object: ") + e.what());
  }
}

inline Json to_json(const std::vector<ElementChange>& changes) {
  Json out = Json::array();
  for (const auto& c : changes) out.push_back(to_json(c));
  return out;
}

inline Json to_json(const LintFinding& f) {
  return Json{{"rule", std::string(to_string(f.rule))},
              {"severity", std::string(to_string(f.severity))},
              {"message", f.message},
              {"location", f.location}};
}

inline LintFinding finding_from_json(const Json& j) {
  static constexpr LintRule rules[] = {LintRule::DataFidelity, LintRule::SingleAspect, LintRule::MessageFormat,
                                       LintRule::UndocumentedChange};
  static constexpr Severity sev[] = {Severity::Error, Severity::Warning};
  try {
    return {detail::enum_from(j.at("rule").get<std::string>(), rules, "lint rule"),
            detail::enum_from(j.at("severity").get<std::string>(), sev, "severity"),
            j.at("message").get<std::string>(), j.at("location").get<std::string>()};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::SchemaError, std::string("bad finding object: ") + e.what());
  }
}

inline Json to_json(const std::vector<LintFinding>& findings) {
  Json out = Json::array();
  for (const auto& f : findings) out.push_back(to_json(f));
  return out;
}

inline Json to_json(const FidelityReport& r) {
  Json fitted = nullptr;
  if (r.fitted_transform)
    fitted = Json{{"scale_x", r.fitted_transform->scale_x},
                  {"scale_y", r.fitted_transform->scale_y},
                  {"translate_x", r.fitted_transform->translate_x},
                  {"translate_y", r.fitted_transform->translate_y}};
  return Json{{"status", std::string(to_string(r.status))},
              {"mark_changes", to_json(r.mark_changes)},
              {"fitted_transform", std::move(fitted)},
              {"residual", r.residual},
              {"tolerance", r.tolerance},
              {"declared_transforms", r.declared_transforms},
              {"offending", r.offending},
              {"warnings", r.warnings},
              {"message", r.message}};
}

inline Json to_json(const std::optional<FidelityReport>& r) { return r ? to_json(*r) : Json(nullptr); }

/// The diff.json document.
inline Json diff_document(const std::vector<ElementChange>& changes, const std::optional<FidelityReport>& fidelity,
                          const std::vector<LintFinding>& findings) {
  return Json{{"changes", to_json(changes)}, {"fidelity", to_json(fidelity)}, {"findings", to_json(findings)}};
}

inline Json diff_document(const LintResult& r) { return diff_document(r.changes, r.fidelity, r.findings); }

/// Canonical text form: two-space indent plus trailing newline.
inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace figchain
