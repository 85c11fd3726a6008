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

// Figure maps assign taxonomy roles to SVG elements. File format, one rule
// per line:
//
//   # comment
//   id-prefix legend-title => legend-title
//   class tick => axes-tick
//   path /0/3 => annotation
//   default => other
//
// The default line is mandatory and must come last.
//
// Resolution, per element: the first rule (in file order) that matches the
// element itself wins. A later rule of the same kind and equal specificity
// that also matches but names a different role makes the assignment
// ambiguous. Elements no rule matches inherit the role of the nearest
// ancestor that was matched by a rule, and otherwise take the default. The
// root <svg> element is the figure canvas and resolves to `size` unless a
// rule matches it.

#pragma once

#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "figchain/error.hpp"
#include "figchain/role.hpp"
#include "figchain/svg_model.hpp"

namespace figchain {

enum class SelectorKind { IdPrefix, Class, Path };

constexpr std::string_view to_string(SelectorKind k) {
  switch (k) {
    case SelectorKind::IdPrefix: return "id-prefix";
    case SelectorKind::Class: return "class";
    case SelectorKind::Path: return "path";
  }
  return "path";
}

struct MapRule {
  SelectorKind kind = SelectorKind::IdPrefix;
  std::string pattern;
  Role role;
  int line = 0;

  bool matches(const Element& e) const {
    switch (kind) {
      case SelectorKind::IdPrefix:
        return e.id && e.id->compare(0, pattern.size(), pattern) == 0;
      case SelectorKind::Class: return e.classes.count(pattern) > 0;
      case SelectorKind::Path: return e.path == pattern;
    }
    return false;
  }

  bool same_specificity(const MapRule& o) const {
    if (kind != o.kind) return false;
    return kind != SelectorKind::IdPrefix || pattern.size() == o.pattern.size();
  }
};

struct FigureMap {
  std::vector<MapRule> rules;
  Role default_role{Aspect::Other};

  std::string to_text() const {
    std::string out;
    for (const auto& r : rules)
      out += std::string(to_string(r.kind)) + " " + r.pattern + " => " + r.role.token() + "\n";
    out += "default => " + default_role.token() + "\n";
    return out;
  }
};

/// Throws SyntaxError / UnknownRole / DuplicateSelector with "line N".
inline FigureMap parse_figure_map(std::string_view text) {
  FigureMap map;
  std::set<std::pair<SelectorKind, std::string>> seen;
  bool have_default = false;
  int line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    std::string where = "line " + std::to_string(line_no);
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream words(line);
    std::vector<std::string> tok;
    for (std::string w; words >> w;) tok.push_back(w);
    if (tok.empty()) continue;
    if (have_default) throw Error(ErrorKind::SyntaxError, "rule after the default line", where);
    auto role_of = [&](const std::string& token) {
      try {
        return Role::from_token(token);
      } catch (const Error& e) {
        throw Error(ErrorKind::UnknownRole, "unknown role token '" + token + "'", where);
      }
    };
    if (tok[0] == "default") {
      if (tok.size() != 3 || tok[1] != "=>")
        throw Error(ErrorKind::SyntaxError, "expected 'default => <role>'", where);
      map.default_role = role_of(tok[2]);
      have_default = true;
      continue;
    }
    if (tok.size() != 4 || tok[2] != "=>")
      throw Error(ErrorKind::SyntaxError, "expected '<selector-kind> <pattern> => <role>'", where);
    MapRule rule;
    if (tok[0] == "id-prefix") rule.kind = SelectorKind::IdPrefix;
    else if (tok[0] == "class") rule.kind = SelectorKind::Class;
    else if (tok[0] == "path") rule.kind = SelectorKind::Path;
    else throw Error(ErrorKind::SyntaxError, "unknown selector kind '" + tok[0] + "'", where);
    rule.pattern = tok[1];
    rule.role = role_of(tok[3]);
    rule.line = line_no;
    if (!seen.emplace(rule.kind, rule.pattern).second)
      throw Error(ErrorKind::DuplicateSelector,
                  "selector '" + tok[0] + " " + tok[1] + "' already defined", where);
    map.rules.push_back(std::move(rule));
  }
  if (!have_default)
    throw Error(ErrorKind::SyntaxError, "missing final 'default => <role>' line",
                "line " + std::to_string(line_no));
  return map;
}

struct Classification {
  std::string path;
  Role role;
  friend bool operator==(const Classification&, const Classification&) = default;
};

/// Total role assignment in document order. Throws AmbiguousRule.
inline std::vector<Classification> classify_elements(const FigureDocument& doc,
                                                     const FigureMap& map) {
  std::vector<Classification> out;
  auto match = [&](const Element& e) -> const MapRule* {
    const MapRule* first = nullptr;
    for (const auto& r : map.rules) {
      if (!r.matches(e)) continue;
      if (!first) {
        first = &r;
      } else if (r.same_specificity(*first) && !(r.role == first->role)) {
        throw Error(ErrorKind::AmbiguousRule,
                    "rules on lines " + std::to_string(first->line) + " and " +
                        std::to_string(r.line) + " both match with equal specificity: " +
                        first->role.token() + " vs " + r.role.token(),
                    e.path);
      }
    }
    return first;
  };
  std::function<void(const Element&, const Role*)> walk = [&](const Element& e,
                                                               const Role* inherited) {
    const MapRule* rule = match(e);
    Role role;
    const Role* pass_down = inherited;
    if (rule) {
      role = rule->role;
      pass_down = &rule->role;
    } else if (e.path == "/") {
      role = Role(Aspect::Size);
    } else if (inherited) {
      role = *inherited;
    } else {
      role = map.default_role;
    }
    out.push_back({e.path, role});
    for (const auto& c : e.children) walk(c, pass_down);
  };
  walk(doc.root, nullptr);
  return out;
}

/// Path → role lookup built from classify_elements.
inline std::map<std::string, Role> role_index(const FigureDocument& doc, const FigureMap& map) {
  std::map<std::string, Role> out;
  for (auto& c : classify_elements(doc, map)) out.emplace(std::move(c.path), std::move(c.role));
  return out;
}

}  // namespace figchain
