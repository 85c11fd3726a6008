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

// Two-level component taxonomy used to classify figure elements and the
// operations performed on them. A role serializes to a class token such as
// "legend-title" or "size-height"; first-level-only roles serialize to the
// bare first-level name ("title", "marks").

#pragma once

#include <array>
#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "figchain/error.hpp"

namespace figchain {

enum class Aspect { Size, Axes, Legend, Title, Marks, Annotation, Other };

inline constexpr std::array<Aspect, 7> kAllAspects = {
    Aspect::Size,  Aspect::Axes,       Aspect::Legend, Aspect::Title,
    Aspect::Marks, Aspect::Annotation, Aspect::Other};

constexpr std::string_view to_string(Aspect a) {
  switch (a) {
    case Aspect::Size: return "size";
    case Aspect::Axes: return "axes";
    case Aspect::Legend: return "legend";
    case Aspect::Title: return "title";
    case Aspect::Marks: return "marks";
    case Aspect::Annotation: return "annotation";
    case Aspect::Other: return "other";
  }
  return "other";
}

/// Legal second-level refinements for each first level. Empty for the
/// aspects that admit none.
inline std::vector<std::string_view> refinements(Aspect a) {
  switch (a) {
    case Aspect::Size: return {"width", "height"};
    case Aspect::Axes: return {"label", "tick", "axis-line", "title", "grid"};
    case Aspect::Legend:
      return {"general", "gradient", "labels", "symbols", "symbol-layout", "title"};
    case Aspect::Marks: return {"bar", "line", "arc", "area", "point", "text"};
    case Aspect::Title:
    case Aspect::Annotation:
    case Aspect::Other: return {};
  }
  return {};
}

class Role {
 public:
  Role() = default;
  explicit Role(Aspect first) : first_(first) {}

  /// Throws UnknownRole when `second` is not a refinement of `first`.
  Role(Aspect first, std::string_view second) : first_(first) {
    for (auto r : refinements(first)) {
      if (r == second) {
        second_ = std::string(second);
        return;
      }
    }
    throw Error(ErrorKind::UnknownRole,
                "'" + std::string(second) + "' is not a refinement of '" +
                    std::string(to_string(first)) + "'");
  }

  Aspect first_level() const { return first_; }
  const std::optional<std::string>& second_level() const { return second_; }

  std::string token() const {
    std::string out(to_string(first_));
    if (second_) out += "-" + *second_;
    return out;
  }

  /// Throws UnknownRole for tokens outside the taxonomy.
  static Role from_token(std::string_view token) {
    for (Aspect a : kAllAspects) {
      std::string_view name = to_string(a);
      if (token == name) return Role(a);
      if (token.size() > name.size() + 1 && token.substr(0, name.size()) == name &&
          token[name.size()] == '-') {
        std::string_view rest = token.substr(name.size() + 1);
        for (auto r : refinements(a))
          if (r == rest) return Role(a, rest);
      }
    }
    throw Error(ErrorKind::UnknownRole,
                "'" + std::string(token) + "' is not a taxonomy class token");
  }

  friend bool operator==(const Role&, const Role&) = default;
  friend auto operator<=>(const Role& a, const Role& b) {
    if (auto c = a.first_ <=> b.first_; c != 0) return c;
    return a.second_.value_or("") <=> b.second_.value_or("");
  }

 private:
  Aspect first_ = Aspect::Other;
  std::optional<std::string> second_;
};

/// Every legal role, first-level-only entries included.
inline std::vector<Role> all_roles() {
  std::vector<Role> out;
  for (Aspect a : kAllAspects) {
    out.emplace_back(a);
    for (auto r : refinements(a)) out.emplace_back(a, r);
  }
  return out;
}

}  // namespace figchain
