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

// Commit-message and branch-name grammars.
//
//   message := "[" class-token ": " description "]"
//   branch  := "iteration" K "-improvement" M      (K, M >= 1, no leading 0)

#pragma once

#include <string>
#include <string_view>
#include <utility>

#include "figchain/error.hpp"
#include "figchain/role.hpp"

namespace figchain {

struct CommitMessage {
  std::string class_token;
  std::string description;

  std::string to_string() const { return "[" + class_token + ": " + description + "]"; }
  friend bool operator==(const CommitMessage&, const CommitMessage&) = default;
};

/// Throws MsgFormat or UnknownClass. Surrounding whitespace (e.g. the
/// trailing newline git appends) is ignored.
inline CommitMessage parse_commit_message(std::string_view text) {
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; };
  while (!text.empty() && is_space(text.front())) text.remove_prefix(1);
  while (!text.empty() && is_space(text.back())) text.remove_suffix(1);
  auto bad = [&](const std::string& why) {
    throw Error(ErrorKind::MsgFormat,
                why + "; expected '[<class>: <description>]', got '" + std::string(text) + "'");
  };
  if (text.size() < 2 || text.front() != '[' || text.back() != ']') bad("missing brackets");
  std::string_view inner = text.substr(1, text.size() - 2);
  if (inner.find('\n') != std::string_view::npos) bad("message must be a single line");
  auto colon = inner.find(':');
  if (colon == std::string_view::npos) bad("missing ':' after the class token");
  std::string_view token = inner.substr(0, colon);
  if (token.empty()) bad("empty class token");
  for (char c : token)
    if (is_space(c)) bad("class token contains whitespace");
  std::string_view rest = inner.substr(colon + 1);
  if (rest.empty() || rest.front() != ' ') bad("expected a single space after ':'");
  rest.remove_prefix(1);
  if (rest.empty() || is_space(rest.front()) || is_space(rest.back())) bad("empty or padded description");
  try {
    Role::from_token(token);
  } catch (const Error&) {
    throw Error(ErrorKind::UnknownClass, "'" + std::string(token) + "' is not a taxonomy class token");
  }
  return {std::string(token), std::string(rest)};
}

struct BranchName {
  int iteration = 0;
  int improvement = 0;
  std::string to_string() const {
    return "iteration" + std::to_string(iteration) + "-improvement" + std::to_string(improvement);
  }
  friend bool operator==(const BranchName&, const BranchName&) = default;
};

/// Throws BranchFormat.
inline BranchName parse_branch_name(std::string_view text) {
  auto bad = [&] {
    throw Error(ErrorKind::BranchFormat,
                "expected 'iteration<K>-improvement<M>' with K, M >= 1, got '" + std::string(text) + "'");
  };
  auto number = [&](std::string_view& s) {
    std::size_t n = 0;
    while (n < s.size() && s[n] >= '0' && s[n] <= '9') ++n;
    if (n == 0 || n > 9 || s[0] == '0') bad();
    int v = std::stoi(std::string(s.substr(0, n)));
    s.remove_prefix(n);
    return v;
  };
  constexpr std::string_view kIter = "iteration", kImpr = "-improvement";
  std::string_view s = text;
  if (s.substr(0, kIter.size()) != kIter) bad();
  s.remove_prefix(kIter.size());
  int k = number(s);
  if (s.substr(0, kImpr.size()) != kImpr) bad();
  s.remove_prefix(kImpr.size());
  int m = number(s);
  if (!s.empty()) bad();
  return {k, m};
}

}  // namespace figchain
