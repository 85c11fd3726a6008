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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace figchain {

/// Every failure the library reports carries one of these kinds so callers
/// (and the CLI exit-code mapping) can branch without parsing messages.
enum class ErrorKind {
  // svg-model
  MalformedXml,
  UnsupportedFeature,
  AmbiguousRule,
  UnknownRole,
  DuplicateSelector,
  SyntaxError,
  // diff-engine
  MixedAspect,
  NoMarks,
  // audit-trail
  MsgFormat,
  UnknownClass,
  BranchFormat,
  MissingArtifact,
  ManifestIncomplete,
  UnknownOperation,
  InvalidVerdict,
  InvalidTransition,
  // assessment
  SchemaError,
  UnknownQuestion,
  ChoiceOutOfRange,
  DuplicateResponse,
  EmptyRecords,
  MixedVersions,
  NoAnnotatedSpan,
  InvalidQuestion,
  // glmm
  NonConvergence,
  InvalidDataset,
  // generic
  Io,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedXml: return "MalformedXml";
    case ErrorKind::UnsupportedFeature: return "UnsupportedFeature";
    case ErrorKind::AmbiguousRule: return "AmbiguousRule";
    case ErrorKind::UnknownRole: return "UnknownRole";
    case ErrorKind::DuplicateSelector: return "DuplicateSelector";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::MixedAspect: return "MixedAspect";
    case ErrorKind::NoMarks: return "NoMarks";
    case ErrorKind::MsgFormat: return "MsgFormat";
    case ErrorKind::UnknownClass: return "UnknownClass";
    case ErrorKind::BranchFormat: return "BranchFormat";
    case ErrorKind::MissingArtifact: return "MissingArtifact";
    case ErrorKind::ManifestIncomplete: return "ManifestIncomplete";
    case ErrorKind::UnknownOperation: return "UnknownOperation";
    case ErrorKind::InvalidVerdict: return "InvalidVerdict";
    case ErrorKind::InvalidTransition: return "InvalidTransition";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::UnknownQuestion: return "UnknownQuestion";
    case ErrorKind::ChoiceOutOfRange: return "ChoiceOutOfRange";
    case ErrorKind::DuplicateResponse: return "DuplicateResponse";
    case ErrorKind::EmptyRecords: return "EmptyRecords";
    case ErrorKind::MixedVersions: return "MixedVersions";
    case ErrorKind::NoAnnotatedSpan: return "NoAnnotatedSpan";
    case ErrorKind::InvalidQuestion: return "InvalidQuestion";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::InvalidDataset: return "InvalidDataset";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::string location = {})
      : std::runtime_error(format(kind, message, location)),
        kind_(kind),
        location_(std::move(location)) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// Element path, line number, row number or section name; may be empty.
  const std::string& location() const noexcept { return location_; }

 private:
  static std::string format(ErrorKind kind, const std::string& message,
                            const std::string& location) {
    std::string out(to_string(kind));
    if (!location.empty()) out += " at " + location;
    out += ": " + message;
    return out;
  }

  ErrorKind kind_;
  std::string location_;
};

}  // namespace figchain
