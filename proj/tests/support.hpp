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

#include <filesystem>
#include <random>
#include <string>

#include "figchain/figchain.hpp"

namespace testing_support {

inline std::filesystem::path fixture(const std::string& rel) { return std::filesystem::path(FIGCHAIN_FIXTURES) / rel; }

inline std::string read_fixture(const std::string& rel) { return figchain::read_file(fixture(rel)); }

inline figchain::FigureDocument figure(const std::string& rel) {
  return figchain::parse_figure(read_fixture(rel), fixture(rel).string());
}

inline figchain::FigureMap ops_map() { return figchain::parse_figure_map(read_fixture("ops/figure.map")); }
inline figchain::FigureMap bars_map() { return figchain::parse_figure_map(read_fixture("bars/bars.map")); }

/// Path of the element carrying `id`, or "" when absent.
inline std::string path_of_id(const figchain::FigureDocument& doc, const std::string& id) {
  std::string out;
  doc.for_each([&](const figchain::Element& e) {
    if (e.id && *e.id == id) out = e.path;
  });
  return out;
}

/// Fresh temporary directory, removed by the caller.
inline std::filesystem::path temp_dir(const std::string& tag) {
  static std::mt19937_64 rng(std::random_device{}());
  auto p = std::filesystem::temp_directory_path() / ("figchain-" + tag + "-" + std::to_string(rng()));
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace testing_support
