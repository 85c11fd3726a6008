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

// Binary-response data for the crossed participant × item model
//
//   logit Pr(Y_ij = 1) = b0 + b1 V_ij + b2 P_i + b3 V_ij P_i + u_i + v_j.

#pragma once

#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "figchain/assessment.hpp"
#include "figchain/error.hpp"

namespace figchain::glmm {

using Beta = std::array<double, 4>;

inline constexpr std::array<const char*, 4> kCoefficientNames = {"intercept", "version", "pretest",
                                                                  "version:pretest"};

struct Row {
  int participant = 0;
  int item = 0;
  double version = 0;  // 0 or 1
  double pretest = 0;  // centered
  int y = 0;
};

struct Dataset {
  std::vector<Row> rows;
  int n_participants = 0;
  int n_items = 0;
  std::vector<std::string> participant_ids;  // optional labels, by index
  std::vector<std::string> item_ids;

  double linear_predictor(const Row& r, const Beta& b) const {
    return b[0] + b[1] * r.version + b[2] * r.pretest + b[3] * r.version * r.pretest;
  }
};

/// Subtracts the mean. Throws InvalidDataset for an empty input.
inline std::vector<double> center_pretest(const std::vector<double>& raw) {
  if (raw.empty()) throw Error(ErrorKind::InvalidDataset, "need at least one participant");
  // Two passes keep the output mean at rounding level.
  double mean = std::accumulate(raw.begin(), raw.end(), 0.0) / static_cast<double>(raw.size());
  std::vector<double> out(raw.size());
  for (std::size_t k = 0; k < raw.size(); ++k) out[k] = raw[k] - mean;
  double resid = std::accumulate(out.begin(), out.end(), 0.0) / static_cast<double>(out.size());
  for (auto& x : out) x -= resid;
  return out;
}

/// Throws InvalidDataset when an invariant fails.
inline void validate(const Dataset& d) {
  auto bad = [](const std::string& why) { throw Error(ErrorKind::InvalidDataset, why); };
  if (d.rows.empty()) bad("no rows");
  if (d.n_participants <= 0 || d.n_items <= 0) bad("need at least one participant and one item");
  std::vector<char> seen_p(static_cast<std::size_t>(d.n_participants)), seen_i(static_cast<std::size_t>(d.n_items));
  std::vector<double> p_of(static_cast<std::size_t>(d.n_participants), std::nan(""));
  for (std::size_t k = 0; k < d.rows.size(); ++k) {
    const Row& r = d.rows[k];
    std::string where = " (row " + std::to_string(k) + ")";
    if (r.participant < 0 || r.participant >= d.n_participants) bad("participant index out of range" + where);
    if (r.item < 0 || r.item >= d.n_items) bad("item index out of range" + where);
    if (r.version != 0 && r.version != 1) bad("version must be 0 or 1" + where);
    if (r.y != 0 && r.y != 1) bad("outcome must be 0 or 1" + where);
    if (!std::isfinite(r.pretest)) bad("pretest must be finite" + where);
    auto& p = p_of[static_cast<std::size_t>(r.participant)];
    if (std::isnan(p)) p = r.pretest;
    else if (p != r.pretest) bad("pretest varies within participant " + std::to_string(r.participant) + where);
    seen_p[static_cast<std::size_t>(r.participant)] = 1;
    seen_i[static_cast<std::size_t>(r.item)] = 1;
  }
  for (int i = 0; i < d.n_participants; ++i)
    if (!seen_p[static_cast<std::size_t>(i)]) bad("participant index " + std::to_string(i) + " has no rows");
  for (int j = 0; j < d.n_items; ++j)
    if (!seen_i[static_cast<std::size_t>(j)]) bad("item index " + std::to_string(j) + " has no rows");
  double mean = std::accumulate(p_of.begin(), p_of.end(), 0.0) / d.n_participants;
  if (std::abs(mean) >= 1e-9) bad("pretest is not centered (participant mean " + std::to_string(mean) + ")");
}

inline bool has_both_versions(const Dataset& d) {
  bool v0 = false, v1 = false;
  for (const auto& r : d.rows) (r.version == 0 ? v0 : v1) = true;
  return v0 && v1;
}

/// Builds a dataset from response records and raw pre-test scores. The first
/// version tag in natural order is the reference (V = 0); exactly two tags
/// are allowed. Participants and items are indexed in natural order of id.
inline Dataset dataset_from_records(const std::vector<ResponseRecord>& records,
                                    const std::map<std::string, double>& raw_pretest) {
  auto versions = versions_of(records);
  if (versions.size() != 2)
    throw Error(ErrorKind::InvalidDataset,
                "the model compares exactly two versions; found " + std::to_string(versions.size()));
  std::map<std::string, int, NaturalLess> pidx, iidx;
  std::map<std::string, std::string> version_of;
  for (const auto& r : records) {
    pidx.emplace(r.participant_id, 0);
    iidx.emplace(r.question_id, 0);
    auto [it, fresh] = version_of.emplace(r.participant_id, r.version_tag);
    if (!fresh && it->second != r.version_tag)
      throw Error(ErrorKind::InvalidDataset, "participant '" + r.participant_id + "' saw more than one version");
  }
  Dataset d;
  for (auto& [id, k] : pidx) {
    k = d.n_participants++;
    d.participant_ids.push_back(id);
  }
  for (auto& [id, k] : iidx) {
    k = d.n_items++;
    d.item_ids.push_back(id);
  }
  std::vector<double> raw;
  for (const auto& id : d.participant_ids) {
    auto it = raw_pretest.find(id);
    if (it == raw_pretest.end()) throw Error(ErrorKind::InvalidDataset, "no pre-test score for '" + id + "'");
    raw.push_back(it->second);
  }
  auto centered = center_pretest(raw);
  for (const auto& r : records) {
    int i = pidx.at(r.participant_id);
    d.rows.push_back({i, iidx.at(r.question_id), r.version_tag == versions[0] ? 0.0 : 1.0,
                      centered[static_cast<std::size_t>(i)], r.correct ? 1 : 0});
  }
  return d;
}

}  // namespace figchain::glmm
