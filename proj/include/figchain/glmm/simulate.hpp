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

// Synthetic two-version studies drawn from the model itself.

#pragma once

#include <cstdint>
#include <random>

#include "figchain/glmm/dataset.hpp"
#include "figchain/glmm/laplace.hpp"

namespace figchain::glmm {

struct SimulationSpec {
  Beta beta{2.153, 0.53, 0.236, 0};
  double sigma_u = 1.0;
  double sigma_v = 0.8;
  int participants_per_version = 100;
  int items = 33;
  int pretest_items = 9;  // raw pre-test score ~ Binomial(pretest_items, pretest_p)
  double pretest_p = 0.6;
  std::uint64_t seed = 1;
};

/// Participants 0..n-1 see V0, n..2n-1 see V1; everybody answers every item.
inline Dataset simulate(const SimulationSpec& s) {
  std::mt19937_64 rng(s.seed);
  std::normal_distribution<double> normal(0, 1);
  std::binomial_distribution<int> pre(s.pretest_items, s.pretest_p);
  std::uniform_real_distribution<double> unif(0, 1);
  Dataset d;
  d.n_participants = 2 * s.participants_per_version;
  d.n_items = s.items;
  std::vector<double> raw(static_cast<std::size_t>(d.n_participants)), u(raw.size()), v(static_cast<std::size_t>(s.items));
  for (auto& x : raw) x = pre(rng);
  for (auto& x : u) x = s.sigma_u * normal(rng);
  for (auto& x : v) x = s.sigma_v * normal(rng);
  auto p = center_pretest(raw);
  for (int i = 0; i < d.n_participants; ++i) {
    double ver = i < s.participants_per_version ? 0 : 1;
    for (int j = 0; j < s.items; ++j) {
      Row r{i, j, ver, p[static_cast<std::size_t>(i)], 0};
      double eta = d.linear_predictor(r, s.beta) + u[static_cast<std::size_t>(i)] + v[static_cast<std::size_t>(j)];
      r.y = unif(rng) < logistic(eta) ? 1 : 0;
      d.rows.push_back(r);
    }
  }
  return d;
}

}  // namespace figchain::glmm
