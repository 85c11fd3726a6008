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

// Nelder-Mead simplex minimizer (reflection 1, expansion 2, contraction ½,
// shrink ½) with optional lower bounds enforced by projection.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

namespace figchain::glmm {

struct SimplexOptions {
  int max_iter = 2000;
  double ftol = 1e-6;  // relative spread of vertex values
  double xtol = 1e-6;  // max coordinate distance of any vertex from the best
  std::vector<double> lower;  // per-coordinate lower bound, empty = none
};

struct SimplexResult {
  std::vector<double> x;
  double f = 0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

/// Minimizes `f` from the simplex {x0, x0 + step_k e_k}.
inline SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                 const std::vector<double>& x0, const std::vector<double>& step,
                                 const SimplexOptions& opts = {}) {
  const std::size_t n = x0.size();
  SimplexResult res;
  auto project = [&](std::vector<double>& x) {
    for (std::size_t k = 0; k < opts.lower.size() && k < n; ++k) x[k] = std::max(x[k], opts.lower[k]);
  };
  auto eval = [&](std::vector<double>& x) {
    project(x);
    ++res.evaluations;
    double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };
  std::vector<std::vector<double>> pts(n + 1, x0);
  std::vector<double> fv(n + 1);
  for (std::size_t k = 0; k < n; ++k) {
    pts[k + 1][k] += step[k];
    project(pts[k + 1]);
    // A step swallowed by a bound goes the other way.
    if (pts[k + 1][k] == x0[k]) pts[k + 1][k] = x0[k] + std::abs(step[k]);
  }
  for (std::size_t k = 0; k <= n; ++k) fv[k] = eval(pts[k]);

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), xr(n), xe(n), xc(n);
  for (res.iterations = 0;; ++res.iterations) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];
    double spread = fv[worst] - fv[best];
    double dx = 0;
    for (std::size_t k = 0; k <= n; ++k)
      for (std::size_t d = 0; d < n; ++d) dx = std::max(dx, std::abs(pts[k][d] - pts[best][d]));
    if (std::isfinite(fv[worst]) && spread <= opts.ftol * std::max(std::abs(fv[best]), 1e-12) && dx <= opts.xtol) {
      res.converged = true;
      break;
    }
    if (res.iterations >= opts.max_iter) break;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t k = 0; k <= n; ++k)
      if (k != worst)
        for (std::size_t d = 0; d < n; ++d) centroid[d] += pts[k][d] / static_cast<double>(n);
    for (std::size_t d = 0; d < n; ++d) xr[d] = centroid[d] + (centroid[d] - pts[worst][d]);
    double fr = eval(xr);
    if (fr < fv[best]) {
      for (std::size_t d = 0; d < n; ++d) xe[d] = centroid[d] + 2 * (centroid[d] - pts[worst][d]);
      double fe = eval(xe);
      if (fe < fr) {
        pts[worst] = xe;
        fv[worst] = fe;
      } else {
        pts[worst] = xr;
        fv[worst] = fr;
      }
      continue;
    }
    if (fr < fv[second]) {
      pts[worst] = xr;
      fv[worst] = fr;
      continue;
    }
    bool outside = fr < fv[worst];
    const auto& toward = outside ? xr : pts[worst];
    for (std::size_t d = 0; d < n; ++d) xc[d] = centroid[d] + 0.5 * (toward[d] - centroid[d]);
    double fc = eval(xc);
    if (fc < (outside ? fr : fv[worst])) {
      pts[worst] = xc;
      fv[worst] = fc;
      continue;
    }
    for (std::size_t k = 0; k <= n; ++k) {
      if (k == best) continue;
      for (std::size_t d = 0; d < n; ++d) pts[k][d] = pts[best][d] + 0.5 * (pts[k][d] - pts[best][d]);
      fv[k] = eval(pts[k]);
    }
  }
  std::size_t best = static_cast<std::size_t>(std::min_element(fv.begin(), fv.end()) - fv.begin());
  res.x = pts[best];
  res.f = fv[best];
  return res;
}

}  // namespace figchain::glmm
