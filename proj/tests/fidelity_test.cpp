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


#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"

using namespace figchain;
using testing_support::bars_map;
using testing_support::figure;
using testing_support::path_of_id;

namespace {

// Independent closed-form least squares for one axis.
std::pair<double, double> ls_fit(const std::vector<double>& x, const std::vector<double>& y) {
  double n = static_cast<double>(x.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double b = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return {b, (sy - b * sx) / n};
}

struct Rect {
  double x, y, w, h;
};

std::string bars_svg(const std::vector<Rect>& bars, const char* fill = "#1b9e77") {
  std::string s = R"(<svg xmlns="http://www.w3.org/2000/svg" width="240" height="240">)";
  int k = 0;
  for (const auto& b : bars)
    s += "<rect id=\"bar-" + std::to_string(k++) + "\" x=\"" + std::to_string(b.x) + "\" y=\"" + std::to_string(b.y) +
         "\" width=\"" + std::to_string(b.w) + "\" height=\"" + std::to_string(b.h) + "\" fill=\"" + fill + "\"/>";
  return s + "</svg>";
}

const std::vector<Rect> kBase = {{50, 100, 30, 100}, {100, 50, 30, 150}, {150, 80, 30, 120}};

}  // namespace

TEST(Fidelity, SingleBarHeightChangeIsAViolation) {
  auto base = figure("bars/base.svg"), taller = figure("bars/taller.svg");
  auto r = check_data_fidelity(base, taller, bars_map());
  EXPECT_EQ(r.status, FidelityStatus::Violation);
  ASSERT_EQ(r.offending.size(), 1u);
  EXPECT_EQ(r.offending[0], path_of_id(base, "bar-b"));
  EXPECT_NEAR(r.tolerance, 0.005 * std::hypot(130.0, 150.0), 1e-12);

  // Oracle: the global fit over all twelve corners leaves a residual above
  // tolerance; the fit over the two unchanged bars is the identity and
  // leaves bar-b's top 15 units off.
  std::vector<double> oy, ny;
  for (const auto& [o, n] : {std::pair<Rect, Rect>{kBase[0], kBase[0]},
                             {kBase[1], Rect{100, 35, 30, 165}},
                             {kBase[2], kBase[2]}})
    for (double f : {0.0, 0.0, 1.0, 1.0}) {
      oy.push_back(o.y + f * o.h);
      ny.push_back(n.y + f * n.h);
    }
  auto [b, a] = ls_fit(oy, ny);
  double global = 0;
  for (std::size_t i = 0; i < oy.size(); ++i) global = std::max(global, std::abs(b * oy[i] + a - ny[i]));
  EXPECT_GT(global, r.tolerance);
  EXPECT_NEAR(r.residual, 15.0, 1e-9);
  ASSERT_TRUE(r.fitted_transform);
  EXPECT_NEAR(r.fitted_transform->scale_y, 1.0, 1e-12);
  EXPECT_NEAR(r.fitted_transform->translate_y, 0.0, 1e-9);
}

TEST(Fidelity, RecolorIsAPass) {
  auto r = check_data_fidelity(figure("bars/base.svg"), figure("bars/recolor.svg"), bars_map());
  EXPECT_EQ(r.status, FidelityStatus::Pass);
  EXPECT_EQ(r.residual, 0);
  EXPECT_TRUE(r.offending.empty());
}

TEST(Fidelity, UniformRescaleRecoversTheAxisMap) {
  auto r = check_data_fidelity(figure("bars/base.svg"), figure("bars/rescale.svg"), bars_map());
  EXPECT_EQ(r.status, FidelityStatus::Pass);
  ASSERT_TRUE(r.fitted_transform);
  EXPECT_NEAR(r.fitted_transform->scale_x, 1.5, 1e-9);
  EXPECT_NEAR(r.fitted_transform->scale_y, 1.2, 1e-9);
  EXPECT_NEAR(r.fitted_transform->translate_x, 10, 1e-7);
  EXPECT_NEAR(r.fitted_transform->translate_y, -30, 1e-7);
  EXPECT_LT(r.residual, 1e-7);
}

TEST(Fidelity, FittedTransformMatchesIndependentLeastSquares) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> noise(-0.3, 0.3);
  auto m = bars_map();
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Rect> moved;
    std::vector<double> ox, nx, oy, ny;
    for (const auto& r : kBase) {
      // Round as bars_svg does so the oracle sees the serialized numbers.
      auto six = [](double v) { return std::stod(std::to_string(v)); };
      Rect n{six(2 * r.x + 5 + noise(rng)), six(0.5 * r.y + 40 + noise(rng)), six(2 * r.w), six(0.5 * r.h)};
      moved.push_back(n);
      for (auto [fx, fy] : {std::pair{0., 0.}, {1., 0.}, {1., 1.}, {0., 1.}}) {
        ox.push_back(r.x + fx * r.w);
        nx.push_back(n.x + fx * n.w);
        oy.push_back(r.y + fy * r.h);
        ny.push_back(n.y + fy * n.h);
      }
    }
    auto rep = check_data_fidelity(parse_figure(bars_svg(kBase)), parse_figure(bars_svg(moved)), m);
    auto [bx, ax] = ls_fit(ox, nx);
    auto [by, ay] = ls_fit(oy, ny);
    ASSERT_TRUE(rep.fitted_transform);
    EXPECT_NEAR(rep.fitted_transform->scale_x, bx, 1e-9);
    EXPECT_NEAR(rep.fitted_transform->translate_x, ax, 1e-7);
    EXPECT_NEAR(rep.fitted_transform->scale_y, by, 1e-9);
    EXPECT_NEAR(rep.fitted_transform->translate_y, ay, 1e-7);
  }
}

TEST(Fidelity, StatusIsMonotoneInTheSizeOfTheDistortion) {
  auto m = bars_map();
  auto base = parse_figure(bars_svg(kBase));
  bool violated = false;
  for (double delta = 0; delta <= 6; delta += 0.1) {
    auto bars = kBase;
    bars[1].y -= delta;
    bars[1].h += delta;
    auto r = check_data_fidelity(base, parse_figure(bars_svg(bars)), m);
    if (violated) {
      EXPECT_EQ(r.status, FidelityStatus::Violation) << delta;
    }
    violated = r.status == FidelityStatus::Violation;
  }
  EXPECT_TRUE(violated);
}

TEST(Fidelity, AddedOrRemovedMarksAreViolations) {
  auto m = bars_map();
  auto base = parse_figure(bars_svg(kBase));
  auto fewer = parse_figure(bars_svg({kBase[0], kBase[1]}));
  auto r = check_data_fidelity(base, fewer, m);
  EXPECT_EQ(r.status, FidelityStatus::Violation);
  EXPECT_EQ(r.offending, std::vector<std::string>{"/2"});
  EXPECT_EQ(check_data_fidelity(fewer, base, m).status, FidelityStatus::Violation);
}

TEST(Fidelity, LogScaleNeedsADeclaration) {
  auto m = parse_figure_map("id-prefix pt- => marks-point\ndefault => other\n");
  std::string before = R"(<svg width="300" height="300">)", after = before;
  for (int k = 1; k <= 10; ++k) {
    double y = 10.0 * k, y2 = 280 - 50 * std::log(y);
    std::string id = "pt-" + std::to_string(k), cx = std::to_string(20 * k);
    before += "<circle id=\"" + id + "\" cx=\"" + cx + "\" cy=\"" + std::to_string(y) + "\" r=\"2\"/>";
    after += "<circle id=\"" + id + "\" cx=\"" + cx + "\" cy=\"" + std::to_string(y2) + "\" r=\"2\"/>";
  }
  auto a = parse_figure(before + "</svg>"), b = parse_figure(after + "</svg>");
  EXPECT_EQ(check_data_fidelity(a, b, m).status, FidelityStatus::NeedsDeclaredTransform);
  EXPECT_EQ(check_data_fidelity(a, b, m, {"log-scale-x"}).status, FidelityStatus::NeedsDeclaredTransform);
  auto ok = check_data_fidelity(a, b, m, {"log-scale-y"});
  EXPECT_EQ(ok.status, FidelityStatus::Pass);
  EXPECT_EQ(ok.declared_transforms, std::vector<std::string>{"log-scale-y"});
}

TEST(Fidelity, UnknownDeclarationsWarnAndMissingMarksThrow) {
  auto base = figure("bars/base.svg");
  auto r = check_data_fidelity(base, base, bars_map(), {"squash-y", "unit-conversion:2.5"});
  EXPECT_EQ(r.warnings.size(), 1u);
  EXPECT_EQ(r.declared_transforms, std::vector<std::string>{"unit-conversion:2.5"});
  try {
    check_data_fidelity(base, base, parse_figure_map("default => other\n"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoMarks);
  }
  EXPECT_FALSE(parse_transform_declaration("unit-conversion:-1"));
  EXPECT_FALSE(parse_transform_declaration("unit-conversion:abc"));
}
