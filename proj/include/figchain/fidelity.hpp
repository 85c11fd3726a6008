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

// Data-fidelity check on rendered marks. Mark geometry must be invariant up
// to one global per-axis affine map (x' = sx·x + tx, y' = sy·y + ty) fitted
// by least squares over all mark anchor points. An axis that only fits a
// logarithmic reparametrisation needs a declared "log-scale-x"/"log-scale-y".
// When neither explains the change, the worst-fitting mark is set aside and
// the fit repeated until the remaining marks agree; the set-aside marks are
// the offenders.

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "figchain/diff.hpp"
#include "figchain/error.hpp"
#include "figchain/figure_map.hpp"
#include "figchain/svg_model.hpp"

namespace figchain {

/// Relative fidelity tolerance: fraction of the mark bounding-box diagonal.
inline constexpr double kFidelityTolerance = 0.005;

enum class FidelityStatus { Pass, Violation, NeedsDeclaredTransform };

constexpr std::string_view to_string(FidelityStatus s) {
  switch (s) {
    case FidelityStatus::Pass: return "Pass";
    case FidelityStatus::Violation: return "Violation";
    case FidelityStatus::NeedsDeclaredTransform: return "NeedsDeclaredTransform";
  }
  return "Violation";
}

struct AxisAffine {
  double scale_x = 1, scale_y = 1, translate_x = 0, translate_y = 0;
};

struct FidelityReport {
  FidelityStatus status = FidelityStatus::Pass;
  std::vector<ElementChange> mark_changes;
  std::optional<AxisAffine> fitted_transform;
  double residual = 0;
  double tolerance = 0;
  std::vector<std::string> declared_transforms;  // honoured declarations
  std::vector<std::string> offending;            // old-document mark paths
  std::vector<std::string> warnings;
  std::string message;
};

struct TransformDeclaration {
  enum class Kind { LogScaleX, LogScaleY, UnitConversion } kind;
  double factor = 1;
  std::string text;
};

/// Registry lookup: "log-scale-x", "log-scale-y", "unit-conversion:<factor>".
inline std::optional<TransformDeclaration> parse_transform_declaration(std::string_view text) {
  if (text == "log-scale-x") return TransformDeclaration{TransformDeclaration::Kind::LogScaleX, 1, std::string(text)};
  if (text == "log-scale-y") return TransformDeclaration{TransformDeclaration::Kind::LogScaleY, 1, std::string(text)};
  constexpr std::string_view unit = "unit-conversion:";
  if (text.substr(0, unit.size()) == unit) {
    auto num = text.substr(unit.size());
    double f = 0;
    auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), f);
    if (ec == std::errc() && ptr == num.data() + num.size() && f > 0 && std::isfinite(f))
      return TransformDeclaration{TransformDeclaration::Kind::UnitConversion, f, std::string(text)};
  }
  return std::nullopt;
}

namespace detail {

struct AxisFit {
  double scale = 1, shift = 0;
};

// Least-squares v' = scale·v + shift; translation only when v is constant.
inline AxisFit fit_axis(const std::vector<double>& from, const std::vector<double>& to) {
  const double n = static_cast<double>(from.size());
  if (from.empty()) return {};
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < from.size(); ++i) {
    mx += from[i];
    my += to[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < from.size(); ++i) {
    sxx += (from[i] - mx) * (from[i] - mx);
    sxy += (from[i] - mx) * (to[i] - my);
  }
  double spread = 0;
  for (double v : from) spread = std::max(spread, std::abs(v - mx));
  if (spread < kGeometryTolerance) return {1.0, my - mx};
  double scale = sxy / sxx;
  return {scale, my - scale * mx};
}

struct LogFit {
  double residual = std::numeric_limits<double>::infinity();
};

// Best max-deviation of v' ≈ a + b·ln|v − c| with c outside the data range.
inline LogFit fit_log_axis(const std::vector<double>& from, const std::vector<double>& to) {
  LogFit best;
  if (from.size() < 2) return best;
  double lo = *std::min_element(from.begin(), from.end());
  double hi = *std::max_element(from.begin(), from.end());
  double range = std::max(hi - lo, kGeometryTolerance);
  auto evaluate = [&](double c) {
    std::vector<double> t(from.size());
    for (std::size_t i = 0; i < from.size(); ++i) t[i] = std::log(std::abs(from[i] - c));
    auto f = fit_axis(t, to);
    double r = 0;
    for (std::size_t i = 0; i < from.size(); ++i) r = std::max(r, std::abs(f.scale * t[i] + f.shift - to[i]));
    return r;
  };
  for (int side = 0; side < 2; ++side) {
    auto origin = [&](double k) {
      double s = range * std::pow(10.0, k);
      return side == 0 ? lo - s : hi + s;
    };
    double best_k = -6, best_r = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 240; ++i) {
      double k = -6 + 0.05 * i;
      double r = evaluate(origin(k));
      if (r < best_r) {
        best_r = r;
        best_k = k;
      }
    }
    // Golden-section refinement on the bracketing grid cell.
    double a = best_k - 0.05, b = best_k + 0.05;
    const double g = (std::sqrt(5.0) - 1) / 2;
    double c1 = b - g * (b - a), c2 = a + g * (b - a);
    double f1 = evaluate(origin(c1)), f2 = evaluate(origin(c2));
    for (int it = 0; it < 60; ++it) {
      if (f1 < f2) {
        b = c2;
        c2 = c1;
        f2 = f1;
        c1 = b - g * (b - a);
        f1 = evaluate(origin(c1));
      } else {
        a = c1;
        c1 = c2;
        f1 = f2;
        c2 = a + g * (b - a);
        f2 = evaluate(origin(c2));
      }
    }
    best_r = std::min({best_r, f1, f2});
    best.residual = std::min(best.residual, best_r);
  }
  return best;
}

struct MarkPair {
  std::string old_path;
  std::vector<Point> from, to;
};

inline double max_deviation(const MarkPair& p, const AxisFit& fx, const AxisFit& fy) {
  double r = 0;
  for (std::size_t i = 0; i < p.from.size(); ++i) {
    r = std::max(r, std::abs(fx.scale * p.from[i].x + fx.shift - p.to[i].x));
    r = std::max(r, std::abs(fy.scale * p.from[i].y + fy.shift - p.to[i].y));
  }
  return r;
}

inline void fit_pairs(const std::vector<const MarkPair*>& pairs, AxisFit& fx, AxisFit& fy) {
  std::vector<double> ox, nx, oy, ny;
  for (const auto* p : pairs) {
    for (std::size_t i = 0; i < p->from.size(); ++i) {
      ox.push_back(p->from[i].x);
      nx.push_back(p->to[i].x);
      oy.push_back(p->from[i].y);
      ny.push_back(p->to[i].y);
    }
  }
  fx = fit_axis(ox, nx);
  fy = fit_axis(oy, ny);
}

}  // namespace detail

/// Throws NoMarks when neither version has a rendered marks-role element.
inline FidelityReport check_data_fidelity(const FigureDocument& old_doc, const FigureDocument& new_doc,
                                          const FigureMap& map,
                                          const std::vector<std::string>& declared = {}) {
  FidelityReport report;
  bool log_x = false, log_y = false;
  for (const auto& d : declared) {
    auto decl = parse_transform_declaration(d);
    if (!decl) {
      report.warnings.push_back("unrecognized transform declaration '" + d +
                                "' (known: log-scale-x, log-scale-y, unit-conversion:<factor>)");
      continue;
    }
    report.declared_transforms.push_back(decl->text);
    if (decl->kind == TransformDeclaration::Kind::LogScaleX) log_x = true;
    if (decl->kind == TransformDeclaration::Kind::LogScaleY) log_y = true;
  }

  Matching m = match_documents(old_doc, new_doc, map);
  auto is_mark = [](const detail::Flat& f) {
    return f.role.first_level() == Aspect::Marks && f.element->geometry.rendered &&
           !f.element->geometry.anchors.empty();
  };
  std::size_t old_marks = 0, new_marks = 0;
  for (const auto& f : m.old_nodes) old_marks += is_mark(f);
  for (const auto& f : m.new_nodes) new_marks += is_mark(f);
  if (old_marks == 0 && new_marks == 0)
    throw Error(ErrorKind::NoMarks, "neither version has marks-role elements; check the figure map");

  for (auto& c : diff(old_doc, new_doc, map)) {
    if (c.role.first_level() != Aspect::Marks) continue;
    if (c.kind != ChangeKind::Modify || c.facets.count(Facet::Geometry)) report.mark_changes.push_back(std::move(c));
  }

  BBox extent;
  for (const auto& f : m.old_nodes)
    if (is_mark(f)) extent.add(f.element->geometry.bbox);
  double diag = extent.diagonal();
  if (!(diag > 0)) diag = std::hypot(old_doc.width, old_doc.height);
  report.tolerance = kFidelityTolerance * diag;

  std::vector<detail::MarkPair> pairs;
  for (std::size_t i = 0; i < m.old_nodes.size(); ++i) {
    const auto& fo = m.old_nodes[i];
    if (!is_mark(fo)) continue;
    int j = m.old_to_new[i];
    if (j < 0 || !is_mark(m.new_nodes[static_cast<std::size_t>(j)])) {
      report.offending.push_back(fo.element->path);
      continue;
    }
    const auto& fn = m.new_nodes[static_cast<std::size_t>(j)];
    if (fo.element->geometry.anchors.size() != fn.element->geometry.anchors.size()) {
      report.offending.push_back(fo.element->path);
      continue;
    }
    pairs.push_back({fo.element->path, fo.element->geometry.anchors, fn.element->geometry.anchors});
  }
  std::size_t added = 0;
  for (std::size_t j = 0; j < m.new_nodes.size(); ++j) {
    if (!is_mark(m.new_nodes[j])) continue;
    int i = m.new_to_old[j];
    if (i < 0 || !is_mark(m.old_nodes[static_cast<std::size_t>(i)])) ++added;
  }
  if (!report.offending.empty() || added > 0) {
    report.status = FidelityStatus::Violation;
    report.message = "mark set changed: " + std::to_string(report.offending.size()) +
                     " removed or restructured, " + std::to_string(added) + " added";
    report.residual = std::numeric_limits<double>::infinity();
    return report;
  }

  std::vector<const detail::MarkPair*> inliers;
  for (const auto& p : pairs) inliers.push_back(&p);
  detail::AxisFit fx, fy;
  detail::fit_pairs(inliers, fx, fy);
  report.fitted_transform = AxisAffine{fx.scale, fy.scale, fx.shift, fy.shift};

  auto axis_residual = [&](bool x_axis) {
    double r = 0;
    for (const auto& p : pairs)
      for (std::size_t k = 0; k < p.from.size(); ++k)
        r = std::max(r, x_axis ? std::abs(fx.scale * p.from[k].x + fx.shift - p.to[k].x)
                               : std::abs(fy.scale * p.from[k].y + fy.shift - p.to[k].y));
    return r;
  };
  double rx = axis_residual(true), ry = axis_residual(false);
  report.residual = std::max(rx, ry);
  if (report.residual <= report.tolerance) {
    report.status = FidelityStatus::Pass;
    return report;
  }

  // Would a logarithmic axis explain every failing axis?
  auto coords = [&](bool x_axis, bool old_side) {
    std::vector<double> v;
    for (const auto& p : pairs)
      for (const auto& q : old_side ? p.from : p.to) v.push_back(x_axis ? q.x : q.y);
    return v;
  };
  bool x_fail = rx > report.tolerance, y_fail = ry > report.tolerance;
  bool x_log = !x_fail || detail::fit_log_axis(coords(true, true), coords(true, false)).residual <= report.tolerance;
  bool y_log = !y_fail || detail::fit_log_axis(coords(false, true), coords(false, false)).residual <= report.tolerance;
  if (x_log && y_log) {
    bool covered = (!x_fail || log_x) && (!y_fail || log_y);
    std::string axes = std::string(x_fail ? "x" : "") + (x_fail && y_fail ? "," : "") + (y_fail ? "y" : "");
    if (covered) {
      report.status = FidelityStatus::Pass;
      report.message = "mark geometry explained by declared log scale on " + axes;
      report.residual = std::max(x_fail ? 0.0 : rx, y_fail ? 0.0 : ry);
    } else {
      report.status = FidelityStatus::NeedsDeclaredTransform;
      report.message = "mark geometry fits a log-scale change on " + axes + "; declare it explicitly";
    }
    return report;
  }

  // Trim the worst mark until the rest agree.
  std::vector<std::string> trimmed;
  while (inliers.size() > 1) {
    double worst = -1;
    std::size_t worst_idx = 0;
    for (std::size_t k = 0; k < inliers.size(); ++k) {
      double d = detail::max_deviation(*inliers[k], fx, fy);
      if (d > worst + kGeometryTolerance) {
        worst = d;
        worst_idx = k;
      }
    }
    if (worst <= report.tolerance) break;
    trimmed.push_back(inliers[worst_idx]->old_path);
    inliers.erase(inliers.begin() + static_cast<std::ptrdiff_t>(worst_idx));
    detail::fit_pairs(inliers, fx, fy);
  }
  double residual = 0;
  for (const auto& p : pairs) residual = std::max(residual, detail::max_deviation(p, fx, fy));
  if (trimmed.empty()) {
    // A single mark that cannot be fitted exactly is its own offender.
    for (const auto& p : pairs) trimmed.push_back(p.old_path);
  }
  report.status = FidelityStatus::Violation;
  report.fitted_transform = AxisAffine{fx.scale, fy.scale, fx.shift, fy.shift};
  report.residual = residual;
  report.offending = trimmed;
  report.message = std::to_string(trimmed.size()) + " mark(s) deviate from the common axis transform";
  return report;
}

}  // namespace figchain
