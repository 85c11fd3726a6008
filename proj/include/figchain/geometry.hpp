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

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "figchain/error.hpp"

namespace figchain {

/// Bounding boxes and shape anchors are resolved to within this many user
/// units.
inline constexpr double kGeometryTolerance = 1e-6;

struct Point {
  double x = 0;
  double y = 0;
  friend bool operator==(const Point&, const Point&) = default;
};

struct BBox {
  double min_x = std::numeric_limits<double>::infinity();
  double min_y = std::numeric_limits<double>::infinity();
  double max_x = -std::numeric_limits<double>::infinity();
  double max_y = -std::numeric_limits<double>::infinity();

  static BBox of(double x0, double y0, double x1, double y1) {
    BBox b;
    b.add(Point{x0, y0});
    b.add(Point{x1, y1});
    return b;
  }

  bool empty() const { return min_x > max_x || min_y > max_y; }
  double width() const { return empty() ? 0 : max_x - min_x; }
  double height() const { return empty() ? 0 : max_y - min_y; }
  double diagonal() const { return std::hypot(width(), height()); }
  Point center() const { return {(min_x + max_x) / 2, (min_y + max_y) / 2}; }

  void add(Point p) {
    min_x = std::min(min_x, p.x);
    min_y = std::min(min_y, p.y);
    max_x = std::max(max_x, p.x);
    max_y = std::max(max_y, p.y);
  }
  void add(const BBox& o) {
    if (o.empty()) return;
    add(Point{o.min_x, o.min_y});
    add(Point{o.max_x, o.max_y});
  }
};

/// 2-D affine map [a c e; b d f] in SVG matrix order.
struct Affine {
  double a = 1, b = 0, c = 0, d = 1, e = 0, f = 0;

  Point apply(Point p) const { return {a * p.x + c * p.y + e, b * p.x + d * p.y + f}; }
  /// Linear part only (for direction vectors).
  Point apply_linear(Point v) const { return {a * v.x + c * v.y, b * v.x + d * v.y}; }

  /// this * o: apply o first, then this.
  Affine operator*(const Affine& o) const {
    return {a * o.a + c * o.b, b * o.a + d * o.b, a * o.c + c * o.d,
            b * o.c + d * o.d, a * o.e + c * o.f + e, b * o.e + d * o.f + f};
  }

  static Affine translate(double tx, double ty) { return {1, 0, 0, 1, tx, ty}; }
  static Affine scale(double sx, double sy) { return {sx, 0, 0, sy, 0, 0}; }
  static Affine rotate(double deg) {
    double r = deg * std::numbers::pi / 180.0;
    return {std::cos(r), std::sin(r), -std::sin(r), std::cos(r), 0, 0};
  }
};

namespace detail {

inline bool is_ws_or_comma(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == ',';
}

/// Cursor over SVG number lists ("10,20 -3.5e2").
class NumberScanner {
 public:
  explicit NumberScanner(std::string_view s) : s_(s) {}

  void skip() {
    while (pos_ < s_.size() && is_ws_or_comma(s_[pos_])) ++pos_;
  }
  bool done() {
    skip();
    return pos_ >= s_.size();
  }
  char peek() {
    skip();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }
  void advance() { ++pos_; }

  std::optional<double> number() {
    skip();
    if (pos_ >= s_.size()) return std::nullopt;
    const char* begin = s_.data() + pos_;
    const char* end = s_.data() + s_.size();
    // from_chars rejects a leading '+'.
    if (*begin == '+') ++begin;
    double v = 0;
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc()) return std::nullopt;
    pos_ = static_cast<std::size_t>(ptr - s_.data());
    return v;
  }

  /// Arc flags may be written without separators ("a1 1 0 00 10 10").
  std::optional<double> flag() {
    skip();
    if (pos_ < s_.size() && (s_[pos_] == '0' || s_[pos_] == '1'))
      return static_cast<double>(s_[pos_++] - '0');
    return std::nullopt;
  }

  std::string_view rest() const { return s_.substr(pos_); }
  std::size_t position() const { return pos_; }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses an SVG length into user units (px at 96 dpi). Percentages are not
/// resolvable without a viewport and are rejected.
inline std::optional<double> parse_length(std::string_view s) {
  while (!s.empty() && (s.front() == ' ')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ')) s.remove_suffix(1);
  if (s.empty()) return std::nullopt;
  const char* begin = s.data();
  if (*begin == '+') ++begin;
  double v = 0;
  auto [ptr, ec] = std::from_chars(begin, s.data() + s.size(), v);
  if (ec != std::errc()) return std::nullopt;
  std::string_view unit(ptr, static_cast<std::size_t>(s.data() + s.size() - ptr));
  if (unit.empty() || unit == "px") return v;
  if (unit == "pt") return v * 96.0 / 72.0;
  if (unit == "pc") return v * 16.0;
  if (unit == "in") return v * 96.0;
  if (unit == "cm") return v * 96.0 / 2.54;
  if (unit == "mm") return v * 96.0 / 25.4;
  return std::nullopt;
}

inline std::vector<double> parse_number_list(std::string_view s) {
  detail::NumberScanner sc(s);
  std::vector<double> out;
  while (!sc.done()) {
    auto v = sc.number();
    if (!v) break;
    out.push_back(*v);
  }
  return out;
}

/// Parses a `transform` attribute. Throws SyntaxError on malformed input.
inline Affine parse_transform(std::string_view s) {
  Affine total;
  std::size_t pos = 0;
  auto bad = [&] {
    throw Error(ErrorKind::SyntaxError, "bad transform '" + std::string(s) + "'");
  };
  while (true) {
    while (pos < s.size() && detail::is_ws_or_comma(s[pos])) ++pos;
    if (pos >= s.size()) break;
    std::size_t start = pos;
    while (pos < s.size() && std::isalpha(static_cast<unsigned char>(s[pos]))) ++pos;
    std::string_view name = s.substr(start, pos - start);
    while (pos < s.size() && s[pos] == ' ') ++pos;
    if (pos >= s.size() || s[pos] != '(') bad();
    auto close = s.find(')', pos);
    if (close == std::string_view::npos) bad();
    auto args = parse_number_list(s.substr(pos + 1, close - pos - 1));
    pos = close + 1;
    Affine t;
    if (name == "matrix" && args.size() == 6) {
      t = {args[0], args[1], args[2], args[3], args[4], args[5]};
    } else if (name == "translate" && (args.size() == 1 || args.size() == 2)) {
      t = Affine::translate(args[0], args.size() == 2 ? args[1] : 0);
    } else if (name == "scale" && (args.size() == 1 || args.size() == 2)) {
      t = Affine::scale(args[0], args.size() == 2 ? args[1] : args[0]);
    } else if (name == "rotate" && args.size() == 1) {
      t = Affine::rotate(args[0]);
    } else if (name == "rotate" && args.size() == 3) {
      t = Affine::translate(args[1], args[2]) * Affine::rotate(args[0]) *
          Affine::translate(-args[1], -args[2]);
    } else if (name == "skewX" && args.size() == 1) {
      t = {1, 0, std::tan(args[0] * std::numbers::pi / 180.0), 1, 0, 0};
    } else if (name == "skewY" && args.size() == 1) {
      t = {1, std::tan(args[0] * std::numbers::pi / 180.0), 0, 1, 0, 0};
    } else {
      bad();
    }
    total = total * t;
  }
  return total;
}

/// One drawable primitive of a path in absolute coordinates.
struct Segment {
  enum class Kind { Line, Quad, Cubic, Arc } kind = Kind::Line;
  std::vector<Point> points;  // start, controls..., end
  // Arc only: radii, x-axis rotation (deg), flags.
  double rx = 0, ry = 0, rotation = 0;
  bool large_arc = false, sweep = false;
};

struct PathData {
  std::vector<Segment> segments;
  std::vector<Point> vertices;  // every segment endpoint incl. subpath starts
};

/// Parses path data into absolute segments. Throws SyntaxError.
inline PathData parse_path(std::string_view d) {
  PathData out;
  detail::NumberScanner sc(d);
  Point cur{}, start{}, last_ctrl{};
  char prev_cmd = 0;
  char cmd = 0;
  auto bad = [&](const char* why) {
    throw Error(ErrorKind::SyntaxError,
                std::string("path data: ") + why + " near offset " +
                    std::to_string(sc.position()));
  };
  auto num = [&]() {
    auto v = sc.number();
    if (!v) bad("expected number");
    return *v;
  };
  auto flag = [&]() {
    auto v = sc.flag();
    if (!v) bad("expected arc flag");
    return *v != 0;
  };
  while (!sc.done()) {
    char c = sc.peek();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      cmd = c;
      sc.advance();
    } else if (cmd == 0) {
      bad("data must start with a command");
    } else if (cmd == 'M') {
      cmd = 'L';
    } else if (cmd == 'm') {
      cmd = 'l';
    } else if (cmd == 'Z' || cmd == 'z') {
      bad("numbers after closepath");
    }
    bool rel = std::islower(static_cast<unsigned char>(cmd)) != 0;
    char up = static_cast<char>(std::toupper(static_cast<unsigned char>(cmd)));
    auto abs_pt = [&](double x, double y) {
      return rel ? Point{cur.x + x, cur.y + y} : Point{x, y};
    };
    switch (up) {
      case 'M': {
        double x = num(), y = num();
        cur = abs_pt(x, y);
        start = cur;
        out.vertices.push_back(cur);
        break;
      }
      case 'L': case 'H': case 'V': {
        Point p = cur;
        if (up == 'L') {
          double x = num(), y = num();
          p = abs_pt(x, y);
        } else if (up == 'H') {
          double x = num();
          p.x = rel ? cur.x + x : x;
        } else {
          double y = num();
          p.y = rel ? cur.y + y : y;
        }
        out.segments.push_back({Segment::Kind::Line, {cur, p}});
        cur = p;
        out.vertices.push_back(cur);
        break;
      }
      case 'C': case 'S': {
        Point c1;
        if (up == 'C') {
          double x1 = num(), y1 = num();
          c1 = abs_pt(x1, y1);
        } else {
          char pu = static_cast<char>(std::toupper(static_cast<unsigned char>(prev_cmd)));
          c1 = (pu == 'C' || pu == 'S') ? Point{2 * cur.x - last_ctrl.x, 2 * cur.y - last_ctrl.y}
                                        : cur;
        }
        double x2 = num(), y2 = num();
        Point c2 = abs_pt(x2, y2);
        double x = num(), y = num();
        Point p = abs_pt(x, y);
        out.segments.push_back({Segment::Kind::Cubic, {cur, c1, c2, p}});
        last_ctrl = c2;
        cur = p;
        out.vertices.push_back(cur);
        break;
      }
      case 'Q': case 'T': {
        Point c1;
        if (up == 'Q') {
          double x1 = num(), y1 = num();
          c1 = abs_pt(x1, y1);
        } else {
          char pu = static_cast<char>(std::toupper(static_cast<unsigned char>(prev_cmd)));
          c1 = (pu == 'Q' || pu == 'T') ? Point{2 * cur.x - last_ctrl.x, 2 * cur.y - last_ctrl.y}
                                        : cur;
        }
        double x = num(), y = num();
        Point p = abs_pt(x, y);
        out.segments.push_back({Segment::Kind::Quad, {cur, c1, p}});
        last_ctrl = c1;
        cur = p;
        out.vertices.push_back(cur);
        break;
      }
      case 'A': {
        Segment s;
        s.kind = Segment::Kind::Arc;
        s.rx = std::abs(num());
        s.ry = std::abs(num());
        s.rotation = num();
        s.large_arc = flag();
        s.sweep = flag();
        double x = num(), y = num();
        Point p = abs_pt(x, y);
        s.points = {cur, p};
        out.segments.push_back(s);
        cur = p;
        out.vertices.push_back(cur);
        break;
      }
      case 'Z': {
        if (cur.x != start.x || cur.y != start.y)
          out.segments.push_back({Segment::Kind::Line, {cur, start}});
        cur = start;
        break;
      }
      default:
        bad("unknown command");
    }
    prev_cmd = cmd;
  }
  return out;
}

namespace detail {

// Roots of a t^2 + b t + c = 0 inside (0, 1).
inline void unit_quadratic_roots(double a, double b, double c, std::vector<double>& out) {
  constexpr double eps = 1e-14;
  if (std::abs(a) < eps) {
    if (std::abs(b) > eps) {
      double t = -c / b;
      if (t > 0 && t < 1) out.push_back(t);
    }
    return;
  }
  double disc = b * b - 4 * a * c;
  if (disc < 0) return;
  double sq = std::sqrt(disc);
  for (double t : {(-b + sq) / (2 * a), (-b - sq) / (2 * a)})
    if (t > 0 && t < 1) out.push_back(t);
}

inline Point cubic_at(const std::vector<Point>& p, double t) {
  double u = 1 - t;
  double b0 = u * u * u, b1 = 3 * u * u * t, b2 = 3 * u * t * t, b3 = t * t * t;
  return {b0 * p[0].x + b1 * p[1].x + b2 * p[2].x + b3 * p[3].x,
          b0 * p[0].y + b1 * p[1].y + b2 * p[2].y + b3 * p[3].y};
}

inline Point quad_at(const std::vector<Point>& p, double t) {
  double u = 1 - t;
  return {u * u * p[0].x + 2 * u * t * p[1].x + t * t * p[2].x,
          u * u * p[0].y + 2 * u * t * p[1].y + t * t * p[2].y};
}

struct ArcCenter {
  Point center;
  Point axis_u, axis_v;  // rx*(cos φ, sin φ), ry*(-sin φ, cos φ)
  double theta1 = 0, dtheta = 0;
  bool degenerate = false;
};

// Endpoint-to-center conversion for elliptical arcs.
inline ArcCenter arc_center(const Segment& s) {
  ArcCenter out;
  Point p0 = s.points[0], p1 = s.points[1];
  double rx = s.rx, ry = s.ry;
  if (rx == 0 || ry == 0 || (p0.x == p1.x && p0.y == p1.y)) {
    out.degenerate = true;
    return out;
  }
  double phi = s.rotation * std::numbers::pi / 180.0;
  double cp = std::cos(phi), sp = std::sin(phi);
  double dx = (p0.x - p1.x) / 2, dy = (p0.y - p1.y) / 2;
  double x1p = cp * dx + sp * dy, y1p = -sp * dx + cp * dy;
  double lambda = (x1p * x1p) / (rx * rx) + (y1p * y1p) / (ry * ry);
  if (lambda > 1) {
    double k = std::sqrt(lambda);
    rx *= k;
    ry *= k;
  }
  double num = rx * rx * ry * ry - rx * rx * y1p * y1p - ry * ry * x1p * x1p;
  double den = rx * rx * y1p * y1p + ry * ry * x1p * x1p;
  double coef = den == 0 ? 0 : std::sqrt(std::max(0.0, num / den));
  if (s.large_arc == s.sweep) coef = -coef;
  double cxp = coef * rx * y1p / ry, cyp = -coef * ry * x1p / rx;
  out.center = {cp * cxp - sp * cyp + (p0.x + p1.x) / 2,
                sp * cxp + cp * cyp + (p0.y + p1.y) / 2};
  auto angle = [](double ux, double uy, double vx, double vy) {
    return std::atan2(ux * vy - uy * vx, ux * vx + uy * vy);
  };
  out.theta1 = angle(1, 0, (x1p - cxp) / rx, (y1p - cyp) / ry);
  double dtheta = angle((x1p - cxp) / rx, (y1p - cyp) / ry, (-x1p - cxp) / rx, (-y1p - cyp) / ry);
  if (!s.sweep && dtheta > 0) dtheta -= 2 * std::numbers::pi;
  if (s.sweep && dtheta < 0) dtheta += 2 * std::numbers::pi;
  out.dtheta = dtheta;
  out.axis_u = {rx * cp, rx * sp};
  out.axis_v = {-ry * sp, ry * cp};
  return out;
}

inline bool angle_in_sweep(double t, double theta1, double dtheta) {
  constexpr double two_pi = 2 * std::numbers::pi;
  double rel = dtheta >= 0 ? t - theta1 : theta1 - t;
  rel = std::fmod(rel, two_pi);
  if (rel < 0) rel += two_pi;
  return rel <= std::abs(dtheta);
}

}  // namespace detail

/// Exact bounding box of a segment after applying `m`.
inline BBox segment_bbox(const Segment& s, const Affine& m) {
  BBox box;
  switch (s.kind) {
    case Segment::Kind::Line:
      box.add(m.apply(s.points[0]));
      box.add(m.apply(s.points[1]));
      break;
    case Segment::Kind::Quad: {
      std::vector<Point> p;
      for (auto q : s.points) p.push_back(m.apply(q));
      box.add(p[0]);
      box.add(p[2]);
      for (int axis = 0; axis < 2; ++axis) {
        auto c = [&](int i) { return axis == 0 ? p[i].x : p[i].y; };
        double den = c(0) - 2 * c(1) + c(2);
        if (std::abs(den) > 1e-14) {
          double t = (c(0) - c(1)) / den;
          if (t > 0 && t < 1) box.add(detail::quad_at(p, t));
        }
      }
      break;
    }
    case Segment::Kind::Cubic: {
      std::vector<Point> p;
      for (auto q : s.points) p.push_back(m.apply(q));
      box.add(p[0]);
      box.add(p[3]);
      std::vector<double> ts;
      for (int axis = 0; axis < 2; ++axis) {
        auto c = [&](int i) { return axis == 0 ? p[i].x : p[i].y; };
        // derivative / 3 = a t^2 + b t + c
        double a = -c(0) + 3 * c(1) - 3 * c(2) + c(3);
        double b = 2 * (c(0) - 2 * c(1) + c(2));
        double cc = c(1) - c(0);
        detail::unit_quadratic_roots(a, b, cc, ts);
      }
      for (double t : ts) box.add(detail::cubic_at(p, t));
      break;
    }
    case Segment::Kind::Arc: {
      box.add(m.apply(s.points[0]));
      box.add(m.apply(s.points[1]));
      auto arc = detail::arc_center(s);
      if (arc.degenerate) break;
      // P(t) = C + U cos t + V sin t in transformed space.
      Point c = m.apply(arc.center);
      Point u = m.apply_linear(arc.axis_u), v = m.apply_linear(arc.axis_v);
      for (int axis = 0; axis < 2; ++axis) {
        double ua = axis == 0 ? u.x : u.y, va = axis == 0 ? v.x : v.y;
        double t0 = std::atan2(va, ua);
        for (double t : {t0, t0 + std::numbers::pi}) {
          if (detail::angle_in_sweep(t, arc.theta1, arc.dtheta))
            box.add(Point{c.x + u.x * std::cos(t) + v.x * std::sin(t),
                          c.y + u.y * std::cos(t) + v.y * std::sin(t)});
        }
      }
      break;
    }
  }
  return box;
}

/// Point on a segment at parameter t in [0,1] (untransformed).
inline Point segment_at(const Segment& s, double t) {
  switch (s.kind) {
    case Segment::Kind::Line:
      return {s.points[0].x + t * (s.points[1].x - s.points[0].x),
              s.points[0].y + t * (s.points[1].y - s.points[0].y)};
    case Segment::Kind::Quad: return detail::quad_at(s.points, t);
    case Segment::Kind::Cubic: return detail::cubic_at(s.points, t);
    case Segment::Kind::Arc: {
      auto arc = detail::arc_center(s);
      if (arc.degenerate) return segment_at({Segment::Kind::Line, s.points}, t);
      double th = arc.theta1 + t * arc.dtheta;
      return {arc.center.x + arc.axis_u.x * std::cos(th) + arc.axis_v.x * std::sin(th),
              arc.center.y + arc.axis_u.y * std::cos(th) + arc.axis_v.y * std::sin(th)};
    }
  }
  return s.points.front();
}

inline BBox path_bbox(const PathData& path, const Affine& m) {
  BBox box;
  for (const auto& s : path.segments) box.add(segment_bbox(s, m));
  for (auto v : path.vertices) box.add(m.apply(v));
  return box;
}

}  // namespace figchain
