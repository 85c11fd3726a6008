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

// Normalized SVG element tree. Elements are addressed by their document-order
// index chain ("/" for the root, "/0/2" for the third child of the root's
// first child), so every element is addressable whether or not it has an id.

#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "figchain/error.hpp"
#include "figchain/geometry.hpp"
#include "figchain/xml.hpp"

namespace figchain {

struct Geometry {
  /// False for structural/paint-server elements and anything inside defs.
  bool rendered = false;
  /// Bounding box in root user units (all ancestor transforms applied).
  BBox bbox;
  /// Shape parameters as written, e.g. {"x", 0}, {"width", 4}.
  std::vector<std::pair<std::string, double>> params;
  /// Points that locate the shape: rect corners, circle center, path
  /// vertices, text anchor. In root user units.
  std::vector<Point> anchors;
};

struct Element {
  std::string tag;
  std::optional<std::string> id;
  std::set<std::string> classes;
  std::vector<std::pair<std::string, std::string>> attributes;  // source order
  std::optional<std::string> text_content;
  std::string tail;
  std::vector<Element> children;
  Geometry geometry;
  std::string path;

  const std::string* attribute(std::string_view key) const {
    for (const auto& [k, v] : attributes)
      if (k == key) return &v;
    return nullptr;
  }

  /// Structural equality: tag, attributes, character data and children.
  /// Paths and derived geometry are ignored.
  friend bool same_tree(const Element& a, const Element& b) {
    if (a.tag != b.tag || a.attributes != b.attributes ||
        a.text_content != b.text_content || a.tail != b.tail ||
        a.children.size() != b.children.size())
      return false;
    for (std::size_t i = 0; i < a.children.size(); ++i)
      if (!same_tree(a.children[i], b.children[i])) return false;
    return true;
  }
};

struct FigureDocument {
  double width = 0;
  double height = 0;
  Element root;
  std::string source_path;

  /// Pre-order traversal, root first.
  void for_each(const std::function<void(const Element&)>& fn) const {
    std::function<void(const Element&)> walk = [&](const Element& e) {
      fn(e);
      for (const auto& c : e.children) walk(c);
    };
    walk(root);
  }

  const Element* find(std::string_view path) const {
    if (path == "/") return &root;
    if (path.empty() || path[0] != '/') return nullptr;
    const Element* cur = &root;
    std::size_t pos = 1;
    while (pos <= path.size()) {
      auto slash = path.find('/', pos);
      if (slash == std::string_view::npos) slash = path.size();
      std::size_t idx = 0;
      auto seg = path.substr(pos, slash - pos);
      if (seg.empty()) return nullptr;
      for (char c : seg) {
        if (c < '0' || c > '9') return nullptr;
        idx = idx * 10 + static_cast<std::size_t>(c - '0');
      }
      if (idx >= cur->children.size()) return nullptr;
      cur = &cur->children[idx];
      pos = slash + 1;
    }
    return cur;
  }

  std::size_t element_count() const {
    std::size_t n = 0;
    for_each([&](const Element&) { ++n; });
    return n;
  }
};

inline std::string child_path(std::string_view parent, std::size_t index) {
  std::string out(parent == "/" ? "" : parent);
  out += "/" + std::to_string(index);
  return out;
}

inline std::string parent_path(std::string_view path) {
  auto slash = path.rfind('/');
  if (slash == 0 || slash == std::string_view::npos) return "/";
  return std::string(path.substr(0, slash));
}

namespace detail {

inline const std::set<std::string, std::less<>>& shape_tags() {
  static const std::set<std::string, std::less<>> tags = {
      "rect", "circle", "ellipse", "line", "path", "polyline", "polygon", "text"};
  return tags;
}

inline const std::set<std::string, std::less<>>& container_tags() {
  static const std::set<std::string, std::less<>> tags = {"svg", "g", "a", "use", "tspan"};
  return tags;
}

// Allowed but never rendered directly; their subtrees are definitions.
inline const std::set<std::string, std::less<>>& definition_tags() {
  static const std::set<std::string, std::less<>> tags = {
      "defs", "clipPath", "marker", "symbol", "linearGradient", "radialGradient", "pattern"};
  return tags;
}

inline const std::set<std::string, std::less<>>& inert_tags() {
  static const std::set<std::string, std::less<>> tags = {"title", "desc", "metadata", "stop"};
  return tags;
}

inline bool is_internal_ref(std::string_view v) { return !v.empty() && v[0] == '#'; }

inline void check_urls(std::string_view value, const std::string& path, std::string_view attr) {
  std::size_t pos = 0;
  while ((pos = value.find("url(", pos)) != std::string_view::npos) {
    pos += 4;
    while (pos < value.size() && (value[pos] == ' ' || value[pos] == '\'' || value[pos] == '"'))
      ++pos;
    if (pos >= value.size() || value[pos] != '#')
      throw Error(ErrorKind::UnsupportedFeature,
                  "external url() reference in attribute '" + std::string(attr) + "'", path);
  }
}

inline std::optional<std::string> style_property(const std::string* style, std::string_view key) {
  if (!style) return std::nullopt;
  std::string_view s = *style;
  std::size_t pos = 0;
  while (pos < s.size()) {
    auto semi = s.find(';', pos);
    if (semi == std::string_view::npos) semi = s.size();
    auto decl = s.substr(pos, semi - pos);
    auto colon = decl.find(':');
    if (colon != std::string_view::npos) {
      auto k = decl.substr(0, colon);
      while (!k.empty() && k.front() == ' ') k.remove_prefix(1);
      while (!k.empty() && k.back() == ' ') k.remove_suffix(1);
      if (k == key) {
        auto v = decl.substr(colon + 1);
        while (!v.empty() && v.front() == ' ') v.remove_prefix(1);
        while (!v.empty() && v.back() == ' ') v.remove_suffix(1);
        return std::string(v);
      }
    }
    pos = semi + 1;
  }
  return std::nullopt;
}

inline std::size_t utf8_length(std::string_view s) {
  std::size_t n = 0;
  for (char c : s)
    if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++n;
  return n;
}

class Builder {
 public:
  Element build(const xml::Node& node, const std::string& path, bool in_metadata) {
    Element e;
    e.tag = node.name;
    e.attributes = node.attributes;
    e.tail = node.tail;
    e.path = path;
    if (!node.text.empty()) e.text_content = node.text;
    bool metadata = in_metadata || node.name == "metadata";
    if (!in_metadata) validate(node, path);
    if (const auto* id = node.attribute("id")) {
      e.id = *id;
      if (!metadata) ids_.emplace(*id, path);
    }
    if (const auto* cls = node.attribute("class")) {
      std::string_view rest = *cls;
      while (!rest.empty()) {
        auto sp = rest.find_first_of(" \t\n");
        auto tok = rest.substr(0, sp);
        if (!tok.empty()) e.classes.emplace(tok);
        if (sp == std::string_view::npos) break;
        rest.remove_prefix(sp + 1);
      }
    }
    for (std::size_t i = 0; i < node.children.size(); ++i)
      e.children.push_back(build(node.children[i], child_path(path, i), metadata));
    return e;
  }

  const std::unordered_map<std::string, std::string>& ids() const { return ids_; }

 private:
  static void validate(const xml::Node& node, const std::string& path) {
    const std::string& tag = node.name;
    if (!shape_tags().count(tag) && !container_tags().count(tag) &&
        !definition_tags().count(tag) && !inert_tags().count(tag)) {
      throw Error(ErrorKind::UnsupportedFeature, "element <" + tag + "> is not supported", path);
    }
    for (const auto& [k, v] : node.attributes) {
      if (k == "href" || k == "xlink:href") {
        if (!is_internal_ref(v))
          throw Error(ErrorKind::UnsupportedFeature, "external reference '" + v + "'", path);
      } else if (k == "filter" || k == "mask") {
        throw Error(ErrorKind::UnsupportedFeature, "'" + k + "' is not supported", path);
      }
      check_urls(v, path, k);
      if (k == "style" && (style_property(&v, "filter") || style_property(&v, "mask")))
        throw Error(ErrorKind::UnsupportedFeature, "filter/mask in style is not supported", path);
    }
  }

  std::unordered_map<std::string, std::string> ids_;
};

inline double attr_number(const Element& e, std::string_view key, double fallback = 0) {
  const auto* v = e.attribute(key);
  if (!v) return fallback;
  auto len = parse_length(*v);
  if (!len)
    throw Error(ErrorKind::SyntaxError,
                "attribute " + std::string(key) + "='" + *v + "' is not a length", e.path);
  return *len;
}

/// Resolves geometry in place. `ctm` maps this element's parent user space to
/// root user space.
class GeometryResolver {
 public:
  GeometryResolver(Element& root, const std::unordered_map<std::string, std::string>& ids)
      : root_(root), ids_(ids) {}

  void run() { resolve(root_, Affine{}, true, 0); }

 private:
  Element* lookup(const std::string& path) {
    // Path lookup on the mutable tree.
    if (path == "/") return &root_;
    Element* cur = &root_;
    std::size_t pos = 1;
    while (pos <= path.size()) {
      auto slash = path.find('/', pos);
      if (slash == std::string::npos) slash = path.size();
      auto idx = static_cast<std::size_t>(std::stoul(path.substr(pos, slash - pos)));
      cur = &cur->children[idx];
      pos = slash + 1;
    }
    return cur;
  }

  double font_size(const Element& e, double inherited) {
    if (auto fs = style_property(e.attribute("style"), "font-size"))
      if (auto v = parse_length(*fs)) return *v;
    if (const auto* fs = e.attribute("font-size"))
      if (auto v = parse_length(*fs)) return *v;
    return inherited;
  }

  BBox resolve(Element& e, const Affine& parent_ctm, bool rendered, int depth,
               double inherited_font = 16.0) {
    if (depth > 64)
      throw Error(ErrorKind::UnsupportedFeature, "reference nesting too deep", e.path);
    Geometry& g = e.geometry;
    g = Geometry{};
    bool is_root = e.path == "/";
    Affine ctm = parent_ctm;
    if (const auto* t = e.attribute("transform")) {
      try {
        ctm = ctm * parse_transform(*t);
      } catch (const Error& err) {
        throw Error(ErrorKind::SyntaxError, err.what(), e.path);
      }
    }
    if (definition_tags().count(e.tag)) rendered = false;
    if (inert_tags().count(e.tag)) rendered = false;
    g.rendered = rendered && !inert_tags().count(e.tag);
    double fs = font_size(e, inherited_font);

    const std::string& tag = e.tag;
    auto add_anchor = [&](Point p) {
      Point q = ctm.apply(p);
      g.anchors.push_back(q);
      g.bbox.add(q);
    };
    if (tag == "rect") {
      double x = attr_number(e, "x"), y = attr_number(e, "y");
      double w = attr_number(e, "width"), h = attr_number(e, "height");
      if (w < 0 || h < 0) throw Error(ErrorKind::SyntaxError, "negative rect size", e.path);
      g.params = {{"x", x}, {"y", y}, {"width", w}, {"height", h}};
      add_anchor({x, y});
      add_anchor({x + w, y});
      add_anchor({x + w, y + h});
      add_anchor({x, y + h});
    } else if (tag == "circle" || tag == "ellipse") {
      double cx = attr_number(e, "cx"), cy = attr_number(e, "cy");
      double rx, ry;
      if (tag == "circle") {
        rx = ry = attr_number(e, "r");
        g.params = {{"cx", cx}, {"cy", cy}, {"r", rx}};
      } else {
        rx = attr_number(e, "rx");
        ry = attr_number(e, "ry");
        g.params = {{"cx", cx}, {"cy", cy}, {"rx", rx}, {"ry", ry}};
      }
      Point c = ctm.apply({cx, cy});
      g.anchors.push_back(c);
      // Transformed ellipse: c + U cos t + V sin t.
      Point u = ctm.apply_linear({rx, 0}), v = ctm.apply_linear({0, ry});
      double hx = std::hypot(u.x, v.x), hy = std::hypot(u.y, v.y);
      g.bbox = BBox::of(c.x - hx, c.y - hy, c.x + hx, c.y + hy);
    } else if (tag == "line") {
      double x1 = attr_number(e, "x1"), y1 = attr_number(e, "y1");
      double x2 = attr_number(e, "x2"), y2 = attr_number(e, "y2");
      g.params = {{"x1", x1}, {"y1", y1}, {"x2", x2}, {"y2", y2}};
      add_anchor({x1, y1});
      add_anchor({x2, y2});
    } else if (tag == "polyline" || tag == "polygon") {
      auto nums = parse_number_list(e.attribute("points") ? *e.attribute("points") : "");
      if (nums.size() % 2 != 0)
        throw Error(ErrorKind::SyntaxError, "odd number of coordinates in points", e.path);
      for (std::size_t i = 0; i + 1 < nums.size(); i += 2) add_anchor({nums[i], nums[i + 1]});
      g.params = {{"points", static_cast<double>(nums.size() / 2)}};
    } else if (tag == "path") {
      PathData pd;
      try {
        pd = parse_path(e.attribute("d") ? *e.attribute("d") : "");
      } catch (const Error& err) {
        throw Error(ErrorKind::SyntaxError, err.what(), e.path);
      }
      g.bbox = path_bbox(pd, ctm);
      for (auto v : pd.vertices) g.anchors.push_back(ctm.apply(v));
      g.params = {{"segments", static_cast<double>(pd.segments.size())}};
    } else if (tag == "text") {
      auto xs = parse_number_list(e.attribute("x") ? *e.attribute("x") : "0");
      auto ys = parse_number_list(e.attribute("y") ? *e.attribute("y") : "0");
      double x = xs.empty() ? 0 : xs[0], y = ys.empty() ? 0 : ys[0];
      g.params = {{"x", x}, {"y", y}, {"font-size", fs}};
      // Extent is an estimate (no font metrics): 0.6 em per glyph, ascent
      // 0.8 em, descent 0.2 em.
      std::string all = e.text_content.value_or("");
      for (const auto& c : e.children)
        if (c.tag == "tspan") all += c.text_content.value_or("") + c.tail;
      double w = 0.6 * fs * static_cast<double>(utf8_length(all));
      std::string anchor = "start";
      if (const auto* a = e.attribute("text-anchor")) anchor = *a;
      if (auto a = style_property(e.attribute("style"), "text-anchor")) anchor = *a;
      double x0 = anchor == "middle" ? x - w / 2 : anchor == "end" ? x - w : x;
      g.anchors.push_back(ctm.apply({x, y}));
      for (Point p : {Point{x0, y - 0.8 * fs}, Point{x0 + w, y - 0.8 * fs},
                      Point{x0 + w, y + 0.2 * fs}, Point{x0, y + 0.2 * fs}})
        g.bbox.add(ctm.apply(p));
    } else if (tag == "use") {
      const auto* ref = e.attribute("href") ? e.attribute("href") : e.attribute("xlink:href");
      double x = attr_number(e, "x"), y = attr_number(e, "y");
      g.params = {{"x", x}, {"y", y}};
      if (ref) {
        auto it = ids_.find(ref->substr(1));
        if (it == ids_.end())
          throw Error(ErrorKind::UnsupportedFeature, "dangling reference '" + *ref + "'", e.path);
        Element copy = *lookup(it->second);
        Affine use_ctm = ctm * Affine::translate(x, y);
        BBox b = resolve(copy, use_ctm, true, depth + 1, fs);
        g.bbox = b;
        for (auto p : copy.geometry.anchors) g.anchors.push_back(p);
        if (g.anchors.empty()) g.anchors.push_back(use_ctm.apply({0, 0}));
      }
    }

    BBox children_box;
    Affine child_ctm = ctm;
    for (auto& c : e.children) {
      BBox cb = resolve(c, child_ctm, rendered, depth, fs);
      if (c.geometry.rendered) children_box.add(cb);
    }
    if (tag == "g" || tag == "a" || tag == "tspan" || tag == "svg" || is_root) g.bbox = children_box;
    return g.bbox;
  }

  Element& root_;
  const std::unordered_map<std::string, std::string>& ids_;
};

inline xml::Node to_xml(const Element& e) {
  xml::Node n;
  n.name = e.tag;
  n.attributes = e.attributes;
  n.text = e.text_content.value_or("");
  n.tail = e.tail;
  for (const auto& c : e.children) n.children.push_back(to_xml(c));
  return n;
}

}  // namespace detail

/// Re-derives paths, ids, classes and geometry after a tree edit.
inline void refresh(FigureDocument& doc) {
  xml::Node node = detail::to_xml(doc.root);
  detail::Builder builder;
  doc.root = builder.build(node, "/", false);
  detail::GeometryResolver(doc.root, builder.ids()).run();
}

/// Parses SVG bytes into a FigureDocument. Throws MalformedXml for
/// unparseable input and UnsupportedFeature (with the element path) for
/// constructs outside the supported subset.
inline FigureDocument parse_figure(std::string_view svg_bytes, std::string source_path = {}) {
  xml::Node node = xml::parse(svg_bytes);
  if (node.name != "svg")
    throw Error(ErrorKind::MalformedXml, "root element is <" + node.name + ">, expected <svg>", "/");
  FigureDocument doc;
  doc.source_path = std::move(source_path);
  detail::Builder builder;
  doc.root = builder.build(node, "/", false);
  detail::GeometryResolver(doc.root, builder.ids()).run();

  std::vector<double> viewbox;
  if (const auto* vb = doc.root.attribute("viewBox")) viewbox = parse_number_list(*vb);
  auto dimension = [&](std::string_view key, std::size_t vb_index) -> double {
    if (const auto* v = doc.root.attribute(key)) {
      auto len = parse_length(*v);
      if (!len)
        throw Error(ErrorKind::UnsupportedFeature,
                    "root " + std::string(key) + "='" + *v + "' is not an absolute length", "/");
      return *len;
    }
    if (viewbox.size() == 4) return viewbox[vb_index];
    throw Error(ErrorKind::UnsupportedFeature,
                "root has neither " + std::string(key) + " nor a viewBox", "/");
  };
  doc.width = dimension("width", 2);
  doc.height = dimension("height", 3);
  if (!(doc.width > 0) || !(doc.height > 0))
    throw Error(ErrorKind::SyntaxError, "figure width and height must be positive", "/");
  return doc;
}

inline std::string serialize(const FigureDocument& doc) { return xml::write(detail::to_xml(doc.root)); }

}  // namespace figchain
