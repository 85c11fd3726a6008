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

// Role-aware structural diff between two versions of a figure.
//
// Matching runs in three passes: the two roots are paired; elements sharing
// an id (and tag) are paired; the rest are paired greedily inside
// (tag, role) buckets by nearest bounding-box centre, with attribute
// similarity and then document order breaking ties. Unpaired old elements
// become Remove entries, unpaired new elements become Add entries, and pairs
// that differ become Modify entries.
//
// The resulting change list is an edit script: apply_changes(old, diff) is
// structurally equal to new. Add/Remove entries carry the whole element
// (tag under "#tag", character data under "#text"/"#tail"), Modify entries
// carry every differing attribute, and an element whose parent or sibling
// order changed gets the "structure" facet; its new_ref then gives its new
// position.

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "figchain/error.hpp"
#include "figchain/figure_map.hpp"
#include "figchain/role.hpp"
#include "figchain/svg_model.hpp"

namespace figchain {

enum class ChangeKind { Add, Remove, Modify };

constexpr std::string_view to_string(ChangeKind k) {
  switch (k) {
    case ChangeKind::Add: return "Add";
    case ChangeKind::Remove: return "Remove";
    case ChangeKind::Modify: return "Modify";
  }
  return "Modify";
}

enum class Facet { Geometry, Style, Text, Structure };

constexpr std::string_view to_string(Facet f) {
  switch (f) {
    case Facet::Geometry: return "geometry";
    case Facet::Style: return "style";
    case Facet::Text: return "text";
    case Facet::Structure: return "structure";
  }
  return "style";
}

struct ValueChange {
  std::optional<std::string> old_value;
  std::optional<std::string> new_value;
  friend bool operator==(const ValueChange&, const ValueChange&) = default;
};

struct ElementChange {
  ChangeKind kind = ChangeKind::Modify;
  std::optional<std::string> old_ref;
  std::optional<std::string> new_ref;
  Role role;
  std::set<Facet> facets;
  /// Ordered (attribute or pseudo-key) → old/new value.
  std::vector<std::pair<std::string, ValueChange>> detail;

  const ValueChange* find(std::string_view key) const {
    for (const auto& [k, v] : detail)
      if (k == key) return &v;
    return nullptr;
  }
};

namespace detail {

inline const std::set<std::string, std::less<>>& geometry_attributes() {
  static const std::set<std::string, std::less<>> a = {
      "x", "y", "width", "height", "cx", "cy", "r", "rx", "ry", "x1", "y1",
      "x2", "y2", "points", "d", "transform", "viewBox", "dx", "dy",
      "href", "xlink:href", "preserveAspectRatio"};
  return a;
}

inline Facet facet_of(std::string_view key) {
  if (key == "#text" || key == "#tail") return Facet::Text;
  if (key == "#tag" || key == "#order" || key == "#match" || key == "id") return Facet::Structure;
  if (geometry_attributes().count(key)) return Facet::Geometry;
  return Facet::Style;
}

struct Flat {
  const Element* element = nullptr;
  Role role;
  int parent = -1;
  std::size_t index_in_parent = 0;
};

inline std::vector<Flat> flatten(const FigureDocument& doc, const FigureMap& map) {
  auto roles = role_index(doc, map);
  std::vector<Flat> out;
  std::function<void(const Element&, int, std::size_t)> walk = [&](const Element& e, int parent,
                                                                    std::size_t idx) {
    int me = static_cast<int>(out.size());
    out.push_back({&e, roles.at(e.path), parent, idx});
    for (std::size_t i = 0; i < e.children.size(); ++i) walk(e.children[i], me, i);
  };
  walk(doc.root, -1, 0);
  return out;
}

inline std::size_t attribute_mismatch(const Element& a, const Element& b) {
  std::size_t n = 0;
  for (const auto& [k, v] : a.attributes) {
    const auto* w = b.attribute(k);
    if (!w || *w != v) ++n;
  }
  for (const auto& [k, v] : b.attributes)
    if (!a.attribute(k)) ++n;
  if (a.text_content != b.text_content) ++n;
  return n;
}

}  // namespace detail

/// Element correspondence between two documents, by pre-order index.
struct Matching {
  std::vector<detail::Flat> old_nodes, new_nodes;
  std::vector<int> old_to_new, new_to_old;
  /// Pairs made by geometry whose key tied with a competing candidate.
  std::set<int> ambiguous_old;
};

inline Matching match_documents(const FigureDocument& old_doc, const FigureDocument& new_doc,
                                const FigureMap& map) {
  Matching m;
  m.old_nodes = detail::flatten(old_doc, map);
  m.new_nodes = detail::flatten(new_doc, map);
  const auto& on = m.old_nodes;
  const auto& nn = m.new_nodes;
  m.old_to_new.assign(on.size(), -1);
  m.new_to_old.assign(nn.size(), -1);
  auto pair_up = [&](int o, int n) {
    m.old_to_new[static_cast<std::size_t>(o)] = n;
    m.new_to_old[static_cast<std::size_t>(n)] = o;
  };
  pair_up(0, 0);

  // Ids, where unique within each document.
  auto id_table = [](const std::vector<detail::Flat>& nodes) {
    std::map<std::string, int> table;
    std::set<std::string> dup;
    for (std::size_t i = 1; i < nodes.size(); ++i) {
      const auto& id = nodes[i].element->id;
      if (!id) continue;
      if (!table.emplace(*id, static_cast<int>(i)).second) dup.insert(*id);
    }
    for (const auto& d : dup) table.erase(d);
    return table;
  };
  auto old_ids = id_table(on), new_ids = id_table(nn);
  for (const auto& [id, o] : old_ids) {
    auto it = new_ids.find(id);
    if (it == new_ids.end()) continue;
    if (on[static_cast<std::size_t>(o)].element->tag != nn[static_cast<std::size_t>(it->second)].element->tag)
      continue;
    pair_up(o, it->second);
  }

  // Greedy nearest-geometry within (tag, role) buckets.
  using Bucket = std::pair<std::string, std::string>;
  std::map<Bucket, std::pair<std::vector<int>, std::vector<int>>> buckets;
  for (std::size_t i = 0; i < on.size(); ++i)
    if (m.old_to_new[i] < 0)
      buckets[{on[i].element->tag, on[i].role.token()}].first.push_back(static_cast<int>(i));
  for (std::size_t i = 0; i < nn.size(); ++i)
    if (m.new_to_old[i] < 0)
      buckets[{nn[i].element->tag, nn[i].role.token()}].second.push_back(static_cast<int>(i));

  struct Candidate {
    double distance;
    std::size_t mismatch;
    int order_sum;
    int order_gap;
    int o, n;
    auto key() const { return std::tie(distance, mismatch, order_sum, order_gap, o, n); }
    bool same_score(const Candidate& c) const {
      return distance == c.distance && mismatch == c.mismatch;
    }
  };
  for (const auto& [bucket, members] : buckets) {
    const auto& [olds, news] = members;
    if (olds.empty() || news.empty()) continue;
    std::vector<Candidate> cands;
    cands.reserve(olds.size() * news.size());
    for (int o : olds) {
      const Element& eo = *on[static_cast<std::size_t>(o)].element;
      for (int n : news) {
        const Element& en = *nn[static_cast<std::size_t>(n)].element;
        double dist = 0;
        if (!eo.geometry.bbox.empty() && !en.geometry.bbox.empty()) {
          Point a = eo.geometry.bbox.center(), b = en.geometry.bbox.center();
          dist = std::hypot(a.x - b.x, a.y - b.y);
          // Sub-tolerance distances count as coincident.
          if (dist < kGeometryTolerance) dist = 0;
        }
        cands.push_back({dist, detail::attribute_mismatch(eo, en), o + n, std::abs(o - n), o, n});
      }
    }
    std::sort(cands.begin(), cands.end(),
              [](const Candidate& a, const Candidate& b) { return a.key() < b.key(); });
    for (std::size_t i = 0; i < cands.size(); ++i) {
      const auto& c = cands[i];
      if (m.old_to_new[static_cast<std::size_t>(c.o)] >= 0 ||
          m.new_to_old[static_cast<std::size_t>(c.n)] >= 0)
        continue;
      for (std::size_t j = i + 1; j < cands.size() && cands[j].same_score(c); ++j) {
        const auto& d = cands[j];
        if ((d.o == c.o && m.new_to_old[static_cast<std::size_t>(d.n)] < 0) ||
            (d.n == c.n && m.old_to_new[static_cast<std::size_t>(d.o)] < 0)) {
          m.ambiguous_old.insert(c.o);
          break;
        }
      }
      pair_up(c.o, c.n);
    }
  }
  return m;
}

namespace detail {

// Indices (into `seq`) of one longest strictly increasing subsequence.
inline std::vector<std::size_t> longest_increasing(const std::vector<int>& seq) {
  std::vector<std::size_t> tails, prev(seq.size(), SIZE_MAX);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    auto it = std::lower_bound(tails.begin(), tails.end(), seq[i],
                               [&](std::size_t t, int v) { return seq[t] < v; });
    if (it != tails.begin()) prev[i] = *(it - 1);
    if (it == tails.end()) tails.push_back(i);
    else *it = i;
  }
  std::vector<std::size_t> out;
  if (tails.empty()) return out;
  for (std::size_t i = tails.back(); i != SIZE_MAX; i = prev[i]) out.push_back(i);
  std::reverse(out.begin(), out.end());
  return out;
}

inline void whole_element_detail(const Element& e, bool as_old, ElementChange& ch) {
  auto val = [&](std::string v) {
    return as_old ? ValueChange{std::move(v), std::nullopt} : ValueChange{std::nullopt, std::move(v)};
  };
  ch.detail.emplace_back("#tag", val(e.tag));
  for (const auto& [k, v] : e.attributes) ch.detail.emplace_back(k, val(v));
  if (e.text_content) ch.detail.emplace_back("#text", val(*e.text_content));
  if (!e.tail.empty()) ch.detail.emplace_back("#tail", val(e.tail));
  for (const auto& [k, v] : ch.detail) ch.facets.insert(facet_of(k));
}

inline std::string join_names(const std::vector<std::pair<std::string, std::string>>& attrs) {
  std::string out;
  for (const auto& [k, v] : attrs) {
    if (!out.empty()) out += ' ';
    out += k;
  }
  return out;
}

// Attribute order apply_changes would produce from `old` given the values in
// `fresh`: old order minus removed, then additions in their new order.
inline std::vector<std::string> implied_order(const Element& old, const Element& fresh) {
  std::vector<std::string> out;
  for (const auto& [k, v] : old.attributes)
    if (fresh.attribute(k)) out.push_back(k);
  for (const auto& [k, v] : fresh.attributes)
    if (!old.attribute(k)) out.push_back(k);
  return out;
}

inline std::vector<std::pair<std::string, ValueChange>> element_delta(const Element& o,
                                                                      const Element& n) {
  std::vector<std::pair<std::string, ValueChange>> out;
  for (const auto& [k, v] : o.attributes) {
    const auto* w = n.attribute(k);
    if (!w) out.emplace_back(k, ValueChange{v, std::nullopt});
    else if (*w != v) out.emplace_back(k, ValueChange{v, *w});
  }
  for (const auto& [k, v] : n.attributes)
    if (!o.attribute(k)) out.emplace_back(k, ValueChange{std::nullopt, v});
  if (o.text_content != n.text_content) out.emplace_back("#text", ValueChange{o.text_content, n.text_content});
  if (o.tail != n.tail) {
    auto opt = [](const std::string& s) { return s.empty() ? std::nullopt : std::optional<std::string>(s); };
    out.emplace_back("#tail", ValueChange{opt(o.tail), opt(n.tail)});
  }
  std::vector<std::string> wanted;
  for (const auto& [k, v] : n.attributes) wanted.push_back(k);
  if (implied_order(o, n) != wanted)
    out.emplace_back("#order", ValueChange{join_names(o.attributes), join_names(n.attributes)});
  return out;
}

// Root attribute deltas split by canvas dimension.
inline Role size_role_for(std::string_view key, const ValueChange& v) {
  if (key == "width") return Role(Aspect::Size, "width");
  if (key == "height") return Role(Aspect::Size, "height");
  if (key == "viewBox") {
    auto a = parse_number_list(v.old_value.value_or(""));
    auto b = parse_number_list(v.new_value.value_or(""));
    if (a.size() == 4 && b.size() == 4) {
      bool horiz = a[0] != b[0] || a[2] != b[2];
      bool vert = a[1] != b[1] || a[3] != b[3];
      if (horiz && !vert) return Role(Aspect::Size, "width");
      if (vert && !horiz) return Role(Aspect::Size, "height");
    }
  }
  return Role(Aspect::Size);
}

}  // namespace detail

/// Structural, role-aware diff. diff(A, A, M) is empty.
inline std::vector<ElementChange> diff(const FigureDocument& old_doc, const FigureDocument& new_doc,
                                       const FigureMap& map) {
  Matching m = match_documents(old_doc, new_doc, map);
  const auto& on = m.old_nodes;
  const auto& nn = m.new_nodes;

  // Structure: re-parented elements, plus elements outside the longest
  // order-preserving run among each parent's matched children.
  std::vector<bool> moved(nn.size(), false);
  std::vector<std::vector<int>> kids(nn.size());
  for (std::size_t i = 1; i < nn.size(); ++i) kids[static_cast<std::size_t>(nn[i].parent)].push_back(static_cast<int>(i));
  for (std::size_t i = 1; i < nn.size(); ++i) {
    int o = m.new_to_old[i];
    if (o < 0) continue;
    int np = nn[i].parent;
    int op = on[static_cast<std::size_t>(o)].parent;
    if (m.new_to_old[static_cast<std::size_t>(np)] != op) moved[i] = true;
  }
  for (std::size_t p = 0; p < nn.size(); ++p) {
    std::vector<int> seq, who;
    for (int c : kids[p]) {
      if (m.new_to_old[static_cast<std::size_t>(c)] < 0 || moved[static_cast<std::size_t>(c)]) continue;
      seq.push_back(static_cast<int>(on[static_cast<std::size_t>(m.new_to_old[static_cast<std::size_t>(c)])].index_in_parent));
      who.push_back(c);
    }
    auto keep = detail::longest_increasing(seq);
    std::vector<bool> kept(seq.size(), false);
    for (auto k : keep) kept[k] = true;
    for (std::size_t k = 0; k < seq.size(); ++k)
      if (!kept[k]) moved[static_cast<std::size_t>(who[k])] = true;
  }

  std::vector<ElementChange> modifies, adds, removes;
  for (std::size_t i = 0; i < nn.size(); ++i) {
    const Element& en = *nn[i].element;
    int o = m.new_to_old[i];
    if (o < 0) {
      ElementChange ch;
      ch.kind = ChangeKind::Add;
      ch.new_ref = en.path;
      ch.role = nn[i].role;
      detail::whole_element_detail(en, false, ch);
      adds.push_back(std::move(ch));
      continue;
    }
    const Element& eo = *on[static_cast<std::size_t>(o)].element;
    auto delta = detail::element_delta(eo, en);
    if (delta.empty() && !moved[i]) continue;
    if (i == 0 && nn[0].role.first_level() == Aspect::Size) {
      std::map<Role, ElementChange> split;
      for (auto& [k, v] : delta) {
        Role r = detail::size_role_for(k, v);
        auto& ch = split[r];
        ch.kind = ChangeKind::Modify;
        ch.old_ref = eo.path;
        ch.new_ref = en.path;
        ch.role = r;
        ch.facets.insert(k == "width" || k == "height" ? Facet::Geometry : detail::facet_of(k));
        ch.detail.emplace_back(k, v);
      }
      for (auto& [r, ch] : split) modifies.push_back(std::move(ch));
      continue;
    }
    ElementChange ch;
    ch.kind = ChangeKind::Modify;
    ch.old_ref = eo.path;
    ch.new_ref = en.path;
    ch.role = nn[i].role;
    for (const auto& [k, v] : delta) ch.facets.insert(detail::facet_of(k));
    if (moved[i]) ch.facets.insert(Facet::Structure);
    ch.detail = std::move(delta);
    if (m.ambiguous_old.count(o))
      ch.detail.emplace_back("#match", ValueChange{std::nullopt,
                                                   std::string("nearest-geometry tie resolved by document order")});
    modifies.push_back(std::move(ch));
  }
  for (std::size_t i = 0; i < on.size(); ++i) {
    if (m.old_to_new[i] >= 0) continue;
    ElementChange ch;
    ch.kind = ChangeKind::Remove;
    ch.old_ref = on[i].element->path;
    ch.role = on[i].role;
    detail::whole_element_detail(*on[i].element, true, ch);
    removes.push_back(std::move(ch));
  }
  std::vector<ElementChange> out;
  out.reserve(modifies.size() + adds.size() + removes.size());
  // Modify and Add in new-document order, then Remove in old-document order.
  std::vector<std::pair<std::size_t, ElementChange*>> ordered;
  std::unordered_map<std::string, std::size_t> new_order;
  for (std::size_t i = 0; i < nn.size(); ++i) new_order[nn[i].element->path] = i;
  for (auto& c : modifies) ordered.emplace_back(new_order[*c.new_ref], &c);
  for (auto& c : adds) ordered.emplace_back(new_order[*c.new_ref], &c);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  for (auto& [idx, c] : ordered) out.push_back(std::move(*c));
  for (auto& c : removes) out.push_back(std::move(c));
  return out;
}

namespace detail {

struct MutableNode {
  std::string tag;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::optional<std::string> text;
  std::string tail;
  std::vector<std::unique_ptr<MutableNode>> children;
  MutableNode* parent = nullptr;
};

inline std::unique_ptr<MutableNode> to_mutable(const Element& e, MutableNode* parent,
                                               std::unordered_map<std::string, MutableNode*>& index) {
  auto n = std::make_unique<MutableNode>();
  n->tag = e.tag;
  n->attributes = e.attributes;
  n->text = e.text_content;
  n->tail = e.tail;
  n->parent = parent;
  index[e.path] = n.get();
  for (const auto& c : e.children) n->children.push_back(to_mutable(c, n.get(), index));
  return n;
}

inline xml::Node from_mutable(const MutableNode& n) {
  xml::Node x;
  x.name = n.tag;
  x.attributes = n.attributes;
  x.text = n.text.value_or("");
  x.tail = n.tail;
  for (const auto& c : n.children) x.children.push_back(from_mutable(*c));
  return x;
}

inline std::unique_ptr<MutableNode> detach(MutableNode* node) {
  auto& siblings = node->parent->children;
  for (auto it = siblings.begin(); it != siblings.end(); ++it) {
    if (it->get() == node) {
      auto owned = std::move(*it);
      siblings.erase(it);
      owned->parent = nullptr;
      return owned;
    }
  }
  return nullptr;
}

inline std::vector<std::size_t> path_indices(std::string_view path) {
  std::vector<std::size_t> out;
  if (path == "/") return out;
  std::size_t pos = 1;
  while (pos <= path.size()) {
    auto slash = path.find('/', pos);
    if (slash == std::string_view::npos) slash = path.size();
    out.push_back(static_cast<std::size_t>(std::stoul(std::string(path.substr(pos, slash - pos)))));
    pos = slash + 1;
  }
  return out;
}

inline void set_attribute(MutableNode& n, const std::string& key, const std::optional<std::string>& value) {
  auto it = std::find_if(n.attributes.begin(), n.attributes.end(),
                         [&](const auto& kv) { return kv.first == key; });
  if (!value) {
    if (it != n.attributes.end()) n.attributes.erase(it);
  } else if (it != n.attributes.end()) {
    it->second = *value;
  } else {
    n.attributes.emplace_back(key, *value);
  }
}

inline void apply_values(MutableNode& n, const ElementChange& ch) {
  const ValueChange* order = nullptr;
  for (const auto& [k, v] : ch.detail) {
    if (k == "#tag" || k == "#match") continue;
    if (k == "#order") {
      order = &v;
      continue;
    }
    if (k == "#text") n.text = v.new_value;
    else if (k == "#tail") n.tail = v.new_value.value_or("");
    else set_attribute(n, k, v.new_value);
  }
  if (order) {
    std::vector<std::pair<std::string, std::string>> sorted;
    std::string names = order->new_value.value_or("");
    std::size_t pos = 0;
    while (pos <= names.size() && !names.empty()) {
      auto sp = names.find(' ', pos);
      if (sp == std::string::npos) sp = names.size();
      std::string key = names.substr(pos, sp - pos);
      for (const auto& kv : n.attributes)
        if (kv.first == key) sorted.push_back(kv);
      pos = sp + 1;
    }
    n.attributes = std::move(sorted);
  }
}

inline bool preorder_less(std::string_view a, std::string_view b) {
  return path_indices(a) < path_indices(b);
}

}  // namespace detail

/// Replays a change list on `old_doc`. For a list produced by
/// diff(old, new, map) the result is structurally equal to `new`.
inline FigureDocument apply_changes(const FigureDocument& old_doc,
                                    const std::vector<ElementChange>& changes) {
  std::unordered_map<std::string, detail::MutableNode*> index;
  auto root = detail::to_mutable(old_doc.root, nullptr, index);
  auto lookup = [&](const std::string& path) {
    auto it = index.find(path);
    if (it == index.end())
      throw Error(ErrorKind::SyntaxError, "change refers to missing element", path);
    return it->second;
  };

  std::vector<std::pair<std::string, std::unique_ptr<detail::MutableNode>>> inserts;
  // Detach moved elements first so removing an ancestor does not drop them.
  for (const auto& ch : changes) {
    if (ch.kind != ChangeKind::Modify || !ch.facets.count(Facet::Structure) || *ch.old_ref == "/")
      continue;
    auto* node = lookup(*ch.old_ref);
    inserts.emplace_back(*ch.new_ref, detail::detach(node));
  }
  // Removed subtrees stay alive until the end; later entries may name their descendants.
  std::vector<std::unique_ptr<detail::MutableNode>> removed;
  for (const auto& ch : changes) {
    if (ch.kind != ChangeKind::Remove) continue;
    auto* node = lookup(*ch.old_ref);
    if (node->parent) removed.push_back(detail::detach(node));
  }
  for (const auto& ch : changes) {
    if (ch.kind != ChangeKind::Modify) continue;
    detail::apply_values(*lookup(*ch.old_ref), ch);
  }
  for (const auto& ch : changes) {
    if (ch.kind != ChangeKind::Add) continue;
    auto node = std::make_unique<detail::MutableNode>();
    const auto* tag = ch.find("#tag");
    if (!tag || !tag->new_value)
      throw Error(ErrorKind::SyntaxError, "Add entry without #tag", *ch.new_ref);
    node->tag = *tag->new_value;
    detail::apply_values(*node, ch);
    inserts.emplace_back(*ch.new_ref, std::move(node));
  }
  std::stable_sort(inserts.begin(), inserts.end(), [](const auto& a, const auto& b) {
    return detail::preorder_less(a.first, b.first);
  });
  for (auto& [path, node] : inserts) {
    auto idx = detail::path_indices(path);
    if (idx.empty()) throw Error(ErrorKind::SyntaxError, "cannot insert a root", path);
    detail::MutableNode* parent = root.get();
    for (std::size_t k = 0; k + 1 < idx.size(); ++k) {
      if (idx[k] >= parent->children.size())
        throw Error(ErrorKind::SyntaxError, "insertion parent does not exist", path);
      parent = parent->children[idx[k]].get();
    }
    std::size_t pos = std::min(idx.back(), parent->children.size());
    node->parent = parent;
    parent->children.insert(parent->children.begin() + static_cast<std::ptrdiff_t>(pos), std::move(node));
  }

  std::string text = xml::write(detail::from_mutable(*root));
  return parse_figure(text, old_doc.source_path);
}

/// Distinct class tokens covered by a change list.
inline std::set<Role> operation_roles(const std::vector<ElementChange>& changes) {
  std::set<Role> out;
  for (const auto& c : changes) out.insert(c.role);
  return out;
}

class MixedAspectError : public Error {
 public:
  explicit MixedAspectError(std::vector<std::string> tokens)
      : Error(ErrorKind::MixedAspect, "operation spans " + join(tokens)), tokens_(std::move(tokens)) {}
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  static std::string join(const std::vector<std::string>& t) {
    std::string out;
    for (const auto& s : t) out += (out.empty() ? "" : ", ") + s;
    return out;
  }
  std::vector<std::string> tokens_;
};

/// The single class token covering every change; throws MixedAspectError
/// listing all tokens otherwise.
inline std::string classify_operation(const std::vector<ElementChange>& changes) {
  if (changes.empty())
    throw Error(ErrorKind::MixedAspect, "an operation must contain at least one change");
  auto roles = operation_roles(changes);
  if (roles.size() == 1) return roles.begin()->token();
  std::vector<std::string> tokens;
  for (const auto& r : roles) tokens.push_back(r.token());
  throw MixedAspectError(std::move(tokens));
}

}  // namespace figchain
