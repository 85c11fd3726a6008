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


// Randomized properties of the diff engine over mutations of the Op fixture.

#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace figchain;
using testing_support::figure;
using testing_support::ops_map;

namespace {

struct Mutator {
  std::mt19937_64 rng;
  bool allow_reorder = true;

  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

  // Every non-root node, addressed by child-index chain.
  static void collect(xml::Node& n, std::vector<xml::Node*>& out, bool skip_self) {
    if (!skip_self) out.push_back(&n);
    for (auto& c : n.children) collect(c, out, false);
  }

  static void parents(xml::Node& n, std::vector<xml::Node*>& out) {
    if (n.name == "svg" || n.name == "g") out.push_back(&n);
    for (auto& c : n.children) parents(c, out);
  }

  void mutate(xml::Node& root) {
    std::vector<xml::Node*> nodes;
    collect(root, nodes, true);
    switch (pick(allow_reorder ? 5 : 4)) {
      case 0: {  // restyle
        auto* n = nodes[pick(nodes.size())];
        std::string v = "#" + std::to_string(100000 + pick(800000));
        bool found = false;
        for (auto& [k, val] : n->attributes)
          if (k == "fill") val = v, found = true;
        if (!found) n->attributes.emplace_back("fill", v);
        break;
      }
      case 1: {  // retext or nudge
        auto* n = nodes[pick(nodes.size())];
        if (n->name == "text") {
          n->text = "t" + std::to_string(pick(1000));
        } else {
          std::string v = "0." + std::to_string(1 + pick(9));
          bool found = false;
          for (auto& [k, val] : n->attributes)
            if (k == "opacity") val = v, found = true;
          if (!found) n->attributes.emplace_back("opacity", v);
        }
        break;
      }
      case 2: {  // remove a leaf
        std::vector<xml::Node*> ps;
        parents(root, ps);
        auto* p = ps[pick(ps.size())];
        if (p->children.empty()) break;
        p->children.erase(p->children.begin() + static_cast<std::ptrdiff_t>(pick(p->children.size())));
        break;
      }
      case 3: {  // insert a new shape
        std::vector<xml::Node*> ps;
        parents(root, ps);
        auto* p = ps[pick(ps.size())];
        xml::Node c;
        c.name = "circle";
        c.attributes = {{"cx", std::to_string(pick(400))}, {"cy", std::to_string(pick(300))}, {"r", "3"}};
        p->children.insert(p->children.begin() + static_cast<std::ptrdiff_t>(pick(p->children.size() + 1)), c);
        break;
      }
      default: {  // swap two siblings
        std::vector<xml::Node*> ps;
        parents(root, ps);
        auto* p = ps[pick(ps.size())];
        if (p->children.size() < 2) break;
        std::swap(p->children[pick(p->children.size())], p->children[pick(p->children.size())]);
      }
    }
  }

  FigureDocument mutated(const FigureDocument& base, int edits) {
    auto node = xml::parse(serialize(base));
    for (int k = 0; k < edits; ++k) mutate(node);
    return parse_figure(xml::write(node));
  }
};

std::map<ChangeKind, int> kind_counts(const std::vector<ElementChange>& ch) {
  std::map<ChangeKind, int> out;
  for (const auto& c : ch) ++out[c.kind];
  return out;
}

}  // namespace

TEST(DiffProperties, SelfDiffIsEmptyForRandomFigures) {
  Mutator mu{std::mt19937_64(11)};
  auto base = figure("ops/A0.svg");
  for (int trial = 0; trial < 100; ++trial) {
    auto d = mu.mutated(base, 1 + trial % 6);
    EXPECT_TRUE(diff(d, d, ops_map()).empty());
  }
}

TEST(DiffProperties, ReplayingTheDiffReproducesTheTarget) {
  Mutator mu{std::mt19937_64(12)};
  auto m = ops_map();
  auto base = figure("ops/A0.svg");
  for (int trial = 0; trial < 200; ++trial) {
    auto a = trial % 2 ? base : mu.mutated(base, 2);
    auto b = mu.mutated(a, 1 + trial % 8);
    auto ch = diff(a, b, m);
    auto replay = apply_changes(a, ch);
    ASSERT_TRUE(same_tree(replay.root, b.root)) << "trial " << trial << "\n" << serialize(b);
  }
}

TEST(DiffProperties, ExchangeSwapsAddsAndRemoves) {
  Mutator mu{std::mt19937_64(13)};
  mu.allow_reorder = false;
  auto m = ops_map();
  auto base = figure("ops/A0.svg");
  for (int trial = 0; trial < 200; ++trial) {
    auto b = mu.mutated(base, 1 + trial % 5);
    auto fwd = kind_counts(diff(base, b, m));
    auto back = kind_counts(diff(b, base, m));
    EXPECT_EQ(fwd[ChangeKind::Add], back[ChangeKind::Remove]) << trial;
    EXPECT_EQ(fwd[ChangeKind::Remove], back[ChangeKind::Add]) << trial;
    EXPECT_EQ(fwd[ChangeKind::Modify], back[ChangeKind::Modify]) << trial;
  }
}

TEST(DiffProperties, EditsConfinedToOneRoleClassifyAsThatRole) {
  std::mt19937_64 rng(14);
  auto m = ops_map();
  auto base = figure("ops/A0.svg");
  auto roles = classify_elements(base, m);
  std::map<std::string, std::vector<std::string>> by_role;
  for (const auto& c : roles)
    if (c.path != "/") by_role[c.role.token()].push_back(c.path);
  std::vector<std::string> keys;
  for (const auto& [k, v] : by_role) keys.push_back(k);
  for (int trial = 0; trial < 200; ++trial) {
    const auto& token = keys[rng() % keys.size()];
    const auto& paths = by_role[token];
    // Restyle 1..3 elements of the chosen role via a path-indexed walk.
    auto node = xml::parse(serialize(base));
    int edits = 1 + static_cast<int>(rng() % 3);
    for (int k = 0; k < edits; ++k) {
      auto idx = detail::path_indices(paths[rng() % paths.size()]);
      xml::Node* n = &node;
      for (auto i : idx) n = &n->children[i];
      n->attributes.emplace_back("data-edit-" + std::to_string(k), std::to_string(trial));
      if (n->attributes.size() > 1 && rng() % 2) std::swap(n->attributes.front(), n->attributes.back());
    }
    auto b = parse_figure(xml::write(node));
    auto ch = diff(base, b, m);
    ASSERT_FALSE(ch.empty());
    EXPECT_EQ(classify_operation(ch), token) << trial;
  }
}
