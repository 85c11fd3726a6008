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

// Small non-validating XML reader and writer, sufficient for code-generated
// SVG. Whitespace-only character data is dropped; comments and processing
// instructions are skipped; DTD internal subsets are refused.

#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "figchain/error.hpp"

namespace figchain::xml {

struct Node {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attributes;  // source order
  std::string text;  // character data before the first child element
  std::string tail;  // character data after this element's end tag
  std::vector<Node> children;

  const std::string* attribute(std::string_view key) const {
    for (const auto& [k, v] : attributes)
      if (k == key) return &v;
    return nullptr;
  }
};

namespace detail {

inline bool is_name_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' ||
         c == ':' || static_cast<unsigned char>(c) >= 0x80;
}

inline bool is_name_char(char c) {
  return is_name_start(c) || (c >= '0' && c <= '9') || c == '-' || c == '.';
}

inline bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r';
}

inline bool all_space(std::string_view s) {
  for (char c : s)
    if (!is_space(c)) return false;
  return true;
}

inline void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

class Reader {
 public:
  explicit Reader(std::string_view src) : src_(src) {}

  Node parse_document() {
    if (src_.substr(0, 3) == "\xEF\xBB\xBF") pos_ = 3;
    skip_misc(true);
    if (at_end() || peek() != '<') fail("expected root element");
    Node root = parse_element();
    skip_misc(false);
    if (!at_end()) fail("content after root element");
    return root;
  }

 private:
  bool at_end() const { return pos_ >= src_.size(); }
  char peek() const { return src_[pos_]; }
  bool starts_with(std::string_view s) const {
    return src_.substr(pos_, s.size()) == s;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < pos_ && i < src_.size(); ++i) {
      if (src_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(ErrorKind::MalformedXml, msg,
                "line " + std::to_string(line) + ":" + std::to_string(col));
  }

  void skip_space() {
    while (!at_end() && is_space(peek())) ++pos_;
  }

  void skip_until(std::string_view terminator, const char* what) {
    auto end = src_.find(terminator, pos_);
    if (end == std::string_view::npos) fail(std::string("unterminated ") + what);
    pos_ = end + terminator.size();
  }

  // Prolog/epilog: whitespace, comments, PIs and (prolog only) a DOCTYPE.
  void skip_misc(bool allow_doctype) {
    for (;;) {
      skip_space();
      if (starts_with("<?")) {
        skip_until("?>", "processing instruction");
      } else if (starts_with("<!--")) {
        skip_until("-->", "comment");
      } else if (allow_doctype && starts_with("<!DOCTYPE")) {
        auto gt = src_.find('>', pos_);
        auto bracket = src_.find('[', pos_);
        if (bracket != std::string_view::npos && bracket < gt)
          throw Error(ErrorKind::UnsupportedFeature,
                      "DTD internal subsets (entity declarations) are not "
                      "supported",
                      "prolog");
        if (gt == std::string_view::npos) fail("unterminated DOCTYPE");
        pos_ = gt + 1;
      } else {
        return;
      }
    }
  }

  std::string parse_name() {
    if (at_end() || !is_name_start(peek())) fail("expected a name");
    std::size_t start = pos_;
    while (!at_end() && is_name_char(peek())) ++pos_;
    return std::string(src_.substr(start, pos_ - start));
  }

  std::string decode(std::string_view raw) const {
    std::string out;
    out.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] != '&') {
        out += raw[i];
        continue;
      }
      auto semi = raw.find(';', i);
      if (semi == std::string_view::npos) fail("unterminated entity reference");
      std::string_view ent = raw.substr(i + 1, semi - i - 1);
      if (ent == "lt") out += '<';
      else if (ent == "gt") out += '>';
      else if (ent == "amp") out += '&';
      else if (ent == "quot") out += '"';
      else if (ent == "apos") out += '\'';
      else if (!ent.empty() && ent[0] == '#') {
        std::uint32_t cp = 0;
        bool hex = ent.size() > 1 && (ent[1] == 'x' || ent[1] == 'X');
        std::string_view digits = ent.substr(hex ? 2 : 1);
        if (digits.empty()) fail("empty character reference");
        for (char c : digits) {
          int d;
          if (c >= '0' && c <= '9') d = c - '0';
          else if (hex && c >= 'a' && c <= 'f') d = c - 'a' + 10;
          else if (hex && c >= 'A' && c <= 'F') d = c - 'A' + 10;
          else fail("bad character reference");
          cp = cp * (hex ? 16 : 10) + static_cast<std::uint32_t>(d);
          if (cp > 0x10FFFF) fail("character reference out of range");
        }
        append_utf8(out, cp);
      } else {
        fail("unknown entity &" + std::string(ent) + ";");
      }
      i = semi;
    }
    return out;
  }

  Node parse_element() {
    ++pos_;  // '<'
    Node node;
    node.name = parse_name();
    for (;;) {
      bool had_space = !at_end() && is_space(peek());
      skip_space();
      if (at_end()) fail("unterminated start tag <" + node.name + ">");
      if (starts_with("/>")) {
        pos_ += 2;
        return node;
      }
      if (peek() == '>') {
        ++pos_;
        break;
      }
      if (!had_space) fail("expected whitespace before attribute");
      std::string key = parse_name();
      skip_space();
      if (at_end() || peek() != '=') fail("expected '=' after attribute " + key);
      ++pos_;
      skip_space();
      if (at_end() || (peek() != '"' && peek() != '\'')) fail("expected quoted value");
      char quote = peek();
      ++pos_;
      auto end = src_.find(quote, pos_);
      if (end == std::string_view::npos) fail("unterminated attribute value");
      std::string_view raw = src_.substr(pos_, end - pos_);
      if (raw.find('<') != std::string_view::npos) fail("'<' in attribute value");
      if (node.attribute(key)) fail("duplicate attribute " + key);
      node.attributes.emplace_back(std::move(key), decode(raw));
      pos_ = end + 1;
    }
    parse_content(node);
    return node;
  }

  void parse_content(Node& node) {
    std::string pending;
    auto flush = [&] {
      if (all_space(pending)) {
        pending.clear();
        return;
      }
      if (node.children.empty()) node.text += pending;
      else node.children.back().tail += pending;
      pending.clear();
    };
    for (;;) {
      if (at_end()) fail("missing end tag </" + node.name + ">");
      if (starts_with("</")) {
        flush();
        pos_ += 2;
        std::string close = parse_name();
        if (close != node.name)
          fail("mismatched end tag </" + close + "> for <" + node.name + ">");
        skip_space();
        if (at_end() || peek() != '>') fail("expected '>'");
        ++pos_;
        return;
      }
      if (starts_with("<!--")) {
        skip_until("-->", "comment");
      } else if (starts_with("<![CDATA[")) {
        pos_ += 9;
        auto end = src_.find("]]>", pos_);
        if (end == std::string_view::npos) fail("unterminated CDATA");
        pending += src_.substr(pos_, end - pos_);
        pos_ = end + 3;
      } else if (starts_with("<?")) {
        skip_until("?>", "processing instruction");
      } else if (peek() == '<') {
        flush();
        node.children.push_back(parse_element());
      } else {
        auto lt = src_.find('<', pos_);
        if (lt == std::string_view::npos) lt = src_.size();
        pending += decode(src_.substr(pos_, lt - pos_));
        pos_ = lt;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

inline void escape(std::string& out, std::string_view s, bool attribute) {
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"':
        if (attribute) out += "&quot;";
        else out += c;
        break;
      default: out += c;
    }
  }
}

inline void write_node(std::string& out, const Node& node, int depth) {
  std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
  out += indent;
  out += '<';
  out += node.name;
  for (const auto& [k, v] : node.attributes) {
    out += ' ';
    out += k;
    out += "=\"";
    escape(out, v, true);
    out += '"';
  }
  if (node.children.empty() && node.text.empty()) {
    out += "/>";
  } else if (!node.text.empty() ||
             std::any_of(node.children.begin(), node.children.end(),
                         [](const Node& c) { return !c.tail.empty(); })) {
    // Mixed content is written inline so no character data is invented.
    out += '>';
    escape(out, node.text, false);
    for (const auto& child : node.children) {
      std::string inner;
      write_node(inner, child, 0);
      out += inner;
    }
    out += "</" + node.name + ">";
  } else {
    out += ">\n";
    for (const auto& child : node.children) {
      write_node(out, child, depth + 1);
      out += '\n';
    }
    out += indent + "</" + node.name + ">";
  }
  escape(out, node.tail, false);
}

}  // namespace detail

inline Node parse(std::string_view src) { return detail::Reader(src).parse_document(); }

inline std::string write(const Node& root) {
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  detail::write_node(out, root, 0);
  out += '\n';
  return out;
}

}  // namespace figchain::xml
