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

#include "figchain/xml.hpp"

using figchain::ErrorKind;
namespace xml = figchain::xml;

namespace {

ErrorKind kind_of(std::string_view src) {
  try {
    xml::parse(src);
  } catch (const figchain::Error& e) {
    return e.kind();
  }
  return ErrorKind::Io;  // sentinel: no error
}

}  // namespace

TEST(Xml, ParsesNestedElementsAndKeepsAttributeOrder) {
  auto n = xml::parse(R"(<svg b="2" a="1"><g id="x"><rect z="0" y="1"/></g></svg>)");
  EXPECT_EQ(n.name, "svg");
  ASSERT_EQ(n.attributes.size(), 2u);
  EXPECT_EQ(n.attributes[0].first, "b");
  EXPECT_EQ(n.attributes[1].first, "a");
  ASSERT_EQ(n.children.size(), 1u);
  EXPECT_EQ(n.children[0].children[0].attributes[0].first, "z");
}

TEST(Xml, DecodesEntitiesAndCdata) {
  auto n = xml::parse(R"(<t a="&lt;&amp;&quot;&#65;&#x42;">x &gt; y<![CDATA[<raw>]]></t>)");
  EXPECT_EQ(*n.attribute("a"), "<&\"AB");
  EXPECT_EQ(n.text, "x > y<raw>");
}

TEST(Xml, DecodesMultibyteCharacterReferences) {
  auto n = xml::parse("<t>&#xB0;C &#8364;</t>");
  EXPECT_EQ(n.text, "\xC2\xB0" "C \xE2\x82\xAC");
}

TEST(Xml, SkipsPrologCommentsAndProcessingInstructions) {
  auto n = xml::parse("\xEF\xBB\xBF<?xml version=\"1.0\"?>\n<!-- c --><!DOCTYPE svg>\n<svg><!-- inner --><?pi x?><g/></svg>\n<!-- after -->");
  EXPECT_EQ(n.name, "svg");
  EXPECT_EQ(n.children.size(), 1u);
}

TEST(Xml, MixedContentKeepsTextAndTails) {
  auto n = xml::parse("<text>a<tspan>b</tspan>c</text>");
  EXPECT_EQ(n.text, "a");
  EXPECT_EQ(n.children[0].text, "b");
  EXPECT_EQ(n.children[0].tail, "c");
}

TEST(Xml, RejectsMalformedInputWithPosition) {
  EXPECT_EQ(kind_of("<svg><g></svg>"), ErrorKind::MalformedXml);
  EXPECT_EQ(kind_of("<svg a=1/>"), ErrorKind::MalformedXml);
  EXPECT_EQ(kind_of("<svg a=\"1\" a=\"2\"/>"), ErrorKind::MalformedXml);
  EXPECT_EQ(kind_of("<svg>&bogus;</svg>"), ErrorKind::MalformedXml);
  EXPECT_EQ(kind_of("<svg/><svg/>"), ErrorKind::MalformedXml);
  EXPECT_EQ(kind_of(""), ErrorKind::MalformedXml);
  try {
    xml::parse("<svg>\n  <g>\n</svg>");
    FAIL();
  } catch (const figchain::Error& e) {
    EXPECT_NE(std::string(e.location()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(Xml, RefusesInternalDtdSubset) {
  EXPECT_EQ(kind_of("<!DOCTYPE svg [<!ENTITY x \"y\">]><svg/>"), ErrorKind::UnsupportedFeature);
}

TEST(Xml, WriteThenParseIsIdentity) {
  const char* src = R"(<svg w="1"><g><text x="1">a &amp; b<tspan>c</tspan>d</text><rect q="&quot;"/></g></svg>)";
  auto a = xml::parse(src);
  auto out = xml::write(a);
  auto b = xml::parse(out);
  EXPECT_EQ(xml::write(b), out);
  EXPECT_EQ(b.children[0].children[0].text, "a & b");
  EXPECT_EQ(b.children[0].children[0].children[0].tail, "d");
  EXPECT_EQ(*b.children[0].children[1].attribute("q"), "\"");
}
