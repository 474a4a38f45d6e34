// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "scenarios.hpp"
#include "thinkahead/app_ir.hpp"
#include "thinkahead/string_analysis.hpp"

using namespace thinkahead;
using analysis::DefinitionSpot;

namespace {

ir::App weather() {
  return ir::parse_app(fixtures::read_text(fixtures::data_path("weather.papp")));
}

}  // namespace

// The URL Map entry for url2 in the running example:
// ["http://weatherapi/", "weather?&cityName=", L7_{3,1}].
TEST(StringAnalysis, WeatherUrl2MatchesWorkedExample) {
  auto map = analysis::analyze_urls(weather());
  const auto& url2 = map.at("url2");
  ASSERT_EQ(url2.size(), 3u);
  EXPECT_EQ(url2[0].concrete, "http://weatherapi/");
  EXPECT_EQ(url2[1].concrete, "weather?&cityName=");
  EXPECT_FALSE(url2[2].is_concrete());
  EXPECT_EQ(url2[2].spots,
            (std::vector<DefinitionSpot>{{"onItemSelected", 0, 3, 1}}));
}

TEST(StringAnalysis, StaticSettingResolvesToValue) {
  auto map = analysis::analyze_urls(weather());
  const auto& url1 = map.at("url1");
  ASSERT_EQ(url1.size(), 3u);
  EXPECT_EQ(url1[2].concrete, "123");
  for (const auto& p : url1) EXPECT_TRUE(p.is_concrete());
  EXPECT_EQ(map.at("url3")[2].spots,
            (std::vector<DefinitionSpot>{{"onClick", 0, 3, 1}}));
}

TEST(StringAnalysis, ConflictingStaticDefinitionsBecomeSpots) {
  auto app = ir::parse_app(R"(app c
netmethod get
callback a {
  let x = "one"
}
callback b {
  let x = "two"
  url u = "http://h/" + x
  get(u)
}
)");
  auto map = analysis::analyze_urls(app);
  const auto& part = map.at("u")[1];
  ASSERT_FALSE(part.is_concrete());
  EXPECT_EQ(part.spots, (std::vector<DefinitionSpot>{{"a", 0, 2, 1},
                                                      {"b", 0, 2, 2}}));
}

TEST(StringAnalysis, AgreeingStaticDefinitionsStayConcrete) {
  auto app = ir::parse_app(R"(app s
resource base = "same"
netmethod get
callback a {
  let x = "same"
}
callback b {
  let x = resource(base)
  url u = "http://h/" + x
  get(u)
}
)");
  EXPECT_EQ(analysis::static_value_of(app, "x"), "same");
  EXPECT_EQ(analysis::analyze_urls(app).at("u")[1].concrete, "same");
}

TEST(StringAnalysis, OrdinalsFollowProgramOrderAcrossMethods) {
  // Callbacks come before methods regardless of declaration order.
  auto app = ir::parse_app(R"(app o
netmethod get
method helper {
  let v = input(h)
}
callback first {
  let v = input(f1)
  let other = "x"
  let v = input(f2)
  call helper
}
callback second {
  url u = "http://h/" + v + other + v
  get(u)
}
)");
  auto map = analysis::analyze_urls(app);
  const auto& u = map.at("u");
  ASSERT_EQ(u.size(), 4u);
  EXPECT_EQ(u[1].spots, (std::vector<DefinitionSpot>{{"first", 0, 2, 1},
                                                     {"first", 2, 2, 2},
                                                     {"helper", 0, 2, 3}}));
  EXPECT_EQ(u[2].concrete, "x");
  EXPECT_EQ(u[3].spots, (std::vector<DefinitionSpot>{{"first", 0, 4, 1},
                                                     {"first", 2, 4, 2},
                                                     {"helper", 0, 4, 3}}));
}

TEST(StringAnalysis, OneStatementCanBeSpotForSeveralUrls) {
  auto app = ir::parse_app(R"(app m
netmethod get
callback a {
  let id = input(id)
}
callback b {
  url u1 = "http://one/" + id
  url u2 = "http://two/" + "x" + id
  get(u1)
  get(u2)
}
)");
  auto map = analysis::analyze_urls(app);
  EXPECT_EQ(map.at("u1")[1].spots, (std::vector<DefinitionSpot>{{"a", 0, 2, 1}}));
  EXPECT_EQ(map.at("u2")[2].spots, (std::vector<DefinitionSpot>{{"a", 0, 3, 1}}));
}

TEST(StringAnalysis, MissingResourceIsAnError) {
  ir::App app = ir::parse_app(R"(app r
netmethod get
callback a {
  let x = setting(nokey)
  url u = "http://h/" + x
  get(u)
}
)");
  EXPECT_THROW(analysis::analyze_urls(app), analysis::AnalysisError);
  EXPECT_THROW(analysis::static_value_of(app, "never"), analysis::AnalysisError);
}

TEST(StringAnalysis, EveryUrlSpotGetsAnEntry) {
  auto app = weather();
  auto map = analysis::analyze_urls(app);
  EXPECT_EQ(map.size(), app.url_ids().size());
  for (const auto& [id, parts] : map) {
    for (const auto& p : parts) EXPECT_NE(p.is_concrete(), !p.spots.empty());
  }
}
