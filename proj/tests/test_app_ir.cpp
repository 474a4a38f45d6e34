// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "random_app.hpp"
#include "scenarios.hpp"
#include "thinkahead/app_ir.hpp"
#include "thinkahead/ecg.hpp"

using namespace thinkahead;

namespace {

std::vector<std::string> messages(const std::string& text) {
  try {
    ir::parse_app(text);
  } catch (const ir::ParseError& e) {
    std::vector<std::string> out;
    for (const auto& d : e.diagnostics()) out.push_back(d.message);
    return out;
  }
  return {};
}

bool has_message(const std::vector<std::string>& msgs, const std::string& s) {
  for (const auto& m : msgs) {
    if (m.find(s) != std::string::npos) return true;
  }
  return false;
}

const char* kMinimal = R"(app tiny
netmethod get latency=10
callback onCreate {
  url u = "http://x/"
  get(u)
}
)";

}  // namespace

TEST(AppIr, ParsesWeatherApp) {
  auto app = ir::parse_app(fixtures::read_text(fixtures::data_path("weather.papp")));
  EXPECT_EQ(app.name, "weather");
  ASSERT_EQ(app.callbacks.size(), 4u);
  EXPECT_EQ(app.entry_callback()->name, "onCreate");
  EXPECT_EQ(app.resources.at("domain"), "http://weatherapi/");
  EXPECT_EQ(app.settings.at("favCityId"), "123");
  ASSERT_NE(app.find_netmethod("getInputStream"), nullptr);
  EXPECT_EQ(app.find_netmethod("getInputStream")->latency_ms, 800);
  EXPECT_TRUE(app.ccfg.is_wait("wn1"));
  EXPECT_TRUE(app.ccfg.has_edge("wn1", "onClick"));
  EXPECT_EQ(app.url_ids(), (std::vector<std::string>{"url1", "url2", "url3"}));

  auto spot = app.find_url_spot("url2");
  ASSERT_TRUE(spot);
  EXPECT_EQ(spot->first->name, "onClick");
  EXPECT_EQ(spot->second, 2u);
  const auto& build = std::get<ir::BuildUrl>(spot->first->body[2].node);
  ASSERT_EQ(build.parts.size(), 3u);
  EXPECT_EQ(build.parts[0].kind, ir::UrlPart::Kind::kResource);
  EXPECT_EQ(build.parts[2], (ir::UrlPart{ir::UrlPart::Kind::kVar, "cityName"}));
}

TEST(AppIr, PrintParseRoundTrip) {
  auto app = ir::parse_app(fixtures::read_text(fixtures::data_path("weather.papp")));
  auto printed = ir::print_app(app);
  auto again = ir::parse_app(printed);
  EXPECT_EQ(again.callbacks, app.callbacks);
  EXPECT_EQ(again.ccfg, app.ccfg);
  EXPECT_EQ(again.netlib, app.netlib);
  EXPECT_EQ(ir::print_app(again), printed);
}

TEST(AppIr, RandomAppsRoundTripThroughText) {
  for (std::uint32_t seed = 1; seed <= 200; ++seed) {
    auto app = fixtures::random_case(seed).app;
    auto again = ir::parse_app(ir::print_app(app));
    ASSERT_EQ(again.callbacks, app.callbacks) << "seed " << seed;
    ASSERT_EQ(again.methods, app.methods) << "seed " << seed;
    ASSERT_EQ(again.ccfg, app.ccfg) << "seed " << seed;
    ASSERT_EQ(again.resources, app.resources) << "seed " << seed;
  }
}

TEST(AppIr, StringEscapesSurviveRoundTrip) {
  auto app = ir::parse_app(R"(app esc
netmethod get
callback onCreate {
  let q = "a \"quoted\" \\ value"
  url u = "http://x/?q=" + q
  get(u)
}
)");
  auto again = ir::parse_app(ir::print_app(app));
  EXPECT_EQ(again.callbacks, app.callbacks);
  const auto& def = std::get<ir::DefineStatic>(app.callbacks[0].body[0].node);
  EXPECT_EQ(def.source.text, "a \"quoted\" \\ value");
}

TEST(AppIr, MinimalAppIsValid) {
  auto app = ir::parse_app(kMinimal);
  EXPECT_TRUE(ir::validate(app).empty());
  EXPECT_FALSE(app.instrumented);
}

TEST(AppIr, RejectsDuplicateUrlSpot) {
  auto msgs = messages(R"(app d
netmethod get
callback onCreate {
  url u = "a"
  url u = "b"
  get(u)
}
)");
  EXPECT_TRUE(has_message(msgs, "duplicate url 'u'"));
}

TEST(AppIr, RejectsUnresolvedReferences) {
  auto msgs = messages(R"(app d
netmethod get
callback onCreate {
  url u = "a" + missingVar
  post(u)
  get(nope)
  call helper
  goto Elsewhere
}
)");
  EXPECT_TRUE(has_message(msgs, "unresolved variable 'missingVar'"));
  EXPECT_TRUE(has_message(msgs, "unresolved netmethod 'post'"));
  EXPECT_TRUE(has_message(msgs, "unresolved url 'nope'"));
  EXPECT_TRUE(has_message(msgs, "unresolved method 'helper'"));
  EXPECT_TRUE(has_message(msgs, "unresolved callback 'Elsewhere'"));
}

TEST(AppIr, DiagnosticsCarryLineNumbers) {
  try {
    ir::parse_app("app x\nnetmethod get\ncallback a {\n  get(u)\n}\n");
    FAIL() << "expected ParseError";
  } catch (const ir::ParseError& e) {
    ASSERT_FALSE(e.diagnostics().empty());
    EXPECT_EQ(e.diagnostics()[0].line, 4);
    EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos);
  }
}

TEST(AppIr, SyntaxErrorsAreCollected) {
  auto msgs = messages("app x\ncallback a {\n  let = 3\n}\ncallback b {\n  url\n}\n");
  EXPECT_GE(msgs.size(), 2u);
}

TEST(AppIr, PseudoStatementsNeedInstrumentedApp) {
  auto msgs = messages(R"(app p
netmethod get
callback onCreate {
  url u = "a"
  trigger_prefetch(u)
  get(u)
}
)");
  EXPECT_TRUE(has_message(msgs, "instrumentation statement in uninstrumented app"));
}

TEST(AppIr, HintDataNeedsInstrumentedApp) {
  auto msgs = messages(std::string(kMinimal) + "hint_url h = \"http://h/\"\n");
  EXPECT_TRUE(has_message(msgs, "hint data is only allowed in instrumented apps"));
}

TEST(AppIr, RejectsRecursion) {
  auto msgs = messages(R"(app r
method m1 {
  call m2
}
method m2 {
  call m1
}
callback onCreate {
  call m1
}
)");
  EXPECT_TRUE(has_message(msgs, "recursive call or goto chain"));
}

TEST(AppIr, RejectsDanglingWaitNode) {
  auto msgs = messages(R"(app w
callback onCreate {
}
ccfg {
  wait w1
  onCreate -> w1
}
)");
  EXPECT_TRUE(has_message(msgs, "needs an incoming and an outgoing edge"));
}

TEST(AppIr, ProgramOrderIsCallbacksThenMethods) {
  auto app = ir::parse_app(R"(app o
method helper {
}
callback b {
  call helper
}
callback a {
}
)");
  auto order = app.procedures_in_program_order();
  ASSERT_EQ(order.size(), 3u);
  EXPECT_EQ(order[0]->name, "b");
  EXPECT_EQ(order[1]->name, "a");
  EXPECT_EQ(order[2]->name, "helper");
  EXPECT_EQ(app.entry_callback()->name, "b");
}

TEST(Ecg, FrameworkAndDirectEdges) {
  auto app = ir::parse_app(R"(app e
netmethod get
method load {
  url u = "x"
  get(u)
}
method bg {
  call load
}
callback onCreate {
  asynccall bg
}
callback onOther {
}
)");
  auto ecg = ir::build_ecg(app);
  EXPECT_TRUE(ecg.reaches("onCreate", "load"));
  EXPECT_TRUE(ecg.reaches("onCreate", "onCreate"));
  EXPECT_FALSE(ecg.reaches("onOther", "load"));
  EXPECT_FALSE(ecg.reaches("load", "onCreate"));
  bool framework = false;
  for (const auto& e : ecg.edges) {
    if (e.from == "onCreate" && e.to == "bg") framework = e.kind == ir::EdgeKind::kFramework;
  }
  EXPECT_TRUE(framework);
}
