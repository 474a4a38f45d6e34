// SPDX-License-Identifier: Apache-2.0
//
// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "random_app.hpp"
#include "scenarios.hpp"
#include "thinkahead/app_ir.hpp"
#include "thinkahead/mbm.hpp"
#include "thinkahead/metrics.hpp"

using namespace thinkahead;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

// Placement patterns for one value with d spots, Before spots first.
std::vector<std::vector<mbm::Placement>> patterns_for(int d) {
  using P = mbm::Placement;
  if (d == 1) return {{P::kBefore}, {P::kAfter}};
  return {{P::kBefore, P::kBefore}, {P::kBefore, P::kAfter},
          {P::kAfter, P::kAfter}};
}

// Label straight from the formal definition: prefetchable iff the first
// spot of every value lies before the Trigger Point; a hit iff additionally
// the spots j = 2..d_i of every value do too.
mbm::Prefetchability formal_label(const mbm::CaseConfig& c) {
  for (const auto& v : c.values) {
    if (v.front() != mbm::Placement::kBefore) {
      return mbm::Prefetchability::kNonPrefetchable;
    }
  }
  for (const auto& v : c.values) {
    for (std::size_t j = 1; j < v.size(); ++j) {
      if (v[j] != mbm::Placement::kBefore) return mbm::Prefetchability::kNonHit;
    }
  }
  return mbm::Prefetchability::kHit;
}

Outcome criterion1() {
  // Enumerate every configuration with k <= 2, d_i <= 2 (d nondecreasing).
  std::vector<mbm::CaseConfig> all{{}};
  for (int d1 = 1; d1 <= 2; ++d1) {
    for (const auto& p : patterns_for(d1)) all.push_back({{p}});
  }
  for (int d1 = 1; d1 <= 2; ++d1) {
    for (int d2 = d1; d2 <= 2; ++d2) {
      for (const auto& p1 : patterns_for(d1)) {
        for (const auto& p2 : patterns_for(d2)) all.push_back({{p1, p2}});
      }
    }
  }
  Outcome o;
  if (all.size() != static_cast<std::size_t>(mbm::kCaseCount)) {
    return {false, "enumeration produced " + std::to_string(all.size())};
  }
  std::vector<mbm::CaseConfig> generated;
  std::set<int> hits;
  for (int id = 0; id < mbm::kCaseCount; ++id) {
    auto cfg = mbm::case_config(id);
    for (const auto& g : generated) {
      if (g == cfg) return {false, "case " + std::to_string(id) + " repeats"};
    }
    bool covered = false;
    for (const auto& a : all) covered |= a == cfg;
    if (!covered) return {false, "case " + std::to_string(id) + " not a valid config"};
    generated.push_back(cfg);
    if (mbm::classify(cfg) != formal_label(cfg)) {
      return {false, "case " + std::to_string(id) + " misclassified"};
    }
    if (mbm::classify(cfg) == mbm::Prefetchability::kHit) hits.insert(id);
  }
  // Hit labels plus case 0; case 2 "NP"; case 13 "NH".
  if (hits != std::set<int>{0, 1, 3, 6, 10, 16}) return {false, "hit set differs"};
  if (mbm::classify(mbm::case_config(2)) != mbm::Prefetchability::kNonPrefetchable)
    return {false, "case 2 is not NP"};
  if (mbm::classify(mbm::case_config(13)) != mbm::Prefetchability::kNonHit)
    return {false, "case 13 is not NH"};
  o.detail = "25 distinct configs, labels match, hits {0,1,3,6,10,16}";
  return o;
}

Outcome criterion2() {
  auto rep = mbm::run_benchmark(1000, 2000);
  const auto& a = rep.accuracy;
  std::ostringstream s;
  s << "precision " << a.correct << "/" << a.attempted << ", recall "
    << a.correct << "/" << a.prefetchable;
  bool ok = a.attempted > 0 && a.precision() == 1.0 && a.recall() == 1.0;
  return {ok, s.str()};
}

Outcome criterion3() {
  // Reference reductions for the hit rows under measured costs.
  const std::map<int, double> reference = {{0, 99.78}, {1, 99.97}, {3, 99.24},
                                       {6, 98.95}, {10, 98.99}, {16, 99.87}};
  auto rep = mbm::run_benchmark(1000, 2000);
  int hit_rows = 0, zero_rows = 0;
  for (const auto& r : rep.cases) {
    if (r.observed != r.expected) {
      return {false, "case " + std::to_string(r.id) + " observed " +
                         mbm::to_string(r.observed)};
    }
    if (r.expected == mbm::Prefetchability::kHit) {
      if (r.reduction_pct != 100.0 || r.reduction_pct < reference.at(r.id)) {
        return {false, "hit case " + std::to_string(r.id) + " reduction " +
                           std::to_string(r.reduction_pct)};
      }
      ++hit_rows;
    } else {
      if (r.reduction_pct != 0.0) {
        return {false, "case " + std::to_string(r.id) + " reduction " +
                           std::to_string(r.reduction_pct)};
      }
      ++zero_rows;
    }
  }
  return {true, std::to_string(hit_rows) + " hit rows at 100%, " +
                    std::to_string(zero_rows) + " other rows at 0%"};
}

Outcome criterion4() {
  auto gc = mbm::generate_case(1, 1000, 300);
  auto r = fixtures::run_pipeline(gc.app, gc.trace, gc.net);
  int origin_fetches = static_cast<int>(r.opt.prefetches().size());
  auto demands = r.opt.demands();
  for (const auto& d : demands) {
    origin_fetches += d.served_from == runtime::ServedFrom::kOrigin;
  }
  auto m = metrics::compute_effectiveness(r.base, r.opt);
  std::ostringstream s;
  s << "origin fetches " << origin_fetches << ", served "
    << (demands.empty() ? "-" : runtime::to_string(demands[0].served_from))
    << "(" << (demands.empty() ? 0 : demands[0].waited_ms) << "ms), reduction "
    << (m.requests.empty() ? -1 : m.requests[0].reduction_pct) << "%";
  bool ok = origin_fetches == 1 && demands.size() == 1 &&
            demands[0].served_from == runtime::ServedFrom::kWaited &&
            demands[0].waited_ms == 700 && m.requests[0].reduction_pct == 30.0;
  return {ok, s.str()};
}

Outcome criterion5() {
  auto app = ir::parse_app(fixtures::read_text(fixtures::data_path("weather.papp")));
  auto trace = runtime::Trace{{"onCreate", 0, {}},
                              {"onItemSelected", 1000, {{"city", "Gothenburg"}}},
                              {"onClick", 1000, {{"cityId", "456"}}}};
  auto r = fixtures::run_pipeline(app, trace, runtime::NetModel{});

  // URL Map entry for url2: two static strings, then L7_{3,1}.
  const auto& url2 = r.url_map.at("url2");
  bool map_ok = url2.size() == 3 && url2[0].concrete == "http://weatherapi/" &&
                url2[1].concrete == "weather?&cityName=" &&
                url2[2].spots == std::vector<analysis::DefinitionSpot>{
                                     {"onItemSelected", 0, 3, 1}};
  if (!map_ok) return {false, "url2 URL Map entry differs"};

  const std::vector<std::string> all3 = {"url1", "url2", "url3"};
  analysis::TriggerMap expected_triggers{{{"onCreate", all3},
                                          {"onItemSelected", all3}}};
  if (r.triggers != expected_triggers) return {false, "Trigger Map differs"};

  // Insertion sites in the optimized weather app, as (container, index, stmt).
  using ir::Stmt;
  auto at = [&](const std::string& cb, std::size_t i) -> const ir::StmtNode* {
    const auto* p = r.ia.app.find_callback(cb);
    return p && i < p->body.size() ? &p->body[i].node : nullptr;
  };
  auto is = [](const ir::StmtNode* n, const ir::StmtNode& want) {
    return n && *n == want;
  };
  const ir::TriggerPrefetch tp{all3};
  bool sites_ok =
      r.ia.app.find_callback("onCreate")->body.size() == 2 &&
      is(at("onCreate", 1), tp) &&
      r.ia.app.find_callback("onItemSelected")->body.size() == 3 &&
      is(at("onItemSelected", 1), ir::SendDefinition{"cityName", "url2", 3}) &&
      is(at("onItemSelected", 2), tp) &&
      is(at("onClick", 1), ir::SendDefinition{"cityId", "url3", 3}) &&
      is(at("onClick", 6), ir::FetchFromProxy{"getInputStream", "url1"}) &&
      is(at("onClick", 8), ir::FetchFromProxy{"getInputStream", "url2"}) &&
      is(at("onClick", 10), ir::FetchFromProxy{"getInputStream", "url3"}) &&
      r.ia.provenance.size() == 7;
  if (!sites_ok) return {false, "instrumentation sites differ"};
  return {true, "url2 map, Trigger Map and all 7 insertion sites match"};
}

Outcome criterion6(const fixtures::PropertyReport& rep) {
  std::ostringstream s;
  s << rep.cases << " apps, " << rep.demands << " demands; transparency "
    << rep.transparency_violations << ", duplicates "
    << rep.duplicate_fetch_violations << ", nondeterminism "
    << rep.determinism_violations;
  if (!rep.first_failure.empty()) s << " (" << rep.first_failure << ")";
  return {rep.cases == 1000 && rep.demands > 0 && rep.cache_properties_hold(),
          s.str()};
}

Outcome criterion7(const fixtures::PropertyReport& rep) {
  std::ostringstream s;
  s << rep.checked_definitions << " executed definitions checked, "
    << rep.soundness_violations << " violations";
  return {rep.checked_definitions > 0 && rep.soundness_violations == 0, s.str()};
}

Outcome criterion8() {
  auto app = ir::parse_app(fixtures::static_urls_app_text(7));
  runtime::Trace trace{{"onCreate", 0, {}}, {"onShow", 5000, {}}};
  auto r = fixtures::run_pipeline(app, trace, runtime::NetModel{});
  auto evals = r.opt.trigger_evals();
  if (evals.size() != 1) return {false, "expected one trigger evaluation"};
  std::ostringstream s;
  s << evals[0].considered.size() << " known URLs, "
    << evals[0].issued.size() << " issued, "
    << evals[0].skipped_threshold.size() << " over threshold";
  bool ok = evals[0].considered.size() == 7 && evals[0].issued.size() == 5 &&
            evals[0].skipped_threshold.size() == 2 &&
            r.opt.prefetches().size() == 5;
  return {ok, s.str()};
}

Outcome criterion9() {
  // One static URL plus 12 ad URLs whose ids are picked on the new screen.
  auto ads = ir::parse_app(fixtures::ads_app_text(12));
  auto r = fixtures::run_pipeline(ads, fixtures::ads_trace(12, 3000),
                                 runtime::NetModel{});
  auto outlier = metrics::compute_effectiveness(r.base, r.opt);

  // Two more app/trace pairs for the cross-app summary.
  auto weather = ir::parse_app(fixtures::read_text(fixtures::data_path("weather.papp")));
  auto w = fixtures::run_pipeline(
      weather,
      {{"onCreate", 0, {}},
       {"onItemSelected", 1000, {{"city", "Gothenburg"}}},
       {"onClick", 1000, {{"cityId", "456"}}}},
      runtime::NetModel{});
  auto mbm1 = mbm::generate_case(1, 1000, 300);
  auto b = fixtures::run_pipeline(mbm1.app, mbm1.trace, mbm1.net);
  std::vector<metrics::Metrics> runs = {
      outlier, metrics::compute_effectiveness(w.base, w.opt),
      metrics::compute_effectiveness(b.base, b.opt)};
  auto summary = metrics::summarize(runs);
  auto table = metrics::format_summary(summary);

  // Expected arithmetic: hit rates 1/13, 2/3, 1/1; requests 13, 3, 1.
  const double hr[] = {100.0 / 13, 200.0 / 3, 100.0};
  const double mean = (hr[0] + hr[1] + hr[2]) / 3;
  double ss = 0;
  for (double v : hr) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / 2);
  bool ok = outlier.requests.size() == 13 && outlier.hits == 1 &&
            std::round(outlier.hit_rate * 1000) / 10 == 7.7 &&
            table.find("7.7%") != std::string::npos &&
            summary.runtime_requests.min == 1 &&
            summary.runtime_requests.max == 13 &&
            std::abs(summary.hit_rate_pct.avg - mean) < 1e-9 &&
            std::abs(summary.hit_rate_pct.stddev - sd) < 1e-9;
  char buf[128];
  std::snprintf(buf, sizeof buf, "outlier %zu/%zu hits = %.1f%%, %zu-run summary",
                outlier.hits, outlier.requests.size(), 100 * outlier.hit_rate,
                summary.runs);
  return {ok, buf};
}

}  // namespace

int main() {
  using Clock = std::chrono::steady_clock;
  int failures = 0;
  auto report = [&](int n, const char* name, double limit_s,
                    const std::function<Outcome()>& check) {
    auto t0 = Clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    if (limit_s > 0 && secs > limit_s) {
      o.ok = false;
      o.detail += " (over time limit)";
    }
    failures += !o.ok;
    std::printf("%s criterion %d %s: %s [%.3fs]\n", o.ok ? "PASS" : "FAIL", n,
                name, o.detail.c_str(), secs);
  };

  report(1, "classification", 1, criterion1);
  report(2, "accuracy", 5, criterion2);
  report(3, "effectiveness", 5, criterion3);
  report(4, "wait semantics", 0, criterion4);
  report(5, "worked example", 0, criterion5);

  fixtures::PropertyReport props;
  double props_secs = 0;
  {
    auto t0 = Clock::now();
    props = fixtures::check_properties(1, 1000);
    props_secs = std::chrono::duration<double>(Clock::now() - t0).count();
  }
  report(6, "cache transparency", 0, [&] {
    auto o = criterion6(props);
    char buf[64];
    std::snprintf(buf, sizeof buf, " (property run %.3fs)", props_secs);
    o.detail += buf;
    if (props_secs > 60) {
      o.ok = false;
      o.detail += " (over time limit)";
    }
    return o;
  });
  report(7, "spot soundness", 0, [&] { return criterion7(props); });
  report(8, "threshold", 0, criterion8);
  report(9, "hit-rate reporting", 0, criterion9);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
