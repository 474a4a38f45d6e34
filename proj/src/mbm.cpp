// SPDX-License-Identifier: Apache-2.0

#include "thinkahead/mbm.hpp"

#include <array>
#include <cstdio>
#include <stdexcept>

#include "thinkahead/callback_analysis.hpp"
#include "thinkahead/ecg.hpp"
#include "thinkahead/instrumenter.hpp"
#include "thinkahead/string_analysis.hpp"

namespace thinkahead::mbm {

namespace {

// Placement patterns per case; ';' separates values, B/A mark each spot.
constexpr std::array<const char*, kCaseCount> kPatterns = {
    "",
    // k=1
    "B", "A", "BB", "BA", "AA",
    // k=2, d=[1,1]
    "B;B", "B;A", "A;B", "A;A",
    // k=2, d=[1,2]
    "B;BB", "A;BB", "A;BA", "B;BA", "B;AA", "A;AA",
    // k=2, d=[2,2]
    "BB;BB", "BB;BA", "BB;AA", "BA;BB", "BA;BA", "BA;AA", "AA;BB", "AA;BA",
    "AA;AA",
};

constexpr const char* kTrigger = "onCreate";
constexpr const char* kTarget = "onClick";
constexpr const char* kFetch = "getInputStream";

std::string var_name(std::size_t i) { return "v" + std::to_string(i + 1); }

std::string input_tag(std::size_t i, std::size_t j) {
  return var_name(i) + "_" + std::to_string(j + 1);
}

ir::Stmt stmt(ir::StmtNode node) { return ir::Stmt{std::move(node), 0}; }

}  // namespace

const char* to_string(Prefetchability p) {
  switch (p) {
    case Prefetchability::kHit: return "H";
    case Prefetchability::kNonHit: return "NH";
    case Prefetchability::kNonPrefetchable: return "NP";
  }
  return "?";
}

std::vector<int> CaseConfig::d() const {
  std::vector<int> out;
  for (const auto& v : values) out.push_back(static_cast<int>(v.size()));
  return out;
}

std::string CaseConfig::describe() const {
  std::string dims, pattern;
  for (std::size_t i = 0; i < values.size(); ++i) {
    dims += (i ? "," : "") + std::to_string(values[i].size());
    if (i) pattern += ";";
    for (auto p : values[i]) pattern += p == Placement::kBefore ? 'B' : 'A';
  }
  std::string out = "k=" + std::to_string(k());
  if (!values.empty()) out += " d=[" + dims + "] " + pattern;
  return out;
}

CaseConfig case_config(int case_id) {
  if (case_id < 0 || case_id >= kCaseCount) {
    throw std::out_of_range("no benchmark case " + std::to_string(case_id));
  }
  CaseConfig cfg;
  std::string pattern = kPatterns[case_id];
  if (pattern.empty()) return cfg;
  cfg.values.emplace_back();
  for (char c : pattern) {
    if (c == ';') {
      cfg.values.emplace_back();
    } else {
      cfg.values.back().push_back(c == 'B' ? Placement::kBefore
                                           : Placement::kAfter);
    }
  }
  return cfg;
}

Prefetchability classify(const CaseConfig& config) {
  bool any_after = false;
  for (const auto& spots : config.values) {
    bool has_before = false;
    for (auto p : spots) {
      if (p == Placement::kBefore) {
        has_before = true;
      } else {
        any_after = true;
      }
    }
    if (!has_before) return Prefetchability::kNonPrefetchable;
  }
  return any_after ? Prefetchability::kNonHit : Prefetchability::kHit;
}

GeneratedCase generate_case(int case_id, std::int64_t latency_ms,
                            std::int64_t think_ms,
                            const runtime::InstrumentationCosts& costs) {
  GeneratedCase gc;
  gc.id = case_id;
  gc.config = case_config(case_id);

  ir::App& app = gc.app;
  app.name = "mbm_case" + std::to_string(case_id);
  app.netlib.push_back({kFetch, latency_ms});

  ir::Procedure trigger{kTrigger, ir::ProcedureKind::kCallback, {}, 0};
  ir::Procedure target{kTarget, ir::ProcedureKind::kCallback, {}, 0};
  runtime::TraceStep first{kTrigger, 0, {}};
  runtime::TraceStep second{kTarget, think_ms, {}};

  const auto& values = gc.config.values;
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (std::size_t j = 0; j < values[i].size(); ++j) {
      const std::string tag = input_tag(i, j);
      if (values[i][j] == Placement::kBefore) {
        trigger.body.push_back(stmt(ir::DefineDynamic{var_name(i), tag}));
        first.inputs[tag] = "b" + std::to_string(i + 1) + std::to_string(j + 1);
      } else {
        target.body.push_back(stmt(ir::DefineDynamic{var_name(i), tag}));
        second.inputs[tag] = "a" + std::to_string(i + 1) + std::to_string(j + 1);
      }
    }
  }

  ir::BuildUrl build{gc.url_id, {}};
  build.parts.push_back({ir::UrlPart::Kind::kLiteral,
                         "http://mbm.example/case" + std::to_string(case_id)});
  for (std::size_t i = 0; i < values.size(); ++i) {
    build.parts.push_back(
        {ir::UrlPart::Kind::kLiteral, (i ? "&" : "?") + var_name(i) + "="});
    build.parts.push_back({ir::UrlPart::Kind::kVar, var_name(i)});
  }
  target.body.push_back(stmt(std::move(build)));
  target.body.push_back(stmt(ir::NetCall{kFetch, gc.url_id}));

  app.callbacks.push_back(std::move(trigger));
  app.callbacks.push_back(std::move(target));
  app.ccfg.wait_nodes.push_back("wn1");
  app.ccfg.edges.push_back({kTrigger, "wn1", 0});
  app.ccfg.edges.push_back({"wn1", kTarget, 0});
  ir::validate_or_throw(app);

  gc.trace = {first, second};
  gc.net.default_latency_ms = latency_ms;
  gc.net.costs = costs;
  return gc;
}

BenchReport run_benchmark(std::int64_t latency_ms, std::int64_t think_ms,
                          const runtime::InstrumentationCosts& costs) {
  if (latency_ms <= 0) throw std::invalid_argument("latency must be positive");
  if (think_ms < 0) throw std::invalid_argument("think time must be >= 0");

  BenchReport report;
  report.latency_ms = latency_ms;
  report.think_ms = think_ms;
  for (int id = 0; id < kCaseCount; ++id) {
    GeneratedCase gc = generate_case(id, latency_ms, think_ms, costs);

    auto url_map = analysis::analyze_urls(gc.app);
    auto signature =
        analysis::profile_fetch_signature(gc.app, gc.trace, gc.net);
    auto ecg = ir::build_ecg(gc.app);
    auto triggers =
        analysis::identify_trigger_callbacks(gc.app, gc.app.ccfg, ecg,
                                             signature);
    auto ia = instrument::instrument(gc.app, url_map, triggers, signature);

    runtime::RunOptions base_opts;
    base_opts.signature = signature.method;
    auto base = runtime::run_trace(gc.app, gc.trace, gc.net, url_map,
                                   base_opts);
    auto opt = runtime::run_trace(ia.app, gc.trace, gc.net, url_map);

    CaseResult r;
    r.id = id;
    r.description = gc.config.describe();
    r.expected = classify(gc.config);
    for (const auto& e : opt.events) {
      if (const auto* d = std::get_if<runtime::DefinitionUpdateEvent>(&e)) {
        r.has_send_definition = true;
        r.sd_ms += d->cost_ms;
      } else if (const auto* t = std::get_if<runtime::TriggerEvalEvent>(&e)) {
        r.tp_ms += t->cost_ms;
      }
    }
    auto base_demands = base.demands();
    auto opt_demands = opt.demands();
    if (base_demands.size() != 1 || opt_demands.size() != 1) {
      throw std::logic_error("benchmark case " + std::to_string(id) +
                             " must make exactly one request");
    }
    const auto& demand = opt_demands.front();
    r.orig_ms = base_demands.front().response_time_ms;
    r.ffp_ms = demand.response_time_ms + demand.overhead_ms;
    r.opt_ms = r.sd_ms + r.tp_ms + r.ffp_ms;
    r.reduction_pct =
        100.0 * static_cast<double>(r.orig_ms - r.opt_ms) / r.orig_ms;
    r.served_from = demand.served_from;
    r.waited_ms = demand.waited_ms;

    bool prefetched = false;
    for (const auto& p : opt.prefetches()) prefetched |= p.url_id == gc.url_id;
    if (demand.served_from != runtime::ServedFrom::kOrigin) {
      r.observed = Prefetchability::kHit;
    } else if (prefetched) {
      r.observed = Prefetchability::kNonHit;
    } else {
      r.observed = Prefetchability::kNonPrefetchable;
    }

    r.accuracy = metrics::compute_accuracy(
        opt, metrics::replay_oracle(ia.app, gc.trace));
    report.accuracy += r.accuracy;
    report.cases.push_back(std::move(r));
  }
  return report;
}

std::string to_tsv(const BenchReport& report) {
  std::string out = "Case\tSD\tTP\tFFP\tOrig\tOpt\tRed/OH\tExpected\tObserved\n";
  char red[32];
  for (const auto& r : report.cases) {
    std::snprintf(red, sizeof red, "%.2f%%", r.reduction_pct);
    out += std::to_string(r.id) + "\t" +
           (r.has_send_definition ? std::to_string(r.sd_ms) : "N/A") + "\t" +
           std::to_string(r.tp_ms) + "\t" + std::to_string(r.ffp_ms) + "\t" +
           std::to_string(r.orig_ms) + "\t" + std::to_string(r.opt_ms) + "\t" +
           red + "\t" + to_string(r.expected) + "\t" + to_string(r.observed) +
           "\n";
  }
  return out;
}

}  // namespace thinkahead::mbm
