// SPDX-License-Identifier: Apache-2.0

#include "thinkahead/instrumenter.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace thinkahead::instrument {

namespace {

struct SpotUse {
  std::string url_id;
  int part;
  int ordinal;
};

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    out += (i ? ", " : "") + items[i];
  }
  return out;
}

void check_artifacts(const ir::App& app, const analysis::UrlMap& url_map,
                     const analysis::TriggerMap& trigger_map,
                     const analysis::FetchSignature& signature) {
  if (!app.find_netmethod(signature.method)) {
    throw InstrumentError("signature '" + signature.method +
                          "' is not a declared netmethod");
  }
  for (const auto& [url_id, parts] : url_map) {
    auto spot = app.find_url_spot(url_id);
    if (!spot) {
      throw InstrumentError("url map names unknown url '" + url_id + "'");
    }
    const auto& build =
        std::get<ir::BuildUrl>(spot->first->body[spot->second].node);
    if (build.parts.size() != parts.size()) {
      throw InstrumentError("url map entry for '" + url_id +
                            "' does not match its URL Spot");
    }
  }
  for (const auto& [callback, urls] : trigger_map.entries) {
    if (!app.find_callback(callback)) {
      throw InstrumentError("trigger map names unknown callback '" + callback +
                            "'");
    }
    for (const auto& url_id : urls) {
      if (!app.find_url_spot(url_id)) {
        throw InstrumentError("trigger map names unknown url '" + url_id +
                              "'");
      }
    }
  }
}

}  // namespace

InstrumentedApp instrument(const ir::App& app, const analysis::UrlMap& url_map,
                           const analysis::TriggerMap& trigger_map,
                           const analysis::FetchSignature& signature) {
  if (app.instrumented) throw InstrumentError("app is already instrumented");
  check_artifacts(app, url_map, trigger_map, signature);

  // (container, stmt index) -> the URL parts that statement may define.
  std::map<std::pair<std::string, int>, std::vector<SpotUse>> spot_uses;
  for (const auto& [url_id, parts] : url_map) {
    for (const auto& part : parts) {
      for (const auto& spot : part.spots) {
        spot_uses[{spot.container, spot.stmt_index}].push_back(
            {url_id, spot.part, spot.ordinal});
      }
    }
  }

  InstrumentedApp out;
  out.app = app;
  out.app.instrumented = true;

  auto rewrite = [&](ir::Procedure& proc) {
    std::vector<ir::Stmt> body;
    for (std::size_t i = 0; i < proc.body.size(); ++i) {
      const ir::Stmt& stmt = proc.body[i];
      const auto* fetch = std::get_if<ir::NetCall>(&stmt.node);
      if (fetch && fetch->method == signature.method) {
        out.provenance.push_back(
            {proc.name, static_cast<int>(body.size()),
             InsertKind::kFetchFromProxy,
             "fetch spot " + fetch->method + "(" + fetch->url_id + ")"});
        body.push_back({ir::FetchFromProxy{fetch->method, fetch->url_id},
                        stmt.line});
      } else {
        body.push_back(stmt);
      }

      auto uses = spot_uses.find({proc.name, static_cast<int>(i)});
      if (uses == spot_uses.end()) continue;
      auto var = ir::defined_var(stmt);
      if (!var) {
        throw InstrumentError("definition spot " + proc.name + "[" +
                              std::to_string(i) +
                              "] is not a definition statement");
      }
      for (const auto& use : uses->second) {
        out.provenance.push_back(
            {proc.name, static_cast<int>(body.size()),
             InsertKind::kSendDefinition,
             "definition spot of " + use.url_id + " (m=" +
                 std::to_string(use.part) +
                 ", n=" + std::to_string(use.ordinal) + ")"});
        body.push_back({ir::SendDefinition{*var, use.url_id, use.part},
                        stmt.line});
      }
    }

    auto trig = trigger_map.entries.find(proc.name);
    if (proc.kind == ir::ProcedureKind::kCallback &&
        trig != trigger_map.entries.end() && !trig->second.empty()) {
      out.provenance.push_back({proc.name, static_cast<int>(body.size()),
                                InsertKind::kTriggerPrefetch,
                                "trigger callback for " + join(trig->second)});
      body.push_back({ir::TriggerPrefetch{trig->second}, 0});
    }
    proc.body = std::move(body);
  };

  for (auto& cb : out.app.callbacks) rewrite(cb);
  for (auto& m : out.app.methods) rewrite(m);
  return out;
}

InstrumentedApp apply_hints(InstrumentedApp ia, const Hints& hints) {
  ir::App& app = ia.app;
  if (!app.instrumented) {
    throw InstrumentError("hints apply to instrumented apps only");
  }

  for (const auto& [url_id, value] : hints.extra_static_urls) {
    if (app.find_url_spot(url_id)) {
      throw InstrumentError("hint url '" + url_id +
                            "' collides with an app url");
    }
    auto [it, inserted] = app.hint_urls.emplace(url_id, value);
    if (!inserted && it->second != value) {
      throw InstrumentError("conflicting values for hint url '" + url_id +
                            "'");
    }
  }

  for (const auto& rule : hints.rewrite_rules) {
    auto spot = app.find_url_spot(rule.url_id);
    if (!spot) {
      throw InstrumentError("rewrite rule names unknown url '" + rule.url_id +
                            "'");
    }
    const auto& parts =
        std::get<ir::BuildUrl>(spot->first->body[spot->second].node).parts;
    if (rule.part < 1 || rule.part > static_cast<int>(parts.size())) {
      throw InstrumentError("rewrite rule names missing part " +
                            std::to_string(rule.part) + " of '" +
                            rule.url_id + "'");
    }
    if (std::find(app.rewrite_rules.begin(), app.rewrite_rules.end(), rule) ==
        app.rewrite_rules.end()) {
      app.rewrite_rules.push_back(rule);
    }
  }

  for (const auto& hint : hints.extra_triggers) {
    if (!app.find_callback(hint.callback)) {
      throw InstrumentError("hint names unknown callback '" + hint.callback +
                            "'");
    }
    for (const auto& url_id : hint.url_ids) {
      if (!app.find_url_spot(url_id) && !app.hint_urls.count(url_id)) {
        throw InstrumentError("hint names unknown url '" + url_id + "'");
      }
    }
    if (hint.url_ids.empty()) continue;

    ir::Procedure& proc = *app.find_procedure(hint.callback);
    const std::string reason = "developer hint for " + join(hint.url_ids);
    if (hint.at_launch) {
      proc.body.insert(proc.body.begin(),
                       ir::Stmt{ir::TriggerPrefetch{hint.url_ids}, 0});
      for (auto& p : ia.provenance) {
        if (p.container == proc.name) ++p.stmt_index;
      }
      ia.provenance.push_back(
          {proc.name, 0, InsertKind::kTriggerPrefetch, reason});
      continue;
    }
    auto* last = proc.body.empty()
                     ? nullptr
                     : std::get_if<ir::TriggerPrefetch>(&proc.body.back().node);
    if (last) {
      for (const auto& url_id : hint.url_ids) {
        if (std::find(last->url_ids.begin(), last->url_ids.end(), url_id) ==
            last->url_ids.end()) {
          last->url_ids.push_back(url_id);
        }
      }
    } else {
      ia.provenance.push_back({proc.name, static_cast<int>(proc.body.size()),
                               InsertKind::kTriggerPrefetch, reason});
      proc.body.push_back({ir::TriggerPrefetch{hint.url_ids}, 0});
    }
  }

  ir::validate_or_throw(app);
  return ia;
}

}  // namespace thinkahead::instrument
