// SPDX-License-Identifier: Apache-2.0

#include "thinkahead/callback_analysis.hpp"

#include <algorithm>

#include "thinkahead/string_analysis.hpp"

namespace thinkahead::analysis {

namespace {

FetchSignature most_expensive(const std::map<std::string, std::int64_t>& cost) {
  if (cost.empty()) throw AnalysisError("nothing to profile");
  // std::map iterates names in ascending order, so strict > keeps the
  // lexicographically smallest name among equal totals.
  auto best = cost.begin();
  for (auto it = cost.begin(); it != cost.end(); ++it) {
    if (it->second > best->second) best = it;
  }
  return {best->first};
}

void add_unique(std::vector<std::string>& list, const std::string& value) {
  if (std::find(list.begin(), list.end(), value) == list.end()) {
    list.push_back(value);
  }
}

}  // namespace

FetchSignature profile_fetch_signature(const ir::App& app,
                                       const runtime::Trace& trace,
                                       const runtime::NetModel& net) {
  // With no signature every NetCall is logged as a demand, with its method.
  runtime::RunLog log = runtime::run_trace(app, trace, net, analyze_urls(app));
  std::map<std::string, std::int64_t> cost;
  for (const auto& d : log.demands()) cost[d.method] += d.response_time_ms;
  return most_expensive(cost);
}

FetchSignature profile_fetch_signature_static(const ir::App& app,
                                              const runtime::NetModel& net) {
  std::map<std::string, std::int64_t> cost;
  for (const auto* proc : app.procedures_in_program_order()) {
    for (const auto& stmt : proc->body) {
      if (const auto* n = std::get_if<ir::NetCall>(&stmt.node)) {
        cost[n->method] += net.latency_for(app, n->method);
      }
    }
  }
  return most_expensive(cost);
}

TriggerMap identify_trigger_callbacks(const ir::App& app, const ir::Ccfg& ccfg,
                                      const ir::Ecg& ecg,
                                      const FetchSignature& signature) {
  TriggerMap map;
  for (const auto* target_method : app.procedures_in_program_order()) {
    for (const auto& stmt : target_method->body) {
      const auto* fetch = std::get_if<ir::NetCall>(&stmt.node);
      if (!fetch || fetch->method != signature.method) continue;

      for (const auto& target_cb : app.callbacks) {
        if (!ecg.reaches(target_cb.name, target_method->name)) continue;
        for (const auto& wait : ccfg.predecessors(target_cb.name)) {
          if (!ccfg.is_wait(wait)) continue;
          for (const auto& trigger : ccfg.predecessors(wait)) {
            if (ccfg.is_wait(trigger)) continue;
            add_unique(map.entries[trigger], fetch->url_id);
          }
        }
      }
    }
  }
  return map;
}

}  // namespace thinkahead::analysis
