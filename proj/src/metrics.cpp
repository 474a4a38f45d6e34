// SPDX-License-Identifier: Apache-2.0

#include "thinkahead/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <numeric>
#include <set>

namespace thinkahead::metrics {

namespace {

// A variable whose value does not depend on the session: all of its
// definitions are static and agree.
bool fixed_statically(const ir::App& app, const std::string& var) {
  std::set<std::string> values;
  for (const auto* proc : app.procedures_in_program_order()) {
    for (const auto& stmt : proc->body) {
      if (const auto* d = std::get_if<ir::DefineDynamic>(&stmt.node)) {
        if (d->var == var) return false;
      }
      const auto* s = std::get_if<ir::DefineStatic>(&stmt.node);
      if (!s || s->var != var) continue;
      const auto& src = s->source;
      if (src.kind == ir::StaticSourceKind::kLiteral) {
        values.insert(src.text);
        continue;
      }
      const auto& table = src.kind == ir::StaticSourceKind::kResource
                              ? app.resources
                              : app.settings;
      auto it = table.find(src.text);
      if (it == table.end()) return false;
      values.insert(it->second);
    }
  }
  return values.size() == 1;
}

class ReplayHost : public runtime::Host {
 public:
  ReplayHost(const ir::App& app,
             const std::map<std::string, std::string>& hint_urls)
      : app_(app), hint_urls_(hint_urls) {
    hint_urls_.insert(app.hint_urls.begin(), app.hint_urls.end());
  }

  void net_call(runtime::ExecState&, const ir::NetCall&) override {}
  void send_definition(runtime::ExecState&,
                       const ir::SendDefinition&) override {}
  void fetch_from_proxy(runtime::ExecState&,
                        const ir::FetchFromProxy&) override {}

  void trigger_prefetch(runtime::ExecState& state, const std::string& callback,
                        const ir::TriggerPrefetch& tp) override {
    OracleEntry entry{callback, {}};
    for (const auto& url_id : tp.url_ids) {
      if (knowable(state, url_id) &&
          std::find(entry.prefetchable.begin(), entry.prefetchable.end(),
                    url_id) == entry.prefetchable.end()) {
        entry.prefetchable.push_back(url_id);
      }
    }
    oracle.push_back(std::move(entry));
  }

  Oracle oracle;

 private:
  bool knowable(const runtime::ExecState& state, const std::string& url_id) {
    if (hint_urls_.count(url_id)) return true;
    auto spot = app_.find_url_spot(url_id);
    if (!spot) return false;
    const auto& build =
        std::get<ir::BuildUrl>(spot->first->body[spot->second].node);
    for (const auto& part : build.parts) {
      switch (part.kind) {
        case ir::UrlPart::Kind::kLiteral:
          break;
        case ir::UrlPart::Kind::kResource:
          if (!app_.resources.count(part.text)) return false;
          break;
        case ir::UrlPart::Kind::kVar:
          if (!state.vars.count(part.text) &&
              !fixed_statically(app_, part.text)) {
            return false;
          }
          break;
      }
    }
    return true;
  }

  const ir::App& app_;
  std::map<std::string, std::string> hint_urls_;
};

double pct(double num, double den) { return den == 0 ? 0.0 : 100.0 * num / den; }

}  // namespace

Oracle replay_oracle(const ir::App& app, const runtime::Trace& trace,
                     const std::map<std::string, std::string>& extra_hint_urls) {
  ReplayHost host(app, extra_hint_urls);
  runtime::execute_trace(app, trace, host);
  return std::move(host.oracle);
}

double Accuracy::precision() const {
  return attempted == 0 ? 1.0 : static_cast<double>(correct) / attempted;
}

double Accuracy::recall() const {
  return prefetchable == 0 ? 1.0 : static_cast<double>(correct) / prefetchable;
}

Accuracy& Accuracy::operator+=(const Accuracy& other) {
  attempted += other.attempted;
  prefetchable += other.prefetchable;
  correct += other.correct;
  return *this;
}

Accuracy compute_accuracy(const runtime::RunLog& log, const Oracle& oracle) {
  auto evals = log.trigger_evals();
  if (oracle.size() < evals.size()) {
    throw MetricsError("oracle missing trigger point " +
                       std::to_string(oracle.size()));
  }
  if (oracle.size() > evals.size()) {
    throw MetricsError("oracle has " + std::to_string(oracle.size()) +
                       " trigger points, run log has " +
                       std::to_string(evals.size()));
  }
  Accuracy acc;
  for (std::size_t i = 0; i < evals.size(); ++i) {
    if (evals[i].callback != oracle[i].callback) {
      throw MetricsError("oracle trigger point " + std::to_string(i) +
                         " is '" + oracle[i].callback + "', run log has '" +
                         evals[i].callback + "'");
    }
    std::set<std::string> attempted(evals[i].issued.begin(),
                                    evals[i].issued.end());
    attempted.insert(evals[i].skipped_known_cached.begin(),
                     evals[i].skipped_known_cached.end());
    std::set<std::string> truth(oracle[i].prefetchable.begin(),
                                oracle[i].prefetchable.end());
    acc.attempted += attempted.size();
    acc.prefetchable += truth.size();
    for (const auto& url : attempted) acc.correct += truth.count(url);
  }
  return acc;
}

Metrics compute_effectiveness(const runtime::RunLog& base,
                              const runtime::RunLog& opt) {
  auto bd = base.demands();
  auto od = opt.demands();
  if (bd.size() != od.size()) {
    throw MetricsError("request sets differ: baseline made " +
                       std::to_string(bd.size()) + " requests, optimized " +
                       std::to_string(od.size()));
  }
  Metrics m;
  double reduction_sum = 0.0;
  double hit_reduction_sum = 0.0;
  for (std::size_t i = 0; i < bd.size(); ++i) {
    if (bd[i].url_id != od[i].url_id || bd[i].url != od[i].url) {
      throw MetricsError("request sets differ at request " +
                         std::to_string(i) + ": " + bd[i].url + " vs " +
                         od[i].url);
    }
    RequestOutcome r;
    r.url_id = bd[i].url_id;
    r.url = bd[i].url;
    r.original_ms = bd[i].response_time_ms + bd[i].overhead_ms;
    r.optimized_ms = od[i].response_time_ms + od[i].overhead_ms;
    r.served_from = od[i].served_from;
    r.reduction_pct = r.original_ms > 0
                          ? pct(static_cast<double>(r.original_ms -
                                                    r.optimized_ms),
                                static_cast<double>(r.original_ms))
                          : 0.0;
    m.original_total_ms += r.original_ms;
    m.optimized_total_ms += r.optimized_ms;
    reduction_sum += r.reduction_pct;
    if (r.served_from != runtime::ServedFrom::kOrigin) {
      ++m.hits;
      hit_reduction_sum += r.reduction_pct;
    }
    m.overhead_ms += od[i].overhead_ms;
    m.requests.push_back(std::move(r));
  }
  for (const auto& e : opt.events) {
    if (const auto* d = std::get_if<runtime::DefinitionUpdateEvent>(&e)) {
      m.overhead_ms += d->cost_ms;
    } else if (const auto* t = std::get_if<runtime::TriggerEvalEvent>(&e)) {
      m.overhead_ms += t->cost_ms;
    }
  }
  if (!m.requests.empty()) {
    m.hit_rate = static_cast<double>(m.hits) / m.requests.size();
    m.mean_reduction_pct = reduction_sum / m.requests.size();
  }
  if (m.hits > 0) m.hit_reduction_pct = hit_reduction_sum / m.hits;
  return m;
}

SummaryStats describe(const std::vector<double>& values) {
  SummaryStats s;
  if (values.empty()) return s;
  auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  s.min = *lo;
  s.max = *hi;
  s.avg = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
  if (values.size() > 1) {
    double sq = 0.0;
    for (double v : values) sq += (v - s.avg) * (v - s.avg);
    s.stddev = std::sqrt(sq / (values.size() - 1));
  }
  return s;
}

Summary summarize(const std::vector<Metrics>& runs) {
  std::vector<double> requests, hit_rate, reduction;
  for (const auto& m : runs) {
    requests.push_back(static_cast<double>(m.requests.size()));
    hit_rate.push_back(100.0 * m.hit_rate);
    if (m.hit_reduction_pct) reduction.push_back(*m.hit_reduction_pct);
  }
  Summary s;
  s.runs = runs.size();
  s.runtime_requests = describe(requests);
  s.hit_rate_pct = describe(hit_rate);
  s.latency_reduction_pct = describe(reduction);
  return s;
}

std::string format_summary(const Summary& summary) {
  auto row = [](const char* label, const SummaryStats& s, bool percent) {
    const char* unit = percent ? "%" : "";
    auto cell = [unit](const char* fmt, double v) {
      char value[48], padded[64];
      std::snprintf(value, sizeof value, fmt, v);
      std::snprintf(padded, sizeof padded, " %10s",
                    (std::string(value) + unit).c_str());
      return std::string(padded);
    };
    return std::string(label) + std::string(18 - std::strlen(label), ' ') +
           cell("%.1f", s.min) + cell("%.1f", s.max) + cell("%.2f", s.avg) +
           cell("%.2f", s.stddev) + "\n";
  };
  char header[160];
  std::snprintf(header, sizeof header, "%-18s %10s %10s %10s %10s\n", "",
                "Min.", "Max.", "Avg.", "Std. Dev.");
  return header + row("Runtime Requests", summary.runtime_requests, false) +
         row("Hit Rate", summary.hit_rate_pct, true) +
         row("Latency Reduction", summary.latency_reduction_pct, true);
}

}  // namespace thinkahead::metrics
