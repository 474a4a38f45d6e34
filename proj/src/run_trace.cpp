// SPDX-License-Identifier: Apache-2.0

#include <algorithm>

#include "thinkahead/runtime.hpp"

namespace thinkahead::runtime {

std::int64_t NetModel::latency_for(const ir::App& app,
                                   const std::string& method) const {
  if (auto it = per_method.find(method); it != per_method.end()) {
    return it->second;
  }
  if (const auto* decl = app.find_netmethod(method);
      decl && decl->latency_ms) {
    return *decl->latency_ms;
  }
  return default_latency_ms;
}

std::string NetModel::payload_for(const std::string& url) const {
  if (auto it = server.find(url); it != server.end()) return it->second;
  return "body:" + url;
}

const char* to_string(ServedFrom s) {
  switch (s) {
    case ServedFrom::kCache: return "cache";
    case ServedFrom::kWaited: return "waited";
    case ServedFrom::kOrigin: return "origin";
  }
  return "?";
}

namespace {

template <class T>
std::vector<T> collect(const std::vector<RunEvent>& events) {
  std::vector<T> out;
  for (const auto& e : events) {
    if (const auto* t = std::get_if<T>(&e)) out.push_back(*t);
  }
  return out;
}

// First method each url is fetched with through the proxy.
std::map<std::string, std::string> proxy_fetch_methods(const ir::App& app) {
  std::map<std::string, std::string> out;
  for (const auto* proc : app.procedures_in_program_order()) {
    for (const auto& stmt : proc->body) {
      if (const auto* f = std::get_if<ir::FetchFromProxy>(&stmt.node)) {
        out.emplace(f->url_id, f->method);
      }
    }
  }
  return out;
}

std::map<std::string, std::string> merge_hint_urls(
    const std::map<std::string, std::string>& a,
    const std::map<std::string, std::string>& b) {
  auto out = a;
  for (const auto& [id, value] : b) {
    auto [it, inserted] = out.emplace(id, value);
    if (!inserted && it->second != value) {
      throw RunError("conflicting hint values for url '" + id + "'");
    }
  }
  return out;
}

class ProxyHost : public Host {
 public:
  ProxyHost(const ir::App& app, const NetModel& net,
            const analysis::UrlMap& seed, const RunOptions& options,
            RunLog& log)
      : app_(app),
        net_(net),
        options_(options),
        proxy_(seed, merge_hint_urls(app.hint_urls, options.hint_urls),
               merged_rules(app, options), net.threshold),
        fetch_methods_(proxy_fetch_methods(app)),
        log_(log) {}

  void net_call(ExecState& st, const ir::NetCall& call) override {
    const std::string& url = st.url_value(call.url_id);
    const std::int64_t latency = net_.latency_for(app_, call.method);
    const bool fetch_spot =
        !app_.instrumented &&
        (!options_.signature || *options_.signature == call.method);
    if (fetch_spot) {
      if (options_.on_demand) options_.on_demand(st, call.url_id);
      DemandEvent d;
      d.url_id = call.url_id;
      d.url = url;
      d.method = call.method;
      d.at = st.now;
      d.served_from = ServedFrom::kOrigin;
      d.response_time_ms = latency;
      d.payload = net_.payload_for(url);
      log_.events.emplace_back(std::move(d));
    } else {
      log_.events.emplace_back(
          NetOpEvent{call.method, call.url_id, url, st.now, latency});
    }
    st.now += latency;
  }

  void send_definition(ExecState& st, const ir::SendDefinition& sd) override {
    auto it = st.vars.find(sd.var);
    const std::string value =
        it == st.vars.end() ? std::string(kUnsetValue) : it->second.value;
    std::string stored = proxy_.on_send_definition(sd.url_id, sd.part, value);
    const std::int64_t cost = net_.costs.send_definition_ms;
    log_.events.emplace_back(DefinitionUpdateEvent{
        sd.url_id, sd.part, std::move(stored), st.now, cost});
    st.now += cost;
  }

  void trigger_prefetch(ExecState& st, const std::string& callback,
                        const ir::TriggerPrefetch& tp) override {
    std::vector<PrefetchEvent> issued;
    auto latency_of = [&](const std::string& url_id) {
      auto it = fetch_methods_.find(url_id);
      if (it != fetch_methods_.end()) {
        return net_.latency_for(app_, it->second);
      }
      if (!fetch_methods_.empty()) {
        return net_.latency_for(app_, fetch_methods_.begin()->second);
      }
      return net_.default_latency_ms;
    };
    TriggerEvalEvent eval = proxy_.on_trigger_prefetch(
        callback, tp.url_ids, st.now, latency_of, net_, &issued);
    eval.cost_ms = net_.costs.trigger_prefetch_ms;
    for (auto& p : issued) log_.events.emplace_back(std::move(p));
    log_.events.emplace_back(std::move(eval));
    st.now += net_.costs.trigger_prefetch_ms;
  }

  void fetch_from_proxy(ExecState& st,
                        const ir::FetchFromProxy& fetch) override {
    const std::string& url = st.url_value(fetch.url_id);
    if (options_.on_demand) options_.on_demand(st, fetch.url_id);
    auto outcome = proxy_.on_fetch_from_proxy(
        url, st.now, net_.latency_for(app_, fetch.method), net_);
    DemandEvent d;
    d.url_id = fetch.url_id;
    d.url = url;
    d.method = fetch.method;
    d.at = st.now;
    d.served_from = outcome.served_from;
    d.waited_ms = outcome.served_from == ServedFrom::kWaited
                      ? outcome.response_time_ms
                      : 0;
    d.response_time_ms = outcome.response_time_ms;
    d.overhead_ms = net_.costs.fetch_from_proxy_ms;
    d.payload = std::move(outcome.payload);
    st.now += d.response_time_ms + d.overhead_ms;
    log_.events.emplace_back(std::move(d));
  }

 private:
  static std::vector<ir::RewriteRule> merged_rules(const ir::App& app,
                                                   const RunOptions& options) {
    auto rules = app.rewrite_rules;
    for (const auto& r : options.rewrite_rules) {
      if (std::find(rules.begin(), rules.end(), r) == rules.end()) {
        rules.push_back(r);
      }
    }
    return rules;
  }

  const ir::App& app_;
  const NetModel& net_;
  const RunOptions& options_;
  Proxy proxy_;
  std::map<std::string, std::string> fetch_methods_;
  RunLog& log_;
};

}  // namespace

std::vector<DemandEvent> RunLog::demands() const {
  return collect<DemandEvent>(events);
}

std::vector<PrefetchEvent> RunLog::prefetches() const {
  return collect<PrefetchEvent>(events);
}

std::vector<TriggerEvalEvent> RunLog::trigger_evals() const {
  return collect<TriggerEvalEvent>(events);
}

RunLog run_trace(const ir::App& app, const Trace& trace, const NetModel& net,
                 const analysis::UrlMap& seed, const RunOptions& options) {
  RunLog log;
  log.instrumented = app.instrumented;
  ProxyHost host(app, net, seed, options, log);
  log.end_ms = execute_trace(app, trace, host);
  return log;
}

}  // namespace thinkahead::runtime
