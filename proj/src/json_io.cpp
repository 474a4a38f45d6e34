// SPDX-License-Identifier: Apache-2.0

#include "thinkahead/json_io.hpp"

#include <set>

namespace thinkahead::io {

namespace {

template <class F>
auto guarded(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed ") + what + ": " + e.what());
  }
}

void require_object(const json& j, const char* what) {
  if (!j.is_object()) {
    throw FormatError(std::string("malformed ") + what +
                      ": expected a JSON object");
  }
}

void require_array(const json& j, const char* what) {
  if (!j.is_array()) {
    throw FormatError(std::string("malformed ") + what +
                      ": expected a JSON array");
  }
}

void reject_unknown_keys(const json& j, const char* what,
                         std::initializer_list<const char*> allowed) {
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& item : j.items()) {
    if (!ok.count(item.key())) {
      throw FormatError(std::string("malformed ") + what + ": unknown key '" +
                        item.key() + "'");
    }
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  auto it = j.find(key);
  return it == j.end() ? fallback : it->template get<T>();
}

json served_from_json(runtime::ServedFrom s) { return runtime::to_string(s); }

runtime::ServedFrom served_from_from_json(const json& j) {
  const auto s = j.get<std::string>();
  if (s == "cache") return runtime::ServedFrom::kCache;
  if (s == "waited") return runtime::ServedFrom::kWaited;
  if (s == "origin") return runtime::ServedFrom::kOrigin;
  throw FormatError("malformed run log: unknown served_from '" + s + "'");
}

const char* insert_kind_name(instrument::InsertKind k) {
  switch (k) {
    case instrument::InsertKind::kSendDefinition: return "send_definition";
    case instrument::InsertKind::kTriggerPrefetch: return "trigger_prefetch";
    case instrument::InsertKind::kFetchFromProxy: return "fetch_from_proxy";
  }
  return "?";
}

json stats_json(const metrics::SummaryStats& s) {
  return {{"min", s.min}, {"max", s.max}, {"avg", s.avg}, {"stddev", s.stddev}};
}

}  // namespace

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError("malformed " + what + ": " + e.what());
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json to_json(const analysis::UrlMap& map) {
  json out = json::object();
  for (const auto& [url_id, parts] : map) {
    json arr = json::array();
    for (const auto& part : parts) {
      if (part.concrete) {
        arr.push_back({{"concrete", *part.concrete}});
        continue;
      }
      json spots = json::array();
      for (const auto& s : part.spots) {
        spots.push_back({{"container", s.container},
                         {"stmt", s.stmt_index},
                         {"m", s.part},
                         {"n", s.ordinal}});
      }
      arr.push_back({{"spots", spots}});
    }
    out[url_id] = arr;
  }
  return out;
}

analysis::UrlMap url_map_from_json(const json& j) {
  return guarded("url map", [&] {
    require_object(j, "url map");
    analysis::UrlMap map;
    for (const auto& [url_id, parts] : j.items()) {
      require_array(parts, "url map");
      auto& out = map[url_id];
      for (const auto& part : parts) {
        require_object(part, "url map part");
        analysis::UrlPartState state;
        if (part.contains("concrete")) {
          state.concrete = part.at("concrete").get<std::string>();
        } else {
          for (const auto& s : part.at("spots")) {
            state.spots.push_back({s.at("container").get<std::string>(),
                                   s.at("stmt").get<int>(), s.at("m").get<int>(),
                                   s.at("n").get<int>()});
          }
          if (state.spots.empty()) {
            throw FormatError("malformed url map: part of '" + url_id +
                              "' has neither a value nor definition spots");
          }
        }
        out.push_back(std::move(state));
      }
    }
    return map;
  });
}

json to_json(const analysis::TriggerMap& map) {
  json out = json::object();
  for (const auto& [cb, urls] : map.entries) out[cb] = urls;
  return out;
}

analysis::TriggerMap trigger_map_from_json(const json& j) {
  return guarded("trigger map", [&] {
    require_object(j, "trigger map");
    analysis::TriggerMap map;
    for (const auto& [cb, urls] : j.items()) {
      map.entries[cb] = urls.get<std::vector<std::string>>();
    }
    return map;
  });
}

json to_json(const analysis::FetchSignature& sig) {
  return {{"method", sig.method}};
}

analysis::FetchSignature signature_from_json(const json& j) {
  return guarded("signature", [&] {
    require_object(j, "signature");
    return analysis::FetchSignature{j.at("method").get<std::string>()};
  });
}

json to_json(const runtime::Trace& trace) {
  json out = json::array();
  for (const auto& step : trace) {
    out.push_back(
        {{"event", step.event}, {"think_ms", step.think_ms}, {"inputs", step.inputs}});
  }
  return out;
}

runtime::Trace trace_from_json(const json& j) {
  return guarded("trace", [&] {
    require_array(j, "trace");
    runtime::Trace trace;
    for (const auto& s : j) {
      require_object(s, "trace step");
      reject_unknown_keys(s, "trace step", {"event", "think_ms", "inputs"});
      runtime::TraceStep step;
      step.event = s.at("event").get<std::string>();
      step.think_ms = get_or<std::int64_t>(s, "think_ms", 0);
      step.inputs =
          get_or<std::map<std::string, std::string>>(s, "inputs", {});
      trace.push_back(std::move(step));
    }
    return trace;
  });
}

json to_json(const runtime::NetModel& net) {
  return {{"default_latency_ms", net.default_latency_ms},
          {"per_method", net.per_method},
          {"server", net.server},
          {"threshold", net.threshold},
          {"overhead_ms",
           {{"send_definition", net.costs.send_definition_ms},
            {"trigger_prefetch", net.costs.trigger_prefetch_ms},
            {"fetch_from_proxy", net.costs.fetch_from_proxy_ms}}}};
}

runtime::NetModel net_model_from_json(const json& j) {
  return guarded("net config", [&] {
    require_object(j, "net config");
    reject_unknown_keys(j, "net config",
                        {"default_latency_ms", "per_method", "server",
                         "threshold", "overhead_ms"});
    runtime::NetModel net;
    net.default_latency_ms = get_or<std::int64_t>(j, "default_latency_ms", 0);
    net.per_method =
        get_or<std::map<std::string, std::int64_t>>(j, "per_method", {});
    net.server = get_or<std::map<std::string, std::string>>(j, "server", {});
    net.threshold = get_or<int>(j, "threshold", runtime::kDefaultPrefetchThreshold);
    if (auto it = j.find("overhead_ms"); it != j.end()) {
      require_object(*it, "net config overhead_ms");
      reject_unknown_keys(*it, "net config overhead_ms",
                          {"send_definition", "trigger_prefetch",
                           "fetch_from_proxy"});
      net.costs.send_definition_ms =
          get_or<std::int64_t>(*it, "send_definition", 0);
      net.costs.trigger_prefetch_ms =
          get_or<std::int64_t>(*it, "trigger_prefetch", 0);
      net.costs.fetch_from_proxy_ms =
          get_or<std::int64_t>(*it, "fetch_from_proxy", 0);
    }
    if (net.threshold < 1) {
      throw FormatError("malformed net config: threshold must be >= 1");
    }
    bool negative = net.default_latency_ms < 0 ||
                    net.costs.send_definition_ms < 0 ||
                    net.costs.trigger_prefetch_ms < 0 ||
                    net.costs.fetch_from_proxy_ms < 0;
    for (const auto& [m, ms] : net.per_method) negative |= ms < 0;
    if (negative) {
      throw FormatError("malformed net config: latencies and costs must be >= 0");
    }
    return net;
  });
}

json to_json(const instrument::Hints& hints) {
  json triggers = json::array();
  for (const auto& t : hints.extra_triggers) {
    triggers.push_back({{"callback", t.callback},
                        {"urls", t.url_ids},
                        {"at_launch", t.at_launch}});
  }
  json statics = json::array();
  for (const auto& [id, url] : hints.extra_static_urls) {
    statics.push_back({{"id", id}, {"url", url}});
  }
  json rules = json::array();
  for (const auto& r : hints.rewrite_rules) {
    rules.push_back(
        {{"url", r.url_id}, {"m", r.part}, {"find", r.find}, {"replace", r.replace}});
  }
  return {{"triggers", triggers},
          {"static_urls", statics},
          {"rewrite_rules", rules}};
}

instrument::Hints hints_from_json(const json& j) {
  return guarded("hints", [&] {
    require_object(j, "hints");
    reject_unknown_keys(j, "hints", {"triggers", "static_urls", "rewrite_rules"});
    instrument::Hints hints;
    for (const auto& t : get_or<json>(j, "triggers", json::array())) {
      hints.extra_triggers.push_back(
          {t.at("callback").get<std::string>(),
           t.at("urls").get<std::vector<std::string>>(),
           get_or<bool>(t, "at_launch", false)});
    }
    for (const auto& s : get_or<json>(j, "static_urls", json::array())) {
      hints.extra_static_urls.emplace_back(s.at("id").get<std::string>(),
                                           s.at("url").get<std::string>());
    }
    for (const auto& r : get_or<json>(j, "rewrite_rules", json::array())) {
      hints.rewrite_rules.push_back(
          {r.at("url").get<std::string>(), r.at("m").get<int>(),
           r.at("find").get<std::string>(), r.at("replace").get<std::string>()});
    }
    return hints;
  });
}

json to_json(const std::vector<instrument::Provenance>& provenance) {
  json out = json::array();
  for (const auto& p : provenance) {
    out.push_back({{"container", p.container},
                   {"stmt", p.stmt_index},
                   {"kind", insert_kind_name(p.kind)},
                   {"reason", p.reason}});
  }
  return out;
}

json to_json(const runtime::RunLog& log) {
  json events = json::array();
  for (const auto& ev : log.events) {
    std::visit(
        [&](const auto& e) {
          using T = std::decay_t<decltype(e)>;
          if constexpr (std::is_same_v<T, runtime::PrefetchEvent>) {
            events.push_back({{"type", "prefetch"},
                              {"url_id", e.url_id},
                              {"url", e.url},
                              {"issued_at", e.issued_at},
                              {"ready_at", e.ready_at}});
          } else if constexpr (std::is_same_v<T, runtime::DemandEvent>) {
            events.push_back({{"type", "demand"},
                              {"url_id", e.url_id},
                              {"url", e.url},
                              {"method", e.method},
                              {"at", e.at},
                              {"served_from", served_from_json(e.served_from)},
                              {"waited_ms", e.waited_ms},
                              {"response_time_ms", e.response_time_ms},
                              {"overhead_ms", e.overhead_ms},
                              {"payload", e.payload}});
          } else if constexpr (std::is_same_v<T, runtime::NetOpEvent>) {
            events.push_back({{"type", "net_op"},
                              {"method", e.method},
                              {"url_id", e.url_id},
                              {"url", e.url},
                              {"at", e.at},
                              {"duration_ms", e.duration_ms}});
          } else if constexpr (std::is_same_v<T,
                                              runtime::DefinitionUpdateEvent>) {
            events.push_back({{"type", "definition_update"},
                              {"url_id", e.url_id},
                              {"m", e.part},
                              {"value", e.value},
                              {"at", e.at},
                              {"cost_ms", e.cost_ms}});
          } else {
            events.push_back({{"type", "trigger_eval"},
                              {"callback", e.callback},
                              {"at", e.at},
                              {"considered", e.considered},
                              {"issued", e.issued},
                              {"skipped_known_cached", e.skipped_known_cached},
                              {"skipped_unknown", e.skipped_unknown},
                              {"skipped_threshold", e.skipped_threshold},
                              {"cost_ms", e.cost_ms}});
          }
        },
        ev);
  }
  return {{"instrumented", log.instrumented},
          {"end_ms", log.end_ms},
          {"events", events}};
}

runtime::RunLog run_log_from_json(const json& j) {
  return guarded("run log", [&] {
    require_object(j, "run log");
    runtime::RunLog log;
    log.instrumented = j.at("instrumented").get<bool>();
    log.end_ms = j.at("end_ms").get<std::int64_t>();
    using Strings = std::vector<std::string>;
    for (const auto& e : j.at("events")) {
      const auto type = e.at("type").get<std::string>();
      if (type == "prefetch") {
        log.events.push_back(runtime::PrefetchEvent{
            e.at("url_id").get<std::string>(), e.at("url").get<std::string>(),
            e.at("issued_at").get<std::int64_t>(),
            e.at("ready_at").get<std::int64_t>()});
      } else if (type == "demand") {
        log.events.push_back(runtime::DemandEvent{
            e.at("url_id").get<std::string>(), e.at("url").get<std::string>(),
            e.at("method").get<std::string>(), e.at("at").get<std::int64_t>(),
            served_from_from_json(e.at("served_from")),
            e.at("waited_ms").get<std::int64_t>(),
            e.at("response_time_ms").get<std::int64_t>(),
            e.at("overhead_ms").get<std::int64_t>(),
            e.at("payload").get<std::string>()});
      } else if (type == "net_op") {
        log.events.push_back(runtime::NetOpEvent{
            e.at("method").get<std::string>(), e.at("url_id").get<std::string>(),
            e.at("url").get<std::string>(), e.at("at").get<std::int64_t>(),
            e.at("duration_ms").get<std::int64_t>()});
      } else if (type == "definition_update") {
        log.events.push_back(runtime::DefinitionUpdateEvent{
            e.at("url_id").get<std::string>(), e.at("m").get<int>(),
            e.at("value").get<std::string>(), e.at("at").get<std::int64_t>(),
            e.at("cost_ms").get<std::int64_t>()});
      } else if (type == "trigger_eval") {
        log.events.push_back(runtime::TriggerEvalEvent{
            e.at("callback").get<std::string>(), e.at("at").get<std::int64_t>(),
            e.at("considered").get<Strings>(), e.at("issued").get<Strings>(),
            e.at("skipped_known_cached").get<Strings>(),
            e.at("skipped_unknown").get<Strings>(),
            e.at("skipped_threshold").get<Strings>(),
            e.at("cost_ms").get<std::int64_t>()});
      } else {
        throw FormatError("malformed run log: unknown event type '" + type +
                          "'");
      }
    }
    return log;
  });
}

json to_json(const metrics::Oracle& oracle) {
  json out = json::array();
  for (const auto& e : oracle) {
    out.push_back({{"callback", e.callback}, {"prefetchable", e.prefetchable}});
  }
  return out;
}

metrics::Oracle oracle_from_json(const json& j) {
  return guarded("oracle", [&] {
    require_array(j, "oracle");
    metrics::Oracle oracle;
    for (const auto& e : j) {
      oracle.push_back({e.at("callback").get<std::string>(),
                        e.at("prefetchable").get<std::vector<std::string>>()});
    }
    return oracle;
  });
}

json to_json(const metrics::Accuracy& acc) {
  return {{"attempted", acc.attempted},
          {"prefetchable", acc.prefetchable},
          {"correct", acc.correct},
          {"precision", acc.precision()},
          {"recall", acc.recall()}};
}

json to_json(const metrics::Metrics& m) {
  json requests = json::array();
  for (const auto& r : m.requests) {
    requests.push_back({{"url_id", r.url_id},
                        {"url", r.url},
                        {"original_ms", r.original_ms},
                        {"optimized_ms", r.optimized_ms},
                        {"served_from", served_from_json(r.served_from)},
                        {"reduction_pct", r.reduction_pct}});
  }
  return {{"requests", requests},
          {"hits", m.hits},
          {"hit_rate", m.hit_rate},
          {"mean_reduction_pct", m.mean_reduction_pct},
          {"hit_reduction_pct",
           m.hit_reduction_pct ? json(*m.hit_reduction_pct) : json(nullptr)},
          {"overhead_ms", m.overhead_ms},
          {"original_total_ms", m.original_total_ms},
          {"optimized_total_ms", m.optimized_total_ms}};
}

json to_json(const metrics::Summary& s) {
  return {{"runs", s.runs},
          {"runtime_requests", stats_json(s.runtime_requests)},
          {"hit_rate_pct", stats_json(s.hit_rate_pct)},
          {"latency_reduction_pct", stats_json(s.latency_reduction_pct)}};
}

json to_json(const mbm::BenchReport& report) {
  json cases = json::array();
  for (const auto& r : report.cases) {
    cases.push_back(
        {{"case", r.id},
         {"config", r.description},
         {"sd_ms", r.has_send_definition ? json(r.sd_ms) : json(nullptr)},
         {"tp_ms", r.tp_ms},
         {"ffp_ms", r.ffp_ms},
         {"orig_ms", r.orig_ms},
         {"opt_ms", r.opt_ms},
         {"reduction_pct", r.reduction_pct},
         {"expected", mbm::to_string(r.expected)},
         {"observed", mbm::to_string(r.observed)},
         {"served_from", served_from_json(r.served_from)},
         {"waited_ms", r.waited_ms},
         {"accuracy", to_json(r.accuracy)}});
  }
  return {{"latency_ms", report.latency_ms},
          {"think_ms", report.think_ms},
          {"cases", cases},
          {"accuracy", to_json(report.accuracy)}};
}

}  // namespace thinkahead::io
