// SPDX-License-Identifier: Apache-2.0
//
// Deterministic virtual-time execution of an app over a user trace, with the
// local prefetching proxy serving instrumented fetches.
//
// Time only advances for think time, network operations and configured
// instrumentation costs; every other statement is free. Prefetches run in the
// background and never advance the app's clock.

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "thinkahead/app_ir.hpp"
#include "thinkahead/string_analysis.hpp"

namespace thinkahead::runtime {

class RunError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TraceStep {
  std::string event;  // callback to trigger
  std::int64_t think_ms = 0;
  std::map<std::string, std::string> inputs;  // input tag -> value

  bool operator==(const TraceStep&) const = default;
};

using Trace = std::vector<TraceStep>;

// Per-call cost of the three proxy APIs. Zero unless configured.
struct InstrumentationCosts {
  std::int64_t send_definition_ms = 0;
  std::int64_t trigger_prefetch_ms = 0;
  std::int64_t fetch_from_proxy_ms = 0;
};

inline constexpr int kDefaultPrefetchThreshold = 5;

struct NetModel {
  std::int64_t default_latency_ms = 0;
  std::map<std::string, std::int64_t> per_method;
  std::map<std::string, std::string> server;  // concrete URL -> payload
  int threshold = kDefaultPrefetchThreshold;
  InstrumentationCosts costs;

  // Override, else the app's declared latency, else the default.
  std::int64_t latency_for(const ir::App& app, const std::string& method) const;

  // URLs missing from the server table get a synthesized, URL-derived body.
  std::string payload_for(const std::string& url) const;
};

enum class ServedFrom { kCache, kWaited, kOrigin };

const char* to_string(ServedFrom s);

struct PrefetchEvent {
  std::string url_id;
  std::string url;
  std::int64_t issued_at = 0;
  std::int64_t ready_at = 0;
  bool operator==(const PrefetchEvent&) const = default;
};

// An on-demand request at a Fetch Spot.
struct DemandEvent {
  std::string url_id;
  std::string url;
  std::string method;
  std::int64_t at = 0;
  ServedFrom served_from = ServedFrom::kOrigin;
  std::int64_t waited_ms = 0;         // > 0 iff served_from == kWaited
  std::int64_t response_time_ms = 0;
  std::int64_t overhead_ms = 0;       // fetch_from_proxy cost
  std::string payload;
  bool operator==(const DemandEvent&) const = default;
};

// A blocking network call that is not a Fetch Spot.
struct NetOpEvent {
  std::string method;
  std::string url_id;
  std::string url;
  std::int64_t at = 0;
  std::int64_t duration_ms = 0;
  bool operator==(const NetOpEvent&) const = default;
};

struct DefinitionUpdateEvent {
  std::string url_id;
  int part = 0;
  std::string value;  // after rewrite rules
  std::int64_t at = 0;
  std::int64_t cost_ms = 0;
  bool operator==(const DefinitionUpdateEvent&) const = default;
};

struct TriggerEvalEvent {
  std::string callback;
  std::int64_t at = 0;
  std::vector<std::string> considered;
  std::vector<std::string> issued;
  std::vector<std::string> skipped_known_cached;
  std::vector<std::string> skipped_unknown;
  std::vector<std::string> skipped_threshold;
  std::int64_t cost_ms = 0;
  bool operator==(const TriggerEvalEvent&) const = default;
};

using RunEvent = std::variant<PrefetchEvent, DemandEvent, NetOpEvent,
                              DefinitionUpdateEvent, TriggerEvalEvent>;

struct RunLog {
  bool instrumented = false;
  std::int64_t end_ms = 0;
  std::vector<RunEvent> events;

  std::vector<DemandEvent> demands() const;
  std::vector<PrefetchEvent> prefetches() const;
  std::vector<TriggerEvalEvent> trigger_evals() const;

  bool operator==(const RunLog&) const = default;
};

// The local proxy: runtime URL Map plus a cache keyed by the exact URL string.
// An entry whose ready time lies in the future is Waiting (the wait flag);
// it becomes Ready once the clock reaches that time.
class Proxy {
 public:
  struct Entry {
    std::string payload;
    std::int64_t ready_at = 0;
  };

  struct FetchOutcome {
    std::string payload;
    ServedFrom served_from = ServedFrom::kOrigin;
    std::int64_t response_time_ms = 0;
  };

  Proxy(const analysis::UrlMap& seed,
        const std::map<std::string, std::string>& hint_urls,
        std::vector<ir::RewriteRule> rewrite_rules, int threshold);

  // Stores the value of part `part` of `url_id` after rewriting; last write
  // wins. Returns the stored value.
  std::string on_send_definition(const std::string& url_id, int part,
                                 const std::string& value);

  // Issues a background fetch for every listed URL that is fully known and
  // not cached (Waiting counts as cached), up to the threshold.
  // `latency_of(url_id)` gives the origin latency for a prefetch.
  TriggerEvalEvent on_trigger_prefetch(
      const std::string& callback, const std::vector<std::string>& url_ids,
      std::int64_t now,
      const std::function<std::int64_t(const std::string&)>& latency_of,
      const NetModel& net, std::vector<PrefetchEvent>* issued_out);

  FetchOutcome on_fetch_from_proxy(const std::string& concrete_url,
                                   std::int64_t now,
                                   std::int64_t origin_latency_ms,
                                   const NetModel& net);

  // Concatenated URL when every part is known.
  std::optional<std::string> known_url(const std::string& url_id) const;

  const std::map<std::string, Entry>& cache() const { return cache_; }
  const std::map<std::string, std::vector<std::optional<std::string>>>&
  url_map() const {
    return url_map_;
  }
  int threshold() const { return threshold_; }

 private:
  std::map<std::string, std::vector<std::optional<std::string>>> url_map_;
  std::map<std::string, Entry> cache_;
  std::vector<ir::RewriteRule> rewrite_rules_;
  int threshold_;
};

// Variable binding with the statement that produced it.
struct Binding {
  std::string value;
  std::string container;
  int stmt_index = 0;
};

// Interpreter state visible to hosts and observers.
struct ExecState {
  const ir::App* app = nullptr;
  std::map<std::string, Binding> vars;
  std::map<std::string, std::string> urls;  // url id -> last built value
  std::int64_t now = 0;
  std::size_t step = 0;
  std::string current;  // CCFG node of the most recently entered callback
  const TraceStep* trace_step = nullptr;

  const std::string& url_value(const std::string& url_id) const;
};

// Receives the statements whose meaning depends on the execution context.
class Host {
 public:
  virtual ~Host() = default;
  virtual void net_call(ExecState& state, const ir::NetCall& call) = 0;
  virtual void send_definition(ExecState& state,
                               const ir::SendDefinition& sd) = 0;
  virtual void trigger_prefetch(ExecState& state, const std::string& callback,
                                const ir::TriggerPrefetch& tp) = 0;
  virtual void fetch_from_proxy(ExecState& state,
                                const ir::FetchFromProxy& fetch) = 0;
};

// Walks the trace: validates each step against the CCFG, advances the clock
// by think time, and executes callback bodies, delegating network and
// instrumentation statements to `host`. Returns the final clock.
std::int64_t execute_trace(const ir::App& app, const Trace& trace,
                           Host& host);

// Text used for a variable read before any definition executed.
inline constexpr const char* kUnsetValue = "null";

struct RunOptions {
  // For uninstrumented apps: only NetCalls of this method are Fetch Spots.
  // When absent every NetCall is treated as one.
  std::optional<std::string> signature;
  // Extra developer-hint data, merged with whatever the app carries.
  std::map<std::string, std::string> hint_urls;
  std::vector<ir::RewriteRule> rewrite_rules;
  // Called just before each on-demand request is served.
  std::function<void(const ExecState&, const std::string& url_id)> on_demand;
};

RunLog run_trace(const ir::App& app, const Trace& trace, const NetModel& net,
                 const analysis::UrlMap& seed, const RunOptions& options = {});

}  // namespace thinkahead::runtime
