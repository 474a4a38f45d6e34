// SPDX-License-Identifier: Apache-2.0
//
// Rewrites an app so it cooperates with the prefetching proxy:
//   - send_definition after every Definition Spot of a dynamic URL part,
//   - trigger_prefetch at the end of every Trigger Callback,
//   - fetch_from_proxy in place of every Fetch Spot.
// Developer hints are applied on top as data, without touching app source.

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "thinkahead/app_ir.hpp"
#include "thinkahead/callback_analysis.hpp"
#include "thinkahead/string_analysis.hpp"

namespace thinkahead::instrument {

class InstrumentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class InsertKind { kSendDefinition, kTriggerPrefetch, kFetchFromProxy };

struct Provenance {
  std::string container;
  int stmt_index = 0;  // index in the instrumented body
  InsertKind kind = InsertKind::kSendDefinition;
  std::string reason;
};

struct InstrumentedApp {
  ir::App app;
  std::vector<Provenance> provenance;
};

struct TriggerHint {
  std::string callback;
  std::vector<std::string> url_ids;
  bool at_launch = false;  // prefetch at the start of the callback
};

struct Hints {
  std::vector<TriggerHint> extra_triggers;
  std::vector<std::pair<std::string, std::string>> extra_static_urls;
  std::vector<ir::RewriteRule> rewrite_rules;

  bool empty() const {
    return extra_triggers.empty() && extra_static_urls.empty() &&
           rewrite_rules.empty();
  }
};

InstrumentedApp instrument(const ir::App& app, const analysis::UrlMap& url_map,
                           const analysis::TriggerMap& trigger_map,
                           const analysis::FetchSignature& signature);

// Hint static URLs and rewrite rules are stored on the app for the runtime.
// A launch trigger becomes the first statement of its callback; any other
// trigger hint joins the callback's final trigger_prefetch, or is appended.
InstrumentedApp apply_hints(InstrumentedApp ia, const Hints& hints);

}  // namespace thinkahead::instrument
