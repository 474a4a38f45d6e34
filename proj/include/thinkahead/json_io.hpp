// SPDX-License-Identifier: Apache-2.0
//
// JSON forms of every pipeline artifact. Intermediate files are meant to be
// read and hand-edited, so every reader reports what it was parsing.

#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "thinkahead/callback_analysis.hpp"
#include "thinkahead/instrumenter.hpp"
#include "thinkahead/mbm.hpp"
#include "thinkahead/metrics.hpp"
#include "thinkahead/runtime.hpp"
#include "thinkahead/string_analysis.hpp"

namespace thinkahead::io {

using nlohmann::json;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parses `text`; `what` names the artifact in error messages.
json parse_json(const std::string& text, const std::string& what);

// Pretty-printed with a trailing newline.
std::string dump(const json& j);

json to_json(const analysis::UrlMap& map);
analysis::UrlMap url_map_from_json(const json& j);

json to_json(const analysis::TriggerMap& map);
analysis::TriggerMap trigger_map_from_json(const json& j);

json to_json(const analysis::FetchSignature& sig);
analysis::FetchSignature signature_from_json(const json& j);

json to_json(const runtime::Trace& trace);
runtime::Trace trace_from_json(const json& j);

json to_json(const runtime::NetModel& net);
runtime::NetModel net_model_from_json(const json& j);

json to_json(const instrument::Hints& hints);
instrument::Hints hints_from_json(const json& j);

json to_json(const std::vector<instrument::Provenance>& provenance);

json to_json(const runtime::RunLog& log);
runtime::RunLog run_log_from_json(const json& j);

json to_json(const metrics::Oracle& oracle);
metrics::Oracle oracle_from_json(const json& j);

json to_json(const metrics::Accuracy& acc);
json to_json(const metrics::Metrics& m);
json to_json(const metrics::Summary& s);

json to_json(const mbm::BenchReport& report);

}  // namespace thinkahead::io
