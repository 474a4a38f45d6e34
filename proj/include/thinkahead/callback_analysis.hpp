// SPDX-License-Identifier: Apache-2.0
//
// Decides *when* to prefetch: finds the Fetch Spots for the app's fetch
// signature, the callbacks that reach them, and the callbacks one wait node
// ahead of those in the CCFG (Trigger Callbacks).

#pragma once

#include <map>
#include <string>
#include <vector>

#include "thinkahead/app_ir.hpp"
#include "thinkahead/ecg.hpp"
#include "thinkahead/runtime.hpp"

namespace thinkahead::analysis {

struct FetchSignature {
  std::string method;
  bool operator==(const FetchSignature&) const = default;
};

// Trigger Callback -> URL ids to prefetch at its end, in Fetch Spot order.
struct TriggerMap {
  std::map<std::string, std::vector<std::string>> entries;
  bool operator==(const TriggerMap&) const = default;
};

// Runs the uninstrumented app over `trace` and returns the network method
// with the largest cumulative time; ties go to the lexicographically smaller
// name. Throws AnalysisError("nothing to profile") if no call executes.
FetchSignature profile_fetch_signature(const ir::App& app,
                                       const runtime::Trace& trace,
                                       const runtime::NetModel& net);

// Trace-free fallback: weighs every NetCall statement once at its declared
// (or default) latency, as if one run visited each call site exactly once.
FetchSignature profile_fetch_signature_static(const ir::App& app,
                                              const runtime::NetModel& net);

TriggerMap identify_trigger_callbacks(const ir::App& app, const ir::Ccfg& ccfg,
                                      const ir::Ecg& ecg,
                                      const FetchSignature& signature);

}  // namespace thinkahead::analysis
