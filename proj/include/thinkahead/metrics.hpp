// SPDX-License-Identifier: Apache-2.0
//
// Accuracy (precision/recall of prefetch decisions against ground truth) and
// effectiveness (hit rate, per-request latency reduction, overhead).

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "thinkahead/app_ir.hpp"
#include "thinkahead/runtime.hpp"

namespace thinkahead::metrics {

class MetricsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Ground truth for one executed trigger point: the listed URLs whose full
// value was knowable there.
struct OracleEntry {
  std::string callback;
  std::vector<std::string> prefetchable;
  bool operator==(const OracleEntry&) const = default;
};

using Oracle = std::vector<OracleEntry>;

// Replays `app` (instrumented) over `trace` without a proxy. A URL is
// knowable at a trigger point when each of its parts is a literal or resource,
// a variable already assigned in this session, or a variable whose every
// definition is the same static value. Hint URLs are always knowable.
Oracle replay_oracle(const ir::App& app, const runtime::Trace& trace,
                     const std::map<std::string, std::string>& extra_hint_urls =
                         {});

// Micro-averaged counts; aggregate several runs with +=.
struct Accuracy {
  std::size_t attempted = 0;     // URLs the proxy judged known
  std::size_t prefetchable = 0;  // URLs the oracle judged knowable
  std::size_t correct = 0;       // in both

  double precision() const;  // 1.0 when nothing was attempted
  double recall() const;     // 1.0 when nothing was prefetchable
  Accuracy& operator+=(const Accuracy& other);
};

// A URL counts as attempted when the proxy found it known, whether it then
// issued a fetch or found it already cached. Throws MetricsError when the
// oracle does not line up with the log's trigger evaluations.
Accuracy compute_accuracy(const runtime::RunLog& log, const Oracle& oracle);

struct RequestOutcome {
  std::string url_id;
  std::string url;
  std::int64_t original_ms = 0;
  std::int64_t optimized_ms = 0;
  runtime::ServedFrom served_from = runtime::ServedFrom::kOrigin;
  double reduction_pct = 0.0;
};

struct Metrics {
  std::vector<RequestOutcome> requests;
  std::size_t hits = 0;  // served from cache, or after waiting on a prefetch
  double hit_rate = 0.0;
  double mean_reduction_pct = 0.0;
  std::optional<double> hit_reduction_pct;  // mean over hits
  std::int64_t overhead_ms = 0;
  std::int64_t original_total_ms = 0;
  std::int64_t optimized_total_ms = 0;
};

// Pairs the demands of a baseline and an optimized run of the same trace.
// Throws MetricsError if they did not request the same URLs in order.
Metrics compute_effectiveness(const runtime::RunLog& base,
                              const runtime::RunLog& opt);

struct SummaryStats {
  double min = 0, max = 0, avg = 0, stddev = 0;  // sample std dev
};

// Table-2-style summary across app/trace pairs.
struct Summary {
  std::size_t runs = 0;
  SummaryStats runtime_requests;
  SummaryStats hit_rate_pct;
  SummaryStats latency_reduction_pct;  // over runs with at least one hit
};

SummaryStats describe(const std::vector<double>& values);
Summary summarize(const std::vector<Metrics>& runs);
std::string format_summary(const Summary& summary);

}  // namespace thinkahead::metrics
