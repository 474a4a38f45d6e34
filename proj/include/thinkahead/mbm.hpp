// SPDX-License-Identifier: Apache-2.0
//
// Micro-benchmark: 25 generated apps covering every placement of up to two
// dynamic URL values with up to two Definition Spots each, relative to the
// Trigger Callback (Before) or the Fetch Spot's callback (After).

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "thinkahead/app_ir.hpp"
#include "thinkahead/metrics.hpp"
#include "thinkahead/runtime.hpp"

namespace thinkahead::mbm {

enum class Placement { kBefore, kAfter };

enum class Prefetchability { kHit, kNonHit, kNonPrefetchable };

const char* to_string(Prefetchability p);  // "H", "NH", "NP"

inline constexpr int kCaseCount = 25;

// values[i][j]: placement of Definition Spot j+1 of dynamic value i+1, in
// program order.
struct CaseConfig {
  std::vector<std::vector<Placement>> values;

  int k() const { return static_cast<int>(values.size()); }
  std::vector<int> d() const;
  std::string describe() const;  // e.g. "k=2 d=[1,2] B;BA"
  bool operator==(const CaseConfig&) const = default;
};

CaseConfig case_config(int case_id);  // throws std::out_of_range

// Prefetchable iff every value has a Before spot; a Hit iff additionally no
// spot is After (a later After spot would overwrite the prefetched value).
Prefetchability classify(const CaseConfig& config);

struct GeneratedCase {
  int id = 0;
  CaseConfig config;
  ir::App app;
  runtime::Trace trace;
  runtime::NetModel net;
  std::string url_id = "u";
};

GeneratedCase generate_case(int case_id, std::int64_t latency_ms,
                            std::int64_t think_ms,
                            const runtime::InstrumentationCosts& costs = {});

struct CaseResult {
  int id = 0;
  std::string description;
  bool has_send_definition = false;
  std::int64_t sd_ms = 0;
  std::int64_t tp_ms = 0;
  std::int64_t ffp_ms = 0;
  std::int64_t orig_ms = 0;
  std::int64_t opt_ms = 0;  // sd + tp + ffp
  double reduction_pct = 0.0;
  Prefetchability expected = Prefetchability::kHit;
  Prefetchability observed = Prefetchability::kHit;
  runtime::ServedFrom served_from = runtime::ServedFrom::kOrigin;
  std::int64_t waited_ms = 0;
  metrics::Accuracy accuracy;
};

struct BenchReport {
  std::int64_t latency_ms = 0;
  std::int64_t think_ms = 0;
  std::vector<CaseResult> cases;
  metrics::Accuracy accuracy;  // micro-aggregated over all cases
};

// Runs every case through the full pipeline: URL analysis, profiling,
// trigger identification, instrumentation, baseline and optimized runs.
BenchReport run_benchmark(std::int64_t latency_ms, std::int64_t think_ms,
                          const runtime::InstrumentationCosts& costs = {});

std::string to_tsv(const BenchReport& report);

}  // namespace thinkahead::mbm
