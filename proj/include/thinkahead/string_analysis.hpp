// SPDX-License-Identifier: Apache-2.0
//
// URL Map construction. Parts whose value is fixed at analysis time become
// concrete strings; every other part records the full, conservative set of
// statements that may define it (its Definition Spots), to be resolved by the
// runtime proxy as values arrive.

#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "thinkahead/app_ir.hpp"

namespace thinkahead::analysis {

class AnalysisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DefinitionSpot {
  std::string container;   // callback or helper method name
  int stmt_index = 0;      // index into the container body
  int part = 0;            // m: 1-based position in the URL's part list
  int ordinal = 0;         // n: 1-based, program order

  bool operator==(const DefinitionSpot&) const = default;
};

struct UrlPartState {
  std::optional<std::string> concrete;
  std::vector<DefinitionSpot> spots;  // non-empty iff !concrete

  bool is_concrete() const { return concrete.has_value(); }
  bool operator==(const UrlPartState&) const = default;
};

using UrlMap = std::map<std::string, std::vector<UrlPartState>>;

// Some(value) iff every definition of `var` is static and they all resolve to
// the same string. Throws AnalysisError if `var` is never defined or a
// referenced resource/setting key is missing.
std::optional<std::string> static_value_of(const ir::App& app,
                                           const std::string& var);

UrlMap analyze_urls(const ir::App& app);

}  // namespace thinkahead::analysis
