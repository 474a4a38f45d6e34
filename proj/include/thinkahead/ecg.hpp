// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "thinkahead/app_ir.hpp"

namespace thinkahead::ir {

enum class EdgeKind { kDirect, kFramework };

struct EcgEdge {
  std::string from;
  std::string to;
  EdgeKind kind = EdgeKind::kDirect;
  bool operator==(const EcgEdge&) const = default;
};

// Call graph over callbacks and helper methods, extended with the
// framework-initiated edges that AsyncCall models.
struct Ecg {
  std::vector<std::string> nodes;  // program order
  std::vector<EcgEdge> edges;      // first-occurrence order, deduplicated

  std::vector<std::string> successors(const std::string& node) const;

  // True when `to` is reachable from `from` (a node reaches itself).
  bool reaches(const std::string& from, const std::string& to) const;

  bool operator==(const Ecg&) const = default;
};

Ecg build_ecg(const App& app);

}  // namespace thinkahead::ir
