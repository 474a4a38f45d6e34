// SPDX-License-Identifier: Apache-2.0

#include "thinkahead/ecg.hpp"

#include <algorithm>
#include <set>

namespace thinkahead::ir {

std::vector<std::string> Ecg::successors(const std::string& node) const {
  std::vector<std::string> out;
  for (const auto& e : edges) {
    if (e.from == node &&
        std::find(out.begin(), out.end(), e.to) == out.end()) {
      out.push_back(e.to);
    }
  }
  return out;
}

bool Ecg::reaches(const std::string& from, const std::string& to) const {
  std::set<std::string> seen{from};
  std::vector<std::string> work{from};
  while (!work.empty()) {
    std::string cur = std::move(work.back());
    work.pop_back();
    if (cur == to) return true;
    for (auto& next : successors(cur)) {
      if (seen.insert(next).second) work.push_back(std::move(next));
    }
  }
  return false;
}

Ecg build_ecg(const App& app) {
  Ecg ecg;
  for (const auto* proc : app.procedures_in_program_order()) {
    ecg.nodes.push_back(proc->name);
    for (const auto& stmt : proc->body) {
      EcgEdge edge{proc->name, {}, EdgeKind::kDirect};
      if (const auto* c = std::get_if<Call>(&stmt.node)) {
        edge.to = c->method;
      } else if (const auto* a = std::get_if<AsyncCall>(&stmt.node)) {
        edge.to = a->method;
        edge.kind = EdgeKind::kFramework;
      } else {
        continue;
      }
      if (std::find(ecg.edges.begin(), ecg.edges.end(), edge) ==
          ecg.edges.end()) {
        ecg.edges.push_back(std::move(edge));
      }
    }
  }
  return ecg;
}

}  // namespace thinkahead::ir
