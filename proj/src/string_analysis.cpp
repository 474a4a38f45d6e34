// SPDX-License-Identifier: Apache-2.0

#include "thinkahead/string_analysis.hpp"

#include <set>

namespace thinkahead::analysis {

namespace {

std::string lookup(const std::map<std::string, std::string>& table,
                   const std::string& key, const char* what) {
  auto it = table.find(key);
  if (it == table.end()) {
    throw AnalysisError(std::string("missing ") + what + " key '" + key + "'");
  }
  return it->second;
}

std::string resolve_static(const ir::App& app, const ir::StaticSource& src) {
  switch (src.kind) {
    case ir::StaticSourceKind::kLiteral: return src.text;
    case ir::StaticSourceKind::kResource:
      return lookup(app.resources, src.text, "resource");
    case ir::StaticSourceKind::kSetting:
      return lookup(app.settings, src.text, "setting");
  }
  return {};
}

struct Definition {
  const ir::Procedure* container;
  std::size_t index;
  const ir::Stmt* stmt;
};

// Every assignment to `var`, in program order.
std::vector<Definition> definitions_of(const ir::App& app,
                                       const std::string& var) {
  std::vector<Definition> defs;
  for (const auto* proc : app.procedures_in_program_order()) {
    for (std::size_t i = 0; i < proc->body.size(); ++i) {
      if (ir::defined_var(proc->body[i]) == var) {
        defs.push_back({proc, i, &proc->body[i]});
      }
    }
  }
  return defs;
}

}  // namespace

std::optional<std::string> static_value_of(const ir::App& app,
                                           const std::string& var) {
  auto defs = definitions_of(app, var);
  if (defs.empty()) {
    throw AnalysisError("undefined variable '" + var + "'");
  }
  std::set<std::string> values;
  bool all_static = true;
  for (const auto& d : defs) {
    // Resolve every static definition so missing keys surface as errors even
    // when a dynamic definition already decides the answer.
    if (const auto* s = std::get_if<ir::DefineStatic>(&d.stmt->node)) {
      values.insert(resolve_static(app, s->source));
    } else {
      all_static = false;
    }
  }
  if (!all_static || values.size() != 1) return std::nullopt;
  return *values.begin();
}

UrlMap analyze_urls(const ir::App& app) {
  UrlMap map;
  for (const auto* proc : app.procedures_in_program_order()) {
    for (const auto& stmt : proc->body) {
      const auto* build = std::get_if<ir::BuildUrl>(&stmt.node);
      if (!build) continue;
      std::vector<UrlPartState> parts;
      for (std::size_t m = 0; m < build->parts.size(); ++m) {
        const auto& part = build->parts[m];
        UrlPartState state;
        switch (part.kind) {
          case ir::UrlPart::Kind::kLiteral:
            state.concrete = part.text;
            break;
          case ir::UrlPart::Kind::kResource:
            state.concrete = lookup(app.resources, part.text, "resource");
            break;
          case ir::UrlPart::Kind::kVar:
            state.concrete = static_value_of(app, part.text);
            if (!state.concrete) {
              int ordinal = 0;
              for (const auto& d : definitions_of(app, part.text)) {
                state.spots.push_back({d.container->name,
                                       static_cast<int>(d.index),
                                       static_cast<int>(m + 1), ++ordinal});
              }
            }
            break;
        }
        parts.push_back(std::move(state));
      }
      map.emplace(build->url_id, std::move(parts));
    }
  }
  return map;
}

}  // namespace thinkahead::analysis
