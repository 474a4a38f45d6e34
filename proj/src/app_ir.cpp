// SPDX-License-Identifier: Apache-2.0

#include "thinkahead/app_ir.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>
#include <utility>

namespace thinkahead::ir {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

std::string join_diagnostics(const std::vector<Diagnostic>& diags) {
  std::ostringstream out;
  for (std::size_t i = 0; i < diags.size(); ++i) {
    if (i) out << "\n";
    if (diags[i].line > 0) out << "line " << diags[i].line << ": ";
    out << diags[i].message;
  }
  return out.str();
}

}  // namespace

bool is_pseudo(const Stmt& stmt) {
  return std::holds_alternative<SendDefinition>(stmt.node) ||
         std::holds_alternative<TriggerPrefetch>(stmt.node) ||
         std::holds_alternative<FetchFromProxy>(stmt.node);
}

std::optional<std::string> defined_var(const Stmt& stmt) {
  if (const auto* s = std::get_if<DefineStatic>(&stmt.node)) return s->var;
  if (const auto* d = std::get_if<DefineDynamic>(&stmt.node)) return d->var;
  return std::nullopt;
}

bool Ccfg::is_wait(const std::string& node) const {
  return std::find(wait_nodes.begin(), wait_nodes.end(), node) !=
         wait_nodes.end();
}

std::vector<std::string> Ccfg::successors(const std::string& node) const {
  std::vector<std::string> out;
  for (const auto& e : edges) {
    if (e.from == node &&
        std::find(out.begin(), out.end(), e.to) == out.end()) {
      out.push_back(e.to);
    }
  }
  return out;
}

std::vector<std::string> Ccfg::predecessors(const std::string& node) const {
  std::vector<std::string> out;
  for (const auto& e : edges) {
    if (e.to == node &&
        std::find(out.begin(), out.end(), e.from) == out.end()) {
      out.push_back(e.from);
    }
  }
  return out;
}

bool Ccfg::has_edge(const std::string& from, const std::string& to) const {
  return std::any_of(edges.begin(), edges.end(), [&](const CcfgEdge& e) {
    return e.from == from && e.to == to;
  });
}

const Procedure* App::find_callback(const std::string& name) const {
  for (const auto& cb : callbacks) {
    if (cb.name == name) return &cb;
  }
  return nullptr;
}

const Procedure* App::find_method(const std::string& name) const {
  for (const auto& m : methods) {
    if (m.name == name) return &m;
  }
  return nullptr;
}

const Procedure* App::find_procedure(const std::string& name) const {
  if (const auto* cb = find_callback(name)) return cb;
  return find_method(name);
}

Procedure* App::find_procedure(const std::string& name) {
  return const_cast<Procedure*>(std::as_const(*this).find_procedure(name));
}

const NetMethodDecl* App::find_netmethod(const std::string& name) const {
  for (const auto& nm : netlib) {
    if (nm.name == name) return &nm;
  }
  return nullptr;
}

std::vector<const Procedure*> App::procedures_in_program_order() const {
  std::vector<const Procedure*> out;
  out.reserve(callbacks.size() + methods.size());
  for (const auto& cb : callbacks) out.push_back(&cb);
  for (const auto& m : methods) out.push_back(&m);
  return out;
}

const Procedure* App::entry_callback() const {
  return callbacks.empty() ? nullptr : &callbacks.front();
}

std::optional<std::pair<const Procedure*, std::size_t>> App::find_url_spot(
    const std::string& url_id) const {
  for (const auto* proc : procedures_in_program_order()) {
    for (std::size_t i = 0; i < proc->body.size(); ++i) {
      const auto* b = std::get_if<BuildUrl>(&proc->body[i].node);
      if (b && b->url_id == url_id) return std::make_pair(proc, i);
    }
  }
  return std::nullopt;
}

std::vector<std::string> App::url_ids() const {
  std::vector<std::string> out;
  for (const auto* proc : procedures_in_program_order()) {
    for (const auto& stmt : proc->body) {
      if (const auto* b = std::get_if<BuildUrl>(&stmt.node)) {
        out.push_back(b->url_id);
      }
    }
  }
  return out;
}

ParseError::ParseError(std::vector<Diagnostic> diagnostics)
    : std::runtime_error(join_diagnostics(diagnostics)),
      diagnostics_(std::move(diagnostics)) {}

std::vector<Diagnostic> validate(const App& app) {
  std::vector<Diagnostic> diags;
  auto report = [&](int line, std::string msg) {
    diags.push_back({line, std::move(msg)});
  };

  // Name uniqueness across callbacks, methods and wait nodes.
  std::set<std::string> names;
  for (const auto* proc : app.procedures_in_program_order()) {
    if (!names.insert(proc->name).second) {
      report(proc->line, "duplicate name '" + proc->name + "'");
    }
  }
  for (const auto& w : app.ccfg.wait_nodes) {
    if (!names.insert(w).second) {
      report(0, "duplicate name '" + w + "' (wait node)");
    }
  }
  std::set<std::string> netnames;
  for (const auto& nm : app.netlib) {
    if (!netnames.insert(nm.name).second) {
      report(0, "duplicate netmethod '" + nm.name + "'");
    }
    if (nm.latency_ms && *nm.latency_ms < 0) {
      report(0, "netmethod '" + nm.name + "' has negative latency");
    }
  }

  // Program-wide facts used by the per-statement checks.
  std::map<std::string, int> url_spot_count;
  std::set<std::string> defined_vars;
  for (const auto* proc : app.procedures_in_program_order()) {
    for (const auto& stmt : proc->body) {
      if (const auto* b = std::get_if<BuildUrl>(&stmt.node)) {
        if (++url_spot_count[b->url_id] == 2) {
          report(stmt.line, "duplicate url '" + b->url_id + "'");
        }
      }
      if (auto var = defined_var(stmt)) defined_vars.insert(*var);
    }
  }
  auto url_known = [&](const std::string& id) {
    return url_spot_count.count(id) > 0;
  };

  for (const auto& [id, value] : app.hint_urls) {
    if (url_known(id)) {
      report(0, "hint url '" + id + "' collides with an app url");
    }
  }
  if (!app.instrumented && (!app.hint_urls.empty() ||
                            !app.rewrite_rules.empty())) {
    report(0, "hint data is only allowed in instrumented apps");
  }

  for (const auto* proc : app.procedures_in_program_order()) {
    for (const auto& stmt : proc->body) {
      const int line = stmt.line;
      std::visit(
          Overloaded{
              [&](const DefineStatic&) {},
              [&](const DefineDynamic&) {},
              [&](const BuildUrl& b) {
                if (b.parts.empty()) {
                  report(line, "url '" + b.url_id + "' has no parts");
                }
                for (const auto& part : b.parts) {
                  if (part.kind == UrlPart::Kind::kVar &&
                      !defined_vars.count(part.text)) {
                    report(line, "unresolved variable '" + part.text + "'");
                  }
                }
              },
              [&](const NetCall& n) {
                if (!app.find_netmethod(n.method)) {
                  report(line, "unresolved netmethod '" + n.method + "'");
                }
                if (!url_known(n.url_id)) {
                  report(line, "unresolved url '" + n.url_id + "'");
                }
              },
              [&](const Call& c) {
                if (!app.find_method(c.method)) {
                  report(line, "unresolved method '" + c.method + "'");
                }
              },
              [&](const AsyncCall& c) {
                if (!app.find_method(c.method)) {
                  report(line, "unresolved method '" + c.method + "'");
                }
              },
              [&](const Transition& t) {
                if (!app.find_callback(t.callback)) {
                  report(line, "unresolved callback '" + t.callback + "'");
                }
              },
              [&](const SendDefinition& s) {
                if (!defined_vars.count(s.var)) {
                  report(line, "unresolved variable '" + s.var + "'");
                }
                auto spot = app.find_url_spot(s.url_id);
                if (!spot) {
                  report(line, "unresolved url '" + s.url_id + "'");
                } else {
                  const auto& parts =
                      std::get<BuildUrl>(spot->first->body[spot->second].node)
                          .parts;
                  if (s.part < 1 ||
                      s.part > static_cast<int>(parts.size())) {
                    report(line, "url '" + s.url_id + "' has no part " +
                                     std::to_string(s.part));
                  }
                }
              },
              [&](const TriggerPrefetch& t) {
                for (const auto& id : t.url_ids) {
                  if (!url_known(id) && !app.hint_urls.count(id)) {
                    report(line, "unresolved url '" + id + "'");
                  }
                }
              },
              [&](const FetchFromProxy& f) {
                if (!app.find_netmethod(f.method)) {
                  report(line, "unresolved netmethod '" + f.method + "'");
                }
                if (!url_known(f.url_id)) {
                  report(line, "unresolved url '" + f.url_id + "'");
                }
              },
          },
          stmt.node);
      if (is_pseudo(stmt) && !app.instrumented) {
        report(line, "instrumentation statement in uninstrumented app");
      }
    }
  }

  for (const auto& rule : app.rewrite_rules) {
    auto spot = app.find_url_spot(rule.url_id);
    if (!spot) {
      report(0, "rewrite rule names unresolved url '" + rule.url_id + "'");
    } else if (rule.part < 1 ||
               rule.part > static_cast<int>(
                               std::get<BuildUrl>(
                                   spot->first->body[spot->second].node)
                                   .parts.size())) {
      report(0, "rewrite rule names missing part " +
                    std::to_string(rule.part) + " of '" + rule.url_id + "'");
    }
  }

  // CCFG: endpoints exist, wait nodes have in- and out-edges.
  for (const auto& e : app.ccfg.edges) {
    for (const auto* end : {&e.from, &e.to}) {
      if (!app.find_callback(*end) && !app.ccfg.is_wait(*end)) {
        report(e.line, "unresolved ccfg node '" + *end + "'");
      }
    }
  }
  for (const auto& w : app.ccfg.wait_nodes) {
    if (app.ccfg.predecessors(w).empty() || app.ccfg.successors(w).empty()) {
      report(0, "wait node '" + w + "' needs an incoming and an outgoing edge");
    }
  }

  // Call/goto chains must terminate.
  std::map<std::string, int> color;  // 0 white, 1 grey, 2 black
  std::function<bool(const Procedure&)> has_cycle = [&](const Procedure& p) {
    color[p.name] = 1;
    for (const auto& stmt : p.body) {
      std::string target;
      if (const auto* c = std::get_if<Call>(&stmt.node)) target = c->method;
      if (const auto* c = std::get_if<AsyncCall>(&stmt.node)) {
        target = c->method;
      }
      if (const auto* t = std::get_if<Transition>(&stmt.node)) {
        target = t->callback;
      }
      if (target.empty()) continue;
      const auto* next = app.find_procedure(target);
      if (!next) continue;
      if (color[target] == 1) return true;
      if (color[target] == 0 && has_cycle(*next)) return true;
    }
    color[p.name] = 2;
    return false;
  };
  for (const auto* proc : app.procedures_in_program_order()) {
    if (color[proc->name] == 0 && has_cycle(*proc)) {
      report(proc->line, "recursive call or goto chain through '" +
                             proc->name + "'");
      break;
    }
  }

  return diags;
}

void validate_or_throw(const App& app) {
  auto diags = validate(app);
  if (!diags.empty()) throw ParseError(std::move(diags));
}

}  // namespace thinkahead::ir
