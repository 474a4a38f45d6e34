// SPDX-License-Identifier: Apache-2.0

#include <algorithm>

#include "thinkahead/runtime.hpp"

namespace thinkahead::runtime {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

std::string resolve_static(const ir::App& app, const ir::StaticSource& src) {
  auto from = [&](const std::map<std::string, std::string>& table,
                  const char* what) {
    auto it = table.find(src.text);
    if (it == table.end()) {
      throw RunError(std::string("missing ") + what + " key '" + src.text +
                     "'");
    }
    return it->second;
  };
  switch (src.kind) {
    case ir::StaticSourceKind::kLiteral: return src.text;
    case ir::StaticSourceKind::kResource: return from(app.resources, "resource");
    case ir::StaticSourceKind::kSetting: return from(app.settings, "setting");
  }
  return {};
}

class Interpreter {
 public:
  Interpreter(const ir::App& app, Host& host) : app_(app), host_(host) {
    state_.app = &app;
  }

  std::int64_t run(const Trace& trace) {
    for (std::size_t k = 0; k < trace.size(); ++k) {
      const TraceStep& step = trace[k];
      check_step(k, step);
      if (step.think_ms < 0) {
        throw RunError("invalid trace step " + std::to_string(k) +
                       ": negative think time");
      }
      state_.now += step.think_ms;
      state_.step = k;
      state_.trace_step = &step;
      state_.current = step.event;
      exec(*app_.find_callback(step.event));
    }
    return state_.now;
  }

 private:
  void check_step(std::size_t k, const TraceStep& step) const {
    const std::string prefix = "invalid trace step " + std::to_string(k) + ": ";
    if (!app_.find_callback(step.event)) {
      throw RunError(prefix + "unknown callback '" + step.event + "'");
    }
    if (k == 0) {
      const auto* entry = app_.entry_callback();
      if (entry->name != step.event) {
        throw RunError(prefix + "first event must be the entry callback '" +
                       entry->name + "'");
      }
      return;
    }
    const auto& ccfg = app_.ccfg;
    for (const auto& w : ccfg.successors(state_.current)) {
      if (ccfg.is_wait(w) && ccfg.has_edge(w, step.event)) return;
    }
    throw RunError(prefix + "'" + step.event + "' is not reachable from '" +
                   state_.current + "' through a wait node");
  }

  void exec(const ir::Procedure& proc) {
    for (std::size_t i = 0; i < proc.body.size(); ++i) {
      const int index = static_cast<int>(i);
      std::visit(
          Overloaded{
              [&](const ir::DefineStatic& s) {
                state_.vars[s.var] = {resolve_static(app_, s.source),
                                      proc.name, index};
              },
              [&](const ir::DefineDynamic& d) {
                const auto& inputs = state_.trace_step->inputs;
                auto it = inputs.find(d.input_tag);
                if (it == inputs.end()) {
                  throw RunError("missing input '" + d.input_tag +
                                 "' at trace step " +
                                 std::to_string(state_.step));
                }
                state_.vars[d.var] = {it->second, proc.name, index};
              },
              [&](const ir::BuildUrl& b) {
                std::string url;
                for (const auto& part : b.parts) {
                  switch (part.kind) {
                    case ir::UrlPart::Kind::kLiteral: url += part.text; break;
                    case ir::UrlPart::Kind::kResource:
                      url += resolve_static(
                          app_, {ir::StaticSourceKind::kResource, part.text});
                      break;
                    case ir::UrlPart::Kind::kVar: {
                      auto it = state_.vars.find(part.text);
                      url += it == state_.vars.end() ? kUnsetValue
                                                     : it->second.value;
                      break;
                    }
                  }
                }
                state_.urls[b.url_id] = std::move(url);
              },
              [&](const ir::NetCall& n) { host_.net_call(state_, n); },
              [&](const ir::Call& c) { exec(*app_.find_method(c.method)); },
              [&](const ir::AsyncCall& c) {
                exec(*app_.find_method(c.method));
              },
              [&](const ir::Transition& t) {
                state_.current = t.callback;
                exec(*app_.find_callback(t.callback));
              },
              [&](const ir::SendDefinition& sd) {
                host_.send_definition(state_, sd);
              },
              [&](const ir::TriggerPrefetch& tp) {
                host_.trigger_prefetch(state_, proc.name, tp);
              },
              [&](const ir::FetchFromProxy& f) {
                host_.fetch_from_proxy(state_, f);
              },
          },
          proc.body[i].node);
    }
  }

  const ir::App& app_;
  Host& host_;
  ExecState state_;
};

}  // namespace

const std::string& ExecState::url_value(const std::string& url_id) const {
  auto it = urls.find(url_id);
  if (it == urls.end()) {
    throw RunError("url '" + url_id + "' used before its URL Spot ran");
  }
  return it->second;
}

std::int64_t execute_trace(const ir::App& app, const Trace& trace,
                           Host& host) {
  if (!trace.empty() && app.callbacks.empty()) {
    throw RunError("invalid trace step 0: app has no callbacks");
  }
  return Interpreter(app, host).run(trace);
}

}  // namespace thinkahead::runtime
