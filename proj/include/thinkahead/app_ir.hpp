// SPDX-License-Identifier: Apache-2.0
//
// Declarative model of an event-driven app: callbacks and helper methods made
// of def/use statements over app-global string variables, a declared callback
// control-flow graph (CCFG) with wait nodes, and a network library whose calls
// carry a simulated latency.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace thinkahead::ir {

// Where a statically defined variable takes its value from.
enum class StaticSourceKind { kLiteral, kResource, kSetting };

struct StaticSource {
  StaticSourceKind kind = StaticSourceKind::kLiteral;
  std::string text;  // literal value, or resource/setting key

  bool operator==(const StaticSource&) const = default;
};

struct UrlPart {
  enum class Kind { kLiteral, kResource, kVar };
  Kind kind = Kind::kLiteral;
  std::string text;  // literal value, resource key, or variable name

  bool operator==(const UrlPart&) const = default;
};

struct DefineStatic {
  std::string var;
  StaticSource source;
  bool operator==(const DefineStatic&) const = default;
};

// Value arrives from the user trace at runtime, keyed by input tag.
struct DefineDynamic {
  std::string var;
  std::string input_tag;
  bool operator==(const DefineDynamic&) const = default;
};

// URL Spot: the single statement that builds `url_id` from its parts.
struct BuildUrl {
  std::string url_id;
  std::vector<UrlPart> parts;
  bool operator==(const BuildUrl&) const = default;
};

struct NetCall {
  std::string method;
  std::string url_id;
  bool operator==(const NetCall&) const = default;
};

struct Call {
  std::string method;
  bool operator==(const Call&) const = default;
};

// Framework-initiated invocation (execute() -> doInBackground()).
struct AsyncCall {
  std::string method;
  bool operator==(const AsyncCall&) const = default;
};

// Starts another callback immediately, without a wait node in between.
struct Transition {
  std::string callback;
  bool operator==(const Transition&) const = default;
};

// Instrumentation pseudo-statements. Only legal in instrumented apps.
struct SendDefinition {
  std::string var;
  std::string url_id;
  int part = 0;  // 1-based
  bool operator==(const SendDefinition&) const = default;
};

struct TriggerPrefetch {
  std::vector<std::string> url_ids;
  bool operator==(const TriggerPrefetch&) const = default;
};

struct FetchFromProxy {
  std::string method;  // original network method, used on a cache miss
  std::string url_id;
  bool operator==(const FetchFromProxy&) const = default;
};

using StmtNode =
    std::variant<DefineStatic, DefineDynamic, BuildUrl, NetCall, Call,
                 AsyncCall, Transition, SendDefinition, TriggerPrefetch,
                 FetchFromProxy>;

struct Stmt {
  StmtNode node;
  int line = 0;  // source line, 0 when built programmatically

  // Structural equality; source positions are ignored.
  bool operator==(const Stmt& other) const { return node == other.node; }
};

bool is_pseudo(const Stmt& stmt);

// Name of the variable a DefineStatic/DefineDynamic assigns, if any.
std::optional<std::string> defined_var(const Stmt& stmt);

enum class ProcedureKind { kCallback, kMethod };

struct Procedure {
  std::string name;
  ProcedureKind kind = ProcedureKind::kCallback;
  std::vector<Stmt> body;
  int line = 0;

  bool operator==(const Procedure& other) const {
    return name == other.name && kind == other.kind && body == other.body;
  }
};

struct NetMethodDecl {
  std::string name;
  std::optional<std::int64_t> latency_ms;
  bool operator==(const NetMethodDecl&) const = default;
};

struct CcfgEdge {
  std::string from;
  std::string to;
  int line = 0;

  bool operator==(const CcfgEdge& other) const {
    return from == other.from && to == other.to;
  }
};

class Ccfg {
 public:
  std::vector<std::string> wait_nodes;
  std::vector<CcfgEdge> edges;

  bool is_wait(const std::string& node) const;
  std::vector<std::string> successors(const std::string& node) const;
  std::vector<std::string> predecessors(const std::string& node) const;
  bool has_edge(const std::string& from, const std::string& to) const;

  bool operator==(const Ccfg&) const = default;
};

struct RewriteRule {
  std::string url_id;
  int part = 0;  // 1-based
  std::string find;
  std::string replace;
  bool operator==(const RewriteRule&) const = default;
};

struct App {
  std::string name;
  std::map<std::string, std::string> resources;
  std::map<std::string, std::string> settings;
  std::vector<Procedure> callbacks;
  std::vector<Procedure> methods;
  Ccfg ccfg;
  std::vector<NetMethodDecl> netlib;

  // Set by the instrumenter. The two maps below carry developer-hint data the
  // runtime proxy needs and are only meaningful on instrumented apps.
  bool instrumented = false;
  std::map<std::string, std::string> hint_urls;
  std::vector<RewriteRule> rewrite_rules;

  const Procedure* find_callback(const std::string& name) const;
  const Procedure* find_method(const std::string& name) const;
  const Procedure* find_procedure(const std::string& name) const;
  Procedure* find_procedure(const std::string& name);
  const NetMethodDecl* find_netmethod(const std::string& name) const;

  // Callbacks first, then helper methods, each in declaration order. This is
  // the program order used for Definition Spot numbering.
  std::vector<const Procedure*> procedures_in_program_order() const;

  // The callback the first trace event must invoke.
  const Procedure* entry_callback() const;

  // Locates the URL Spot for `url_id`; returns {procedure, stmt index}.
  std::optional<std::pair<const Procedure*, std::size_t>> find_url_spot(
      const std::string& url_id) const;

  // URL ids in URL Spot program order.
  std::vector<std::string> url_ids() const;

  bool operator==(const App&) const = default;
};

struct Diagnostic {
  int line = 0;
  std::string message;
};

// Raised by parse_app and validate_or_throw. what() joins every diagnostic.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(std::vector<Diagnostic> diagnostics);
  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

// Structural checks every App must pass before analysis: unique names,
// resolvable references, one URL Spot per URL id, well-formed CCFG, and no
// recursive call/goto chains.
std::vector<Diagnostic> validate(const App& app);
void validate_or_throw(const App& app);

// `.papp` text format.
App parse_app(const std::string& text);
std::string print_app(const App& app);

}  // namespace thinkahead::ir
