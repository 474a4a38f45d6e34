// SPDX-License-Identifier: Apache-2.0
//
// Line-oriented `.papp` reader and canonical printer.

#include <cctype>
#include <sstream>

#include "thinkahead/app_ir.hpp"

namespace thinkahead::ir {

namespace {

enum class Tok {
  kIdent,
  kString,
  kNumber,
  kLBrace,
  kRBrace,
  kLParen,
  kRParen,
  kComma,
  kEq,
  kPlus,
  kSemi,
  kArrow,
  kNewline,
  kEnd,
};

struct Token {
  Tok kind;
  std::string text;
  int line;
};

bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

bool ident_char(char c) {
  return ident_start(c) || std::isdigit(static_cast<unsigned char>(c)) ||
         c == '.';
}

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) {}

  std::vector<Token> run(std::vector<Diagnostic>& diags) {
    std::vector<Token> out;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '\n') {
        out.push_back({Tok::kNewline, "\n", line_});
        ++line_;
        ++pos_;
      } else if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '"') {
        out.push_back(read_string(diags));
      } else if (ident_start(c)) {
        std::size_t start = pos_;
        while (pos_ < text_.size() && ident_char(text_[pos_])) ++pos_;
        out.push_back({Tok::kIdent, text_.substr(start, pos_ - start), line_});
      } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '-') {
        if (c == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
          out.push_back({Tok::kArrow, "->", line_});
          pos_ += 2;
          continue;
        }
        std::size_t start = pos_++;
        while (pos_ < text_.size() &&
               std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
          ++pos_;
        }
        out.push_back({Tok::kNumber, text_.substr(start, pos_ - start), line_});
      } else {
        Tok kind;
        switch (c) {
          case '{': kind = Tok::kLBrace; break;
          case '}': kind = Tok::kRBrace; break;
          case '(': kind = Tok::kLParen; break;
          case ')': kind = Tok::kRParen; break;
          case ',': kind = Tok::kComma; break;
          case '=': kind = Tok::kEq; break;
          case '+': kind = Tok::kPlus; break;
          case ';': kind = Tok::kSemi; break;
          default:
            diags.push_back({line_, std::string("unexpected character '") +
                                        c + "'"});
            ++pos_;
            continue;
        }
        out.push_back({kind, std::string(1, c), line_});
        ++pos_;
      }
    }
    out.push_back({Tok::kEnd, "", line_});
    return out;
  }

 private:
  Token read_string(std::vector<Diagnostic>& diags) {
    const int start_line = line_;
    ++pos_;  // opening quote
    std::string value;
    while (pos_ < text_.size() && text_[pos_] != '"') {
      char c = text_[pos_++];
      if (c == '\n') {
        diags.push_back({start_line, "unterminated string"});
        ++line_;
        return {Tok::kString, value, start_line};
      }
      if (c == '\\' && pos_ < text_.size()) {
        char e = text_[pos_++];
        switch (e) {
          case 'n': value += '\n'; break;
          case 't': value += '\t'; break;
          case '"': value += '"'; break;
          case '\\': value += '\\'; break;
          default:
            diags.push_back({line_, std::string("unknown escape '\\") + e +
                                        "'"});
        }
        continue;
      }
      value += c;
    }
    if (pos_ >= text_.size()) {
      diags.push_back({start_line, "unterminated string"});
    } else {
      ++pos_;  // closing quote
    }
    return {Tok::kString, value, start_line};
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

struct SyntaxError {
  Diagnostic diag;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  App run(std::vector<Diagnostic>& diags) {
    App app;
    bool have_name = false;
    while (true) {
      skip_separators();
      if (peek().kind == Tok::kEnd) break;
      try {
        top_level(app, have_name);
      } catch (const SyntaxError& e) {
        diags.push_back(e.diag);
        recover();
      }
    }
    for (auto& d : pending_) diags.push_back(std::move(d));
    return app;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }

  [[noreturn]] void fail(const Token& at, const std::string& msg) const {
    throw SyntaxError{{at.line, msg}};
  }

  const Token& expect(Tok kind, const char* what) {
    if (peek().kind != kind) {
      fail(peek(), std::string("expected ") + what + ", found " +
                       describe(peek()));
    }
    return next();
  }

  std::string ident(const char* what) { return expect(Tok::kIdent, what).text; }

  static std::string describe(const Token& t) {
    switch (t.kind) {
      case Tok::kNewline: return "end of line";
      case Tok::kEnd: return "end of input";
      case Tok::kString: return "string \"" + t.text + "\"";
      default: return "'" + t.text + "'";
    }
  }

  void skip_separators() {
    while (peek().kind == Tok::kNewline || peek().kind == Tok::kSemi) next();
  }

  void end_of_statement() {
    Tok k = peek().kind;
    if (k == Tok::kNewline || k == Tok::kSemi) {
      next();
    } else if (k != Tok::kRBrace && k != Tok::kEnd) {
      fail(peek(), "expected end of statement, found " + describe(peek()));
    }
  }

  // Skip to the next line, leaving any brace block we were inside.
  void recover() {
    int depth = 0;
    while (peek().kind != Tok::kEnd) {
      Tok k = next().kind;
      if (k == Tok::kLBrace) ++depth;
      if (k == Tok::kRBrace) {
        if (depth == 0) return;
        --depth;
      }
      if (k == Tok::kNewline && depth == 0) return;
    }
  }

  void top_level(App& app, bool& have_name) {
    const Token& kw = peek();
    if (kw.kind != Tok::kIdent) fail(kw, "expected declaration");
    const std::string word = kw.text;
    const int line = kw.line;
    next();
    if (word == "app") {
      if (have_name) fail(kw, "duplicate app declaration");
      app.name = ident("app name");
      have_name = true;
      end_of_statement();
    } else if (word == "instrumented") {
      app.instrumented = true;
      end_of_statement();
    } else if (word == "resource" || word == "setting") {
      std::string key = ident("key");
      expect(Tok::kEq, "'='");
      std::string value = expect(Tok::kString, "string value").text;
      auto& table = word == "resource" ? app.resources : app.settings;
      if (!table.emplace(key, value).second) {
        pending_.push_back({line, "duplicate " + word + " '" + key + "'"});
      }
      end_of_statement();
    } else if (word == "netmethod") {
      NetMethodDecl decl;
      decl.name = ident("netmethod name");
      if (peek().kind == Tok::kIdent && peek().text == "latency") {
        next();
        expect(Tok::kEq, "'='");
        decl.latency_ms = std::stoll(expect(Tok::kNumber, "latency").text);
      }
      app.netlib.push_back(std::move(decl));
      end_of_statement();
    } else if (word == "callback" || word == "method") {
      Procedure proc;
      proc.line = line;
      proc.kind = word == "callback" ? ProcedureKind::kCallback
                                     : ProcedureKind::kMethod;
      proc.name = ident("name");
      expect(Tok::kLBrace, "'{'");
      while (true) {
        skip_separators();
        if (peek().kind == Tok::kRBrace) break;
        if (peek().kind == Tok::kEnd) fail(peek(), "unterminated block");
        proc.body.push_back(statement());
      }
      next();
      (proc.kind == ProcedureKind::kCallback ? app.callbacks : app.methods)
          .push_back(std::move(proc));
    } else if (word == "ccfg") {
      expect(Tok::kLBrace, "'{'");
      while (true) {
        skip_separators();
        if (peek().kind == Tok::kRBrace) break;
        if (peek().kind == Tok::kEnd) fail(peek(), "unterminated ccfg block");
        if (peek().kind == Tok::kIdent && peek().text == "wait" &&
            peek(1).kind == Tok::kIdent) {
          next();
          app.ccfg.wait_nodes.push_back(ident("wait node name"));
        } else {
          CcfgEdge edge;
          edge.line = peek().line;
          edge.from = ident("ccfg node");
          expect(Tok::kArrow, "'->'");
          edge.to = ident("ccfg node");
          app.ccfg.edges.push_back(std::move(edge));
        }
        end_of_statement();
      }
      next();
    } else if (word == "hint_url") {
      std::string id = ident("url id");
      expect(Tok::kEq, "'='");
      app.hint_urls[id] = expect(Tok::kString, "url value").text;
      end_of_statement();
    } else if (word == "rewrite") {
      RewriteRule rule;
      rule.url_id = ident("url id");
      rule.part = std::stoi(expect(Tok::kNumber, "part index").text);
      rule.find = expect(Tok::kString, "search string").text;
      expect(Tok::kArrow, "'->'");
      rule.replace = expect(Tok::kString, "replacement string").text;
      app.rewrite_rules.push_back(std::move(rule));
      end_of_statement();
    } else {
      fail(kw, "unknown declaration '" + word + "'");
    }
  }

  // Parses `<kw>(<ident>)`, returning the identifier.
  std::string paren_ident(const char* what) {
    expect(Tok::kLParen, "'('");
    std::string v = ident(what);
    expect(Tok::kRParen, "')'");
    return v;
  }

  UrlPart url_part() {
    if (peek().kind == Tok::kString) {
      return {UrlPart::Kind::kLiteral, next().text};
    }
    if (peek().kind == Tok::kIdent && peek().text == "resource" &&
        peek(1).kind == Tok::kLParen) {
      next();
      return {UrlPart::Kind::kResource, paren_ident("resource key")};
    }
    return {UrlPart::Kind::kVar, ident("url part")};
  }

  Stmt statement() {
    Stmt stmt;
    stmt.line = peek().line;
    const std::string word = ident("statement");
    if (word == "let") {
      std::string var = ident("variable name");
      expect(Tok::kEq, "'='");
      if (peek().kind == Tok::kString) {
        stmt.node = DefineStatic{var, {StaticSourceKind::kLiteral, next().text}};
      } else {
        const Token& src = peek();
        std::string fn = ident("value source");
        if (fn == "resource") {
          stmt.node = DefineStatic{
              var, {StaticSourceKind::kResource, paren_ident("resource key")}};
        } else if (fn == "setting") {
          stmt.node = DefineStatic{
              var, {StaticSourceKind::kSetting, paren_ident("setting key")}};
        } else if (fn == "input") {
          stmt.node = DefineDynamic{var, paren_ident("input tag")};
        } else {
          fail(src, "expected string, resource(), setting() or input()");
        }
      }
    } else if (word == "url") {
      BuildUrl build;
      build.url_id = ident("url id");
      expect(Tok::kEq, "'='");
      build.parts.push_back(url_part());
      while (peek().kind == Tok::kPlus) {
        next();
        build.parts.push_back(url_part());
      }
      stmt.node = std::move(build);
    } else if (word == "call") {
      stmt.node = Call{ident("method name")};
    } else if (word == "asynccall") {
      stmt.node = AsyncCall{ident("method name")};
    } else if (word == "goto") {
      stmt.node = Transition{ident("callback name")};
    } else if (word == "send_definition") {
      expect(Tok::kLParen, "'('");
      SendDefinition sd;
      sd.var = ident("variable");
      expect(Tok::kComma, "','");
      sd.url_id = ident("url id");
      expect(Tok::kComma, "','");
      sd.part = std::stoi(expect(Tok::kNumber, "part index").text);
      expect(Tok::kRParen, "')'");
      stmt.node = std::move(sd);
    } else if (word == "trigger_prefetch") {
      expect(Tok::kLParen, "'('");
      TriggerPrefetch tp;
      if (peek().kind != Tok::kRParen) {
        tp.url_ids.push_back(ident("url id"));
        while (peek().kind == Tok::kComma) {
          next();
          tp.url_ids.push_back(ident("url id"));
        }
      }
      expect(Tok::kRParen, "')'");
      stmt.node = std::move(tp);
    } else if (word == "fetch_from_proxy") {
      expect(Tok::kLParen, "'('");
      FetchFromProxy f;
      f.method = ident("netmethod");
      expect(Tok::kComma, "','");
      f.url_id = ident("url id");
      expect(Tok::kRParen, "')'");
      stmt.node = std::move(f);
    } else if (peek().kind == Tok::kLParen) {
      stmt.node = NetCall{word, paren_ident("url id")};
    } else {
      fail(peek(), "unknown statement '" + word + "'");
    }
    end_of_statement();
    return stmt;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<Diagnostic> pending_;
};

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

std::string print_part(const UrlPart& p) {
  switch (p.kind) {
    case UrlPart::Kind::kLiteral: return quote(p.text);
    case UrlPart::Kind::kResource: return "resource(" + p.text + ")";
    case UrlPart::Kind::kVar: return p.text;
  }
  return {};
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

std::string print_stmt(const Stmt& stmt) {
  return std::visit(
      Overloaded{
          [](const DefineStatic& s) {
            switch (s.source.kind) {
              case StaticSourceKind::kLiteral:
                return "let " + s.var + " = " + quote(s.source.text);
              case StaticSourceKind::kResource:
                return "let " + s.var + " = resource(" + s.source.text + ")";
              case StaticSourceKind::kSetting:
                return "let " + s.var + " = setting(" + s.source.text + ")";
            }
            return std::string();
          },
          [](const DefineDynamic& d) {
            return "let " + d.var + " = input(" + d.input_tag + ")";
          },
          [](const BuildUrl& b) {
            std::string out = "url " + b.url_id + " =";
            for (std::size_t i = 0; i < b.parts.size(); ++i) {
              out += (i ? " + " : " ") + print_part(b.parts[i]);
            }
            return out;
          },
          [](const NetCall& n) { return n.method + "(" + n.url_id + ")"; },
          [](const Call& c) { return "call " + c.method; },
          [](const AsyncCall& c) { return "asynccall " + c.method; },
          [](const Transition& t) { return "goto " + t.callback; },
          [](const SendDefinition& s) {
            return "send_definition(" + s.var + ", " + s.url_id + ", " +
                   std::to_string(s.part) + ")";
          },
          [](const TriggerPrefetch& t) {
            std::string out = "trigger_prefetch(";
            for (std::size_t i = 0; i < t.url_ids.size(); ++i) {
              out += (i ? ", " : "") + t.url_ids[i];
            }
            return out + ")";
          },
          [](const FetchFromProxy& f) {
            return "fetch_from_proxy(" + f.method + ", " + f.url_id + ")";
          },
      },
      stmt.node);
}

void print_procedure(std::ostringstream& out, const char* kw,
                     const Procedure& proc) {
  out << "\n" << kw << " " << proc.name << " {\n";
  for (const auto& stmt : proc.body) out << "  " << print_stmt(stmt) << "\n";
  out << "}\n";
}

}  // namespace

App parse_app(const std::string& text) {
  std::vector<Diagnostic> diags;
  auto tokens = Lexer(text).run(diags);
  App app = Parser(std::move(tokens)).run(diags);
  if (diags.empty()) diags = validate(app);
  if (!diags.empty()) throw ParseError(std::move(diags));
  return app;
}

std::string print_app(const App& app) {
  std::ostringstream out;
  out << "app " << app.name << "\n";
  if (app.instrumented) out << "instrumented\n";
  for (const auto& [k, v] : app.resources) {
    out << "resource " << k << " = " << quote(v) << "\n";
  }
  for (const auto& [k, v] : app.settings) {
    out << "setting " << k << " = " << quote(v) << "\n";
  }
  for (const auto& nm : app.netlib) {
    out << "netmethod " << nm.name;
    if (nm.latency_ms) out << " latency=" << *nm.latency_ms;
    out << "\n";
  }
  for (const auto& [id, v] : app.hint_urls) {
    out << "hint_url " << id << " = " << quote(v) << "\n";
  }
  for (const auto& r : app.rewrite_rules) {
    out << "rewrite " << r.url_id << " " << r.part << " " << quote(r.find)
        << " -> " << quote(r.replace) << "\n";
  }
  for (const auto& cb : app.callbacks) print_procedure(out, "callback", cb);
  for (const auto& m : app.methods) print_procedure(out, "method", m);
  if (!app.ccfg.wait_nodes.empty() || !app.ccfg.edges.empty()) {
    out << "\nccfg {\n";
    for (const auto& w : app.ccfg.wait_nodes) out << "  wait " << w << "\n";
    for (const auto& e : app.ccfg.edges) {
      out << "  " << e.from << " -> " << e.to << "\n";
    }
    out << "}\n";
  }
  return out.str();
}

}  // namespace thinkahead::ir
