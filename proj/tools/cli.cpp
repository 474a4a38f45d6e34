// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "thinkahead/app_ir.hpp"
#include "thinkahead/callback_analysis.hpp"
#include "thinkahead/ecg.hpp"
#include "thinkahead/instrumenter.hpp"
#include "thinkahead/json_io.hpp"
#include "thinkahead/mbm.hpp"
#include "thinkahead/metrics.hpp"
#include "thinkahead/runtime.hpp"
#include "thinkahead/string_analysis.hpp"

namespace thinkahead::cli {

namespace fs = std::filesystem;
using io::json;

namespace {

// Input/pipeline failure reported with exit code 2.
class Failure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  fs::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Failure("cannot write '" + path + "'");
  out << text;
}

json read_json(const std::string& path, const std::string& what) {
  return io::parse_json(read_file(path), what + " '" + path + "'");
}

ir::App read_app(const std::string& path) {
  return ir::parse_app(read_file(path));
}

// ---------------------------------------------------------------- analyze

struct AnalyzeArgs {
  std::string app;
  std::string trace;
  std::string net;
  std::string signature;  // method name override
  std::string out_dir = ".";
};

json do_analyze(const AnalyzeArgs& a) {
  ir::App app = read_app(a.app);
  runtime::NetModel net;
  if (!a.net.empty()) net = io::net_model_from_json(read_json(a.net, "net config"));

  analysis::FetchSignature sig;
  if (!a.signature.empty()) {
    sig.method = a.signature;
  } else if (!a.trace.empty()) {
    auto trace = io::trace_from_json(read_json(a.trace, "trace"));
    sig = analysis::profile_fetch_signature(app, trace, net);
  } else {
    sig = analysis::profile_fetch_signature_static(app, net);
  }
  auto url_map = analysis::analyze_urls(app);
  auto triggers = analysis::identify_trigger_callbacks(
      app, app.ccfg, ir::build_ecg(app), sig);

  json result = {{"urlmap", io::to_json(url_map)},
                 {"triggermap", io::to_json(triggers)},
                 {"signature", io::to_json(sig)}};
  write_file((fs::path(a.out_dir) / "urlmap.json").string(),
             io::dump(result["urlmap"]));
  write_file((fs::path(a.out_dir) / "triggermap.json").string(),
             io::dump(result["triggermap"]));
  write_file((fs::path(a.out_dir) / "signature.json").string(),
             io::dump(result["signature"]));
  return result;
}

void print_analyze(const json& r, std::ostream& out) {
  out << "signature: " << r["signature"]["method"].get<std::string>() << "\n";
  for (const auto& [url, parts] : r["urlmap"].items()) {
    std::size_t dynamic = 0;
    for (const auto& p : parts) dynamic += p.contains("spots");
    out << "url " << url << ": " << parts.size() << " parts, " << dynamic
        << " dynamic\n";
  }
  for (const auto& [cb, urls] : r["triggermap"].items()) {
    out << "trigger " << cb << ":";
    for (const auto& u : urls) out << " " << u.get<std::string>();
    out << "\n";
  }
}

// ------------------------------------------------------------- instrument

struct InstrumentArgs {
  std::string app;
  std::string url_map;
  std::string trigger_map;
  std::string signature;
  std::string hints;
  std::string out;
  std::string provenance_out;
};

json do_instrument(const InstrumentArgs& a) {
  ir::App app = read_app(a.app);
  auto url_map = io::url_map_from_json(read_json(a.url_map, "url map"));
  auto triggers =
      io::trigger_map_from_json(read_json(a.trigger_map, "trigger map"));
  auto sig = io::signature_from_json(read_json(a.signature, "signature"));
  auto ia = instrument::instrument(app, url_map, triggers, sig);
  if (!a.hints.empty()) {
    ia = instrument::apply_hints(
        std::move(ia), io::hints_from_json(read_json(a.hints, "hints")));
  }
  write_file(a.out, ir::print_app(ia.app));
  json prov = io::to_json(ia.provenance);
  if (!a.provenance_out.empty()) write_file(a.provenance_out, io::dump(prov));
  return {{"out", a.out}, {"provenance", prov}};
}

// -------------------------------------------------------------------- run

struct RunArgs {
  std::string app;
  std::string trace;
  std::string net;
  std::string seed_url_map;
  std::string signature;
  std::string hints;
  std::string out;
  std::string oracle_out;
};

json do_run(const RunArgs& a) {
  ir::App app = read_app(a.app);
  auto trace = io::trace_from_json(read_json(a.trace, "trace"));
  runtime::NetModel net;
  if (!a.net.empty()) net = io::net_model_from_json(read_json(a.net, "net config"));
  auto seed = a.seed_url_map.empty()
                  ? analysis::analyze_urls(app)
                  : io::url_map_from_json(read_json(a.seed_url_map, "url map"));

  runtime::RunOptions opts;
  if (!app.instrumented) {
    opts.signature =
        a.signature.empty()
            ? analysis::profile_fetch_signature(app, trace, net).method
            : io::signature_from_json(read_json(a.signature, "signature"))
                  .method;
  }
  if (!a.hints.empty()) {
    auto hints = io::hints_from_json(read_json(a.hints, "hints"));
    if (!hints.extra_triggers.empty()) {
      throw Failure("trigger hints change the app; apply them with 'instrument'");
    }
    for (const auto& [id, url] : hints.extra_static_urls) opts.hint_urls[id] = url;
    opts.rewrite_rules = hints.rewrite_rules;
  }

  auto log = runtime::run_trace(app, trace, net, seed, opts);
  json result = io::to_json(log);
  if (!a.out.empty()) write_file(a.out, io::dump(result));
  if (!a.oracle_out.empty()) {
    if (!app.instrumented) {
      throw Failure("--oracle-out needs an instrumented app");
    }
    write_file(a.oracle_out,
               io::dump(io::to_json(
                   metrics::replay_oracle(app, trace, opts.hint_urls))));
  }
  return result;
}

void print_run(const json& log, std::ostream& out) {
  for (const auto& e : log["events"]) {
    if (e["type"] != "demand") continue;
    out << e["at"].get<std::int64_t>() << "ms " << e["url"].get<std::string>()
        << " " << e["served_from"].get<std::string>() << " "
        << e["response_time_ms"].get<std::int64_t>() << "ms\n";
  }
  out << "end " << log["end_ms"].get<std::int64_t>() << "ms\n";
}

// ----------------------------------------------------------------- report

struct ReportArgs {
  std::vector<std::string> base;
  std::vector<std::string> opt;
  std::vector<std::string> oracle;
  std::string out;
};

json do_report(const ReportArgs& a) {
  if (a.base.size() != a.opt.size() || a.base.empty()) {
    throw Failure("report needs matching --base/--opt pairs");
  }
  if (!a.oracle.empty() && a.oracle.size() != a.base.size()) {
    throw Failure("give one --oracle per --base/--opt pair, or none");
  }
  std::vector<metrics::Metrics> all;
  json runs = json::array();
  metrics::Accuracy total;
  for (std::size_t i = 0; i < a.base.size(); ++i) {
    auto base = io::run_log_from_json(read_json(a.base[i], "run log"));
    auto opt = io::run_log_from_json(read_json(a.opt[i], "run log"));
    auto m = metrics::compute_effectiveness(base, opt);
    json run = {{"base", a.base[i]}, {"opt", a.opt[i]}, {"metrics", io::to_json(m)}};
    if (!a.oracle.empty()) {
      auto acc = metrics::compute_accuracy(
          opt, io::oracle_from_json(read_json(a.oracle[i], "oracle")));
      total += acc;
      run["accuracy"] = io::to_json(acc);
    }
    runs.push_back(run);
    all.push_back(std::move(m));
  }
  auto summary = metrics::summarize(all);
  json result = {{"runs", runs},
                 {"summary", io::to_json(summary)},
                 {"table", metrics::format_summary(summary)}};
  if (!a.oracle.empty()) result["accuracy"] = io::to_json(total);
  if (!a.out.empty()) write_file(a.out, io::dump(result));
  return result;
}

void print_report(const json& r, std::ostream& out) {
  out << r["table"].get<std::string>();
  if (r.contains("accuracy")) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "precision %.4f recall %.4f\n",
                  r["accuracy"]["precision"].get<double>(),
                  r["accuracy"]["recall"].get<double>());
    out << buf;
  }
}

// ------------------------------------------------------------------ bench

struct BenchArgs {
  std::int64_t latency_ms = 1000;
  std::int64_t think_ms = 2000;
  runtime::InstrumentationCosts costs;
  std::string out;
};

// ---------------------------------------------------------------- pipeline

struct PipelineArgs {
  std::string app;
  std::string trace;
  std::string net;
  std::string hints;
  std::string out_dir = ".";
};

json do_pipeline(const PipelineArgs& a) {
  auto path = [&](const char* name) {
    return (fs::path(a.out_dir) / name).string();
  };
  AnalyzeArgs an{a.app, a.trace, a.net, "", a.out_dir};
  do_analyze(an);

  InstrumentArgs in{a.app, path("urlmap.json"), path("triggermap.json"),
                    path("signature.json"), a.hints, path("app.inst.papp"),
                    path("provenance.json")};
  do_instrument(in);

  RunArgs base{a.app, a.trace, a.net, path("urlmap.json"),
               path("signature.json"), "", path("base.runlog.json"), ""};
  do_run(base);
  RunArgs opt{path("app.inst.papp"), a.trace, a.net, path("urlmap.json"),
              "", "", path("opt.runlog.json"), path("oracle.json")};
  do_run(opt);

  ReportArgs rep{{path("base.runlog.json")},
                 {path("opt.runlog.json")},
                 {path("oracle.json")},
                 path("metrics.json")};
  return do_report(rep);
}

void emit(std::ostream& out, bool as_json, const json& j,
          const std::function<void(const json&, std::ostream&)>& text) {
  if (as_json) {
    out << io::dump(j);
  } else {
    text(j, out);
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err) {
  CLI::App cli{"Static-analysis-driven HTTP prefetching pipeline"};
  cli.name("thinkahead");
  cli.require_subcommand(1);
  bool as_json = false;
  cli.add_flag("--json", as_json, "Machine-readable output on stdout");

  AnalyzeArgs an;
  auto* analyze = cli.add_subcommand(
      "analyze", "Build the URL Map, fetch signature and Trigger Map");
  analyze->add_option("app", an.app, "App source (.papp)")->required();
  analyze->add_option("--trace", an.trace, "Trace used to profile the signature");
  analyze->add_option("--net", an.net, "Net config JSON");
  analyze->add_option("--signature", an.signature,
                      "Use this network method as the fetch signature");
  analyze->add_option("--out-dir", an.out_dir, "Where to write the artifacts");
  analyze->add_flag("--json", as_json);

  InstrumentArgs in;
  auto* instr = cli.add_subcommand("instrument", "Insert prefetching calls");
  instr->add_option("app", in.app, "App source (.papp)")->required();
  instr->add_option("--urlmap", in.url_map)->required();
  instr->add_option("--triggermap", in.trigger_map)->required();
  instr->add_option("--signature", in.signature)->required();
  instr->add_option("--hints", in.hints, "Developer hints JSON");
  instr->add_option("--out", in.out, "Instrumented app (.papp)")->required();
  instr->add_option("--provenance-out", in.provenance_out);
  instr->add_flag("--json", as_json);

  RunArgs ru;
  auto* runc = cli.add_subcommand("run", "Execute an app over a trace");
  runc->add_option("--app", ru.app)->required();
  runc->add_option("--trace", ru.trace)->required();
  runc->add_option("--net", ru.net);
  runc->add_option("--seed-urlmap", ru.seed_url_map);
  runc->add_option("--signature", ru.signature,
                   "Signature JSON for an uninstrumented app");
  runc->add_option("--hints", ru.hints);
  runc->add_option("--out", ru.out, "Run log JSON");
  runc->add_option("--oracle-out", ru.oracle_out,
                   "Ground-truth prefetchable URLs per trigger point");
  runc->add_flag("--json", as_json);

  BenchArgs be;
  auto* bench = cli.add_subcommand("bench", "Run the 25-case microbenchmark");
  bench->add_option("--latency-ms", be.latency_ms)
      ->check(CLI::PositiveNumber);
  bench->add_option("--think-ms", be.think_ms)->check(CLI::NonNegativeNumber);
  bench->add_option("--sd-cost-ms", be.costs.send_definition_ms)
      ->check(CLI::NonNegativeNumber);
  bench->add_option("--tp-cost-ms", be.costs.trigger_prefetch_ms)
      ->check(CLI::NonNegativeNumber);
  bench->add_option("--ffp-cost-ms", be.costs.fetch_from_proxy_ms)
      ->check(CLI::NonNegativeNumber);
  bench->add_option("--out", be.out, "report.tsv or report.json");
  bench->add_flag("--json", as_json);

  ReportArgs re;
  auto* report = cli.add_subcommand("report", "Accuracy and effectiveness");
  report->add_option("--base", re.base, "Baseline run log (repeatable)")
      ->required();
  report->add_option("--opt", re.opt, "Optimized run log (repeatable)")
      ->required();
  report->add_option("--oracle", re.oracle, "Oracle JSON (repeatable)");
  report->add_option("--out", re.out, "Metrics JSON");
  report->add_flag("--json", as_json);

  PipelineArgs pi;
  auto* pipeline = cli.add_subcommand(
      "pipeline", "analyze, instrument, run both versions, report");
  pipeline->add_option("app", pi.app)->required();
  pipeline->add_option("--trace", pi.trace)->required();
  pipeline->add_option("--net", pi.net);
  pipeline->add_option("--hints", pi.hints);
  pipeline->add_option("--out-dir", pi.out_dir);
  pipeline->add_flag("--json", as_json);

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return cli.exit(e, out, err) == 0 ? 0 : 1;
  }

  try {
    if (analyze->parsed()) {
      emit(out, as_json, do_analyze(an), print_analyze);
    } else if (instr->parsed()) {
      auto r = do_instrument(in);
      emit(out, as_json, r, [](const json& j, std::ostream& o) {
        o << "wrote " << j["out"].get<std::string>() << " ("
          << j["provenance"].size() << " insertions)\n";
      });
    } else if (runc->parsed()) {
      emit(out, as_json, do_run(ru), print_run);
    } else if (bench->parsed()) {
      auto rep = mbm::run_benchmark(be.latency_ms, be.think_ms, be.costs);
      const bool json_file = fs::path(be.out).extension() == ".json";
      if (!be.out.empty()) {
        write_file(be.out, json_file ? io::dump(io::to_json(rep))
                                     : mbm::to_tsv(rep));
      }
      if (as_json) {
        out << io::dump(io::to_json(rep));
      } else {
        out << mbm::to_tsv(rep);
      }
    } else if (report->parsed()) {
      emit(out, as_json, do_report(re), print_report);
    } else if (pipeline->parsed()) {
      emit(out, as_json, do_pipeline(pi), print_report);
    }
  } catch (const std::exception& e) {
    std::string msg = e.what();
    if (auto nl = msg.find('\n'); nl != std::string::npos) msg.resize(nl);
    err << "error: " << msg << "\n";
    return 2;
  }
  return 0;
}

}  // namespace thinkahead::cli
