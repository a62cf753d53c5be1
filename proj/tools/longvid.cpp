// Command-line front end: run, eval, stats, ablate.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "longvid/bench.hpp"
#include "longvid/error.hpp"
#include "longvid/remote.hpp"
#include "longvid/sim_tools.hpp"

namespace fs = std::filesystem;
using namespace longvid;

namespace {

struct Options {
  SessionConfig cfg;
  int setting = 0;
  long long timeout_ms = 0;
  long long llm_timeout_ms = 60000;
  std::string llm = "scripted";
  std::string tool_endpoint;
  bool egocentric = false;

  std::string suite;
  std::string dataset;
  std::string format = "generic";
  int concurrency = 1;
};

void add_config_flags(CLI::App& app, Options& o) {
  auto& c = o.cfg;
  app.add_option("--fps", c.fps_d, "downsampled frame rate")->capture_default_str();
  app.add_option("--n", c.n, "segment length in seconds")->capture_default_str();
  app.add_option("--cf-thr", c.cf_thr, "confidence threshold (0-5)")->capture_default_str();
  app.add_option("-T,--max-assessments", c.max_assessments, "answer assessments per question")->capture_default_str();
  app.add_option("--alpha", c.fusion.alpha, "detection window half-width in frames")->capture_default_str();
  app.add_option("--init-conf-thr", c.fusion.init_conf_thr, "tracker seeding threshold")->capture_default_str();
  app.add_option("--caption-concurrency", c.caption_concurrency, "segments captioned at once")->capture_default_str();
  app.add_option("--timeout-ms", o.timeout_ms, "per-question wall clock budget, 0 = none")->capture_default_str();
  app.add_flag("--no-tool-confidence", c.ablation.no_tool_confidence, "strip confidences from tool returns");
  app.add_flag("--no-plan-adjust", c.ablation.no_plan_adjust, "keep the first plan");
  app.add_flag("--no-cot", c.ablation.no_cot, "ask for tool commands directly");
  app.add_flag("--no-tools", c.ablation.no_tools, "answer from captions and summary only");
  app.add_option("--setting", o.setting, "stacked ablation setting 0-4 (overrides the flags above)")
      ->check(CLI::Range(0, 4));

  auto& g = c.gateway;
  app.add_option("--llm", o.llm, "scripted | remote")->check(CLI::IsMember({"scripted", "remote"}))->capture_default_str();
  app.add_option("--endpoint", g.endpoint, "chat completions URL")->capture_default_str();
  app.add_option("--model", g.model)->capture_default_str();
  app.add_option("--temperature", g.temperature)->capture_default_str();
  app.add_option("--max-retries", g.max_retries)->capture_default_str();
  app.add_option("--llm-timeout-ms", o.llm_timeout_ms)->capture_default_str();
  app.add_option("--seed", g.seed, "retry jitter seed")->capture_default_str();
  app.add_option("--tool-endpoint", o.tool_endpoint, "remote tool service URL; default is the simulated backend");
  app.add_flag("--egocentric", o.egocentric, "captions use #C/#O markers (tool captioner only)");
}

void add_data_flags(CLI::App& app, Options& o) {
  app.add_option("--suite", o.suite, "fixture root holding videos/ and llm/")->required();
  app.add_option("--dataset", o.dataset, "question file (default <suite>/items.jsonl)");
  app.add_option("--format", o.format, "generic | egoschema | nextqa | intentqa")->capture_default_str();
}

SessionConfig finish_config(Options& o) {
  if (o.setting > 0) o.cfg.ablation = AblationFlags::stacked(o.setting);
  o.cfg.timeout = std::chrono::milliseconds(o.timeout_ms);
  o.cfg.gateway.timeout = std::chrono::milliseconds(o.llm_timeout_ms);
  o.cfg.gateway.backend = o.llm == "remote" ? BackendKind::Remote : BackendKind::Scripted;
  validate(o.cfg);
  return o.cfg;
}

std::vector<MCQItem> load_items(const Options& o) {
  fs::path path = o.dataset.empty() ? fs::path(o.suite) / "items.jsonl" : fs::path(o.dataset);
  return load_dataset(path, dataset_format_from_string(o.format));
}

EnvironmentProvider make_provider(const Options& o) {
  std::shared_ptr<LlmGateway> shared_llm;
  if (o.llm == "remote") {
    auto backend = std::make_shared<RemoteChatBackend>(RemoteChatBackend::from_env(o.cfg.gateway));
    shared_llm = std::make_shared<LlmGateway>(backend, o.cfg.gateway);
  }
  if (o.tool_endpoint.empty()) return suite_environment(o.suite, shared_llm);

  const fs::path root = o.suite;
  auto tools = std::make_shared<RemoteToolBackend>(o.tool_endpoint, o.cfg.gateway.timeout);
  return [root, tools, shared_llm, ego = o.egocentric](const MCQItem& item, const SessionConfig& cfg) {
    SessionEnvironment env;
    env.manifest = load_manifest(root / "videos" / (item.video_id + ".manifest"));
    env.registry = std::make_shared<ToolRegistry>();
    env.registry->add_all(tools);
    auto captions = root / "videos" / (item.video_id + ".captions");
    if (fs::exists(captions)) {
      env.captioner = load_caption_fixture(captions);
    } else {
      env.captioner = std::make_shared<ToolCaptioner>(tools, ego);
    }
    env.llm = shared_llm ? shared_llm
                         : std::make_shared<LlmGateway>(
                               script_from_fixture(root / "llm" / (item.item_id + ".script")), cfg.gateway);
    return env;
  };
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << text;
}

void write_traces(const EvalRun& run, const std::string& dir) {
  if (dir.empty()) return;
  for (std::size_t i = 0; i < run.traces.size(); ++i) {
    write_trace(run.traces[i], fs::path(dir) / (run.report.items[i].item_id + ".jsonl"));
  }
}

int cmd_run(Options& o, const std::string& item_id, const std::string& trace_out) {
  auto cfg = finish_config(o);
  auto items = load_items(o);
  auto it = std::find_if(items.begin(), items.end(), [&](const MCQItem& m) { return m.item_id == item_id; });
  if (it == items.end()) throw Error(ErrorKind::Config, "no item '" + item_id + "' in the dataset");
  auto env = make_provider(o)(*it, cfg);
  auto result = run_session(env.manifest, *it, cfg, SessionDeps{*env.registry, *env.captioner, *env.llm});

  for (const auto& a : result.assessments) {
    std::cout << "t=" << a.t << " answer="
              << (a.candidate.option_label ? std::string(1, *a.candidate.option_label) : std::string("-"))
              << " confidence=" << a.candidate.confidence << " " << to_string(a.decision) << "\n";
  }
  for (const auto& r : result.tool_records) std::cout << "tool step " << r.step_t << ": " << format_command(r.command) << "\n";
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
  const auto& fa = result.final_answer;
  std::cout << "final " << (fa.option_label ? std::string(1, *fa.option_label) : std::string("-"))
            << " (confidence " << fa.confidence << ", " << to_string(result.terminated_by) << ")\n";
  if (!trace_out.empty()) write_trace(result.trace, trace_out);
  return 0;
}

int cmd_eval(Options& o, const std::string& report_out, const std::string& traces_dir) {
  auto cfg = finish_config(o);
  auto run = evaluate(load_items(o), cfg, make_provider(o), o.concurrency);
  std::cout << format_report(run.report);
  for (const auto& item : run.report.items) {
    if (item.error) std::cerr << item.item_id << ": " << *item.error << "\n";
  }
  if (!report_out.empty()) write_text(report_out, report_to_json(run.report, true).dump(2) + "\n");
  write_traces(run, traces_dir);
  return 0;
}

int cmd_stats(const std::vector<std::string>& inputs, int T, const std::string& out) {
  std::vector<fs::path> files;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      for (const auto& e : fs::directory_iterator(in)) {
        if (e.path().extension() == ".jsonl") files.push_back(e.path());
      }
    } else {
      files.emplace_back(in);
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<TraceSummary> digests;
  for (const auto& f : files) digests.push_back(summarize_trace(read_trace(f)));
  auto stats = tool_call_stats(digests, T);
  EvalReport view;
  view.tools = stats;
  if (stats.empty) {
    std::cout << "no traces\n";
  } else {
    std::cout << "sessions " << stats.sessions << "\n";
    std::string text = format_report(view);
    auto from = text.find("tool calls:");
    auto to = text.find("runtime:");
    std::cout << text.substr(from, to - from);
  }
  if (!out.empty()) write_text(out, report_to_json(view)["tools"].dump(2) + "\n");
  return 0;
}

int cmd_ablate(Options& o, const std::string& mode, const std::string& out) {
  auto cfg = finish_config(o);
  auto items = load_items(o);
  auto provider = make_provider(o);
  nlohmann::json record = nlohmann::json::object();
  for (auto m : {AblationMode::Stacked, AblationMode::Isolated}) {
    const bool stacked = m == AblationMode::Stacked;
    if (mode != "both" && (mode == "stacked") != stacked) continue;
    auto rows = ablation_run(items, cfg, provider, o.concurrency, m);
    std::cout << (stacked ? "stacked" : "isolated") << "\n" << format_ablation(rows) << "\n";
    auto& arr = record[stacked ? "stacked" : "isolated"] = nlohmann::json::array();
    for (const auto& r : rows) arr.push_back({{"name", r.name}, {"report", report_to_json(r.report)}});
  }
  if (!out.empty()) write_text(out, record.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Uncertainty-aware video question answering agent"};
  app.require_subcommand(1);

  Options run_opts, eval_opts, ablate_opts;
  std::string item_id, trace_out, report_out, traces_dir, stats_out, ablate_out, mode = "both";
  std::vector<std::string> stats_inputs;
  int stats_T = 5;

  auto* run = app.add_subcommand("run", "answer one question");
  add_config_flags(*run, run_opts);
  add_data_flags(*run, run_opts);
  run->add_option("--item", item_id, "item id")->required();
  run->add_option("--trace", trace_out, "write the session trace here");

  auto* eval = app.add_subcommand("eval", "evaluate a dataset");
  add_config_flags(*eval, eval_opts);
  add_data_flags(*eval, eval_opts);
  eval->add_option("-j,--concurrency", eval_opts.concurrency)->capture_default_str();
  eval->add_option("--report", report_out, "write the JSON report here");
  eval->add_option("--traces", traces_dir, "write per-item traces into this directory");

  auto* stats = app.add_subcommand("stats", "tool-call analytics from stored traces");
  stats->add_option("inputs", stats_inputs, "trace files or directories")->required();
  stats->add_option("-T,--max-assessments", stats_T)->capture_default_str();
  stats->add_option("--out", stats_out, "write the JSON statistics here");

  auto* ablate = app.add_subcommand("ablate", "baseline and settings 1-4");
  add_config_flags(*ablate, ablate_opts);
  add_data_flags(*ablate, ablate_opts);
  ablate->add_option("-j,--concurrency", ablate_opts.concurrency)->capture_default_str();
  ablate->add_option("--mode", mode)->check(CLI::IsMember({"stacked", "isolated", "both"}))->capture_default_str();
  ablate->add_option("--out", ablate_out, "write the JSON comparison here");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(run_opts, item_id, trace_out);
    if (*eval) return cmd_eval(eval_opts, report_out, traces_dir);
    if (*stats) return cmd_stats(stats_inputs, stats_T, stats_out);
    if (*ablate) return cmd_ablate(ablate_opts, mode, ablate_out);
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
