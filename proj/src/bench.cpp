#include "longvid/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <set>
#include <thread>

#include "longvid/error.hpp"
#include "longvid/sim_tools.hpp"

namespace longvid {
namespace {

using json = nlohmann::json;

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

json label_json(const std::optional<char>& l) { return l ? json(std::string(1, *l)) : json(nullptr); }

}  // namespace

ToolCallStats tool_call_stats(const std::vector<TraceSummary>& traces, int max_assessments) {
  if (max_assessments < 1) throw Error(ErrorKind::InvalidArgument, "max_assessments must be >= 1");
  ToolCallStats s;
  s.histogram.assign(static_cast<std::size_t>(max_assessments), 0.0);
  if (traces.empty()) return s;
  s.empty = false;
  s.sessions = static_cast<int>(traces.size());

  std::vector<int> counts(s.histogram.size(), 0);
  std::map<QuestionType, int> type_sessions;
  std::map<QuestionType, int> type_calls;
  std::map<QuestionType, std::map<std::string, int>> type_tool_calls;
  std::map<std::string, int> tool_calls;
  long long total = 0;
  for (const auto& t : traces) {
    const int k = t.total_calls();
    if (k > max_assessments - 1) {
      throw Error(ErrorKind::InvalidArgument, "session '" + t.item_id + "' made " + std::to_string(k) +
                                                  " tool calls, more than T-1 = " +
                                                  std::to_string(max_assessments - 1));
    }
    ++counts[static_cast<std::size_t>(k)];
    total += k;
    s.max_calls = std::max(s.max_calls, k);
    ++type_sessions[t.question_type];
    type_calls[t.question_type] += k;
    for (const auto& [name, c] : t.tool_calls) {
      type_tool_calls[t.question_type][name] += c;
      tool_calls[name] += c;
    }
  }
  for (std::size_t k = 0; k < counts.size(); ++k) s.histogram[k] = static_cast<double>(counts[k]) / s.sessions;
  s.mean_calls = static_cast<double>(total) / s.sessions;
  for (const auto& [type, n] : type_sessions) {
    s.per_type_mean[type] = static_cast<double>(type_calls[type]) / n;
    auto& per_tool = s.per_type_tool_mean[type];
    for (auto kind : kAllTools) per_tool[std::string(tool_name(kind))] = 0.0;
    for (const auto& [name, c] : type_tool_calls[type]) per_tool[name] = static_cast<double>(c) / n;
  }
  for (auto kind : kAllTools) s.per_tool_mean[std::string(tool_name(kind))] = 0.0;
  for (const auto& [name, c] : tool_calls) s.per_tool_mean[name] = static_cast<double>(c) / s.sessions;
  return s;
}

EvalReport aggregate(std::vector<ItemOutcome> outcomes, const std::vector<TraceSummary>& digests,
                     int max_assessments) {
  std::sort(outcomes.begin(), outcomes.end(),
            [](const ItemOutcome& a, const ItemOutcome& b) { return a.item_id < b.item_id; });
  EvalReport r;
  r.total = static_cast<int>(outcomes.size());
  double runtime_sum = 0.0;
  for (const auto& o : outcomes) {
    if (o.error) ++r.errors;
    runtime_sum += o.runtime_ms;
    r.runtime.max_ms = std::max(r.runtime.max_ms, o.runtime_ms);
    if (!o.gold) continue;
    ++r.scored;
    auto& bucket = r.per_type[o.question_type];
    ++bucket.scored;
    if (o.correct) {
      ++r.correct;
      ++bucket.correct;
    }
  }
  r.unscored = r.total - r.scored;
  r.accuracy = r.scored == 0 ? 0.0 : static_cast<double>(r.correct) / r.scored;
  r.runtime.mean_ms = r.total == 0 ? 0.0 : runtime_sum / r.total;
  r.tools = tool_call_stats(digests, max_assessments);
  r.items = std::move(outcomes);
  return r;
}

json report_to_json(const EvalReport& report, bool include_runtime) {
  json j;
  j["total"] = report.total;
  j["scored"] = report.scored;
  j["unscored"] = report.unscored;
  j["correct"] = report.correct;
  j["errors"] = report.errors;
  j["accuracy"] = report.accuracy;
  json per_type = json::object();
  for (const auto& [type, acc] : report.per_type) {
    per_type[std::string(to_string(type))] = {
        {"correct", acc.correct}, {"scored", acc.scored}, {"accuracy", acc.accuracy()}};
  }
  j["per_type"] = per_type;

  const auto& t = report.tools;
  json tools;
  tools["sessions"] = t.sessions;
  tools["histogram"] = t.histogram;
  tools["mean_calls"] = t.mean_calls;
  tools["max_calls"] = t.max_calls;
  json ptm = json::object(), pttm = json::object();
  for (const auto& [type, v] : t.per_type_mean) ptm[std::string(to_string(type))] = v;
  for (const auto& [type, m] : t.per_type_tool_mean) pttm[std::string(to_string(type))] = m;
  tools["per_type_mean"] = ptm;
  tools["per_type_tool_mean"] = pttm;
  tools["per_tool_mean"] = t.per_tool_mean;
  j["tools"] = tools;

  json items = json::array();
  for (const auto& o : report.items) {
    json i;
    i["item_id"] = o.item_id;
    i["type"] = to_string(o.question_type);
    i["predicted"] = label_json(o.predicted);
    i["gold"] = label_json(o.gold);
    i["correct"] = o.correct;
    i["error"] = o.error ? json(*o.error) : json(nullptr);
    i["tool_calls"] = o.tool_calls;
    i["terminated_by"] = o.terminated_by;
    if (include_runtime) i["runtime_ms"] = o.runtime_ms;
    items.push_back(std::move(i));
  }
  j["items"] = items;
  if (include_runtime) j["runtime"] = {{"mean_ms", report.runtime.mean_ms}, {"max_ms", report.runtime.max_ms}};
  return j;
}

std::string format_report(const EvalReport& report) {
  std::string out;
  out += "items " + std::to_string(report.total) + " (scored " + std::to_string(report.scored) + ", unscored " +
         std::to_string(report.unscored) + ", errors " + std::to_string(report.errors) + ")\n";
  out += "accuracy " + fixed(100.0 * report.accuracy, 1) + "% (" + std::to_string(report.correct) + "/" +
         std::to_string(report.scored) + ")\n";
  for (const auto& [type, acc] : report.per_type) {
    out += "  " + std::string(to_string(type)) + ": " + fixed(100.0 * acc.accuracy(), 1) + "% (" +
           std::to_string(acc.correct) + "/" + std::to_string(acc.scored) + ")\n";
  }
  const auto& t = report.tools;
  out += "tool calls: mean " + fixed(t.mean_calls, 3) + ", max " + std::to_string(t.max_calls) + "\n";
  for (std::size_t k = 0; k < t.histogram.size(); ++k) {
    out += "  " + std::to_string(k) + " calls: " + fixed(100.0 * t.histogram[k], 1) + "%\n";
  }
  for (const auto& [name, mean] : t.per_tool_mean) out += "  " + name + ": " + fixed(mean, 3) + " per question\n";
  for (const auto& [type, mean] : t.per_type_mean) {
    out += "  " + std::string(to_string(type)) + " questions: " + fixed(mean, 3) + " calls on average\n";
  }
  out += "runtime: mean " + fixed(report.runtime.mean_ms, 1) + " ms, max " + fixed(report.runtime.max_ms, 1) + " ms\n";
  return out;
}

EvalRun evaluate(const std::vector<MCQItem>& items, const SessionConfig& cfg, const EnvironmentProvider& provider,
                 int concurrency) {
  validate(cfg);
  if (concurrency < 1) throw Error(ErrorKind::InvalidArgument, "concurrency must be >= 1");
  std::vector<MCQItem> sorted = items;
  std::sort(sorted.begin(), sorted.end(), [](const MCQItem& a, const MCQItem& b) { return a.item_id < b.item_id; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].item_id == sorted[i - 1].item_id) {
      throw Error(ErrorKind::InvalidArgument, "duplicate item id '" + sorted[i].item_id + "'");
    }
  }

  std::vector<ItemOutcome> outcomes(sorted.size());
  std::vector<std::vector<json>> traces(sorted.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < sorted.size(); i = next++) {
      const auto& item = sorted[i];
      auto& o = outcomes[i];
      o.item_id = item.item_id;
      o.question_type = item.question_type;
      o.gold = item.gold_label;
      const auto start = std::chrono::steady_clock::now();
      try {
        auto env = provider(item, cfg);
        if (!env.registry || !env.captioner || !env.llm) {
          throw Error(ErrorKind::Config, "environment for '" + item.item_id + "' is incomplete");
        }
        auto result = run_session(env.manifest, item, cfg, SessionDeps{*env.registry, *env.captioner, *env.llm});
        o.predicted = result.final_answer.option_label;
        o.tool_calls = static_cast<int>(result.tool_records.size());
        o.terminated_by = std::string(to_string(result.terminated_by));
        traces[i] = std::move(result.trace);
      } catch (const std::exception& e) {
        o.error = e.what();
        o.terminated_by = "error";
        json header;
        header["event"] = "session";
        header["item_id"] = item.item_id;
        header["question_type"] = to_string(item.question_type);
        json err;
        err["event"] = "error";
        err["message"] = e.what();
        traces[i] = {header, err};
      }
      o.correct = !o.error && o.gold && o.predicted == o.gold;
      o.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
  };
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(concurrency), sorted.size());
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  std::vector<TraceSummary> digests;
  for (const auto& t : traces) digests.push_back(summarize_trace(t));
  EvalRun run;
  run.report = aggregate(std::move(outcomes), digests, cfg.max_assessments);
  run.traces = std::move(traces);
  return run;
}

std::vector<AblationRow> ablation_run(const std::vector<MCQItem>& items, const SessionConfig& base,
                                      const EnvironmentProvider& provider, int concurrency, AblationMode mode) {
  std::vector<AblationRow> rows;
  for (int k = 0; k <= 4; ++k) {
    AblationRow row;
    row.name = k == 0 ? "baseline" : "setting" + std::to_string(k);
    row.flags = mode == AblationMode::Stacked ? AblationFlags::stacked(k) : AblationFlags::isolated(k);
    SessionConfig cfg = base;
    cfg.ablation = row.flags;
    row.report = evaluate(items, cfg, provider, concurrency).report;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_ablation(const std::vector<AblationRow>& rows) {
  std::string out = "setting    conf plan cot tools  accuracy  mean_calls\n";
  for (const auto& r : rows) {
    auto mark = [](bool removed) { return removed ? std::string("  - ") : std::string("  + "); };
    std::string name = r.name;
    name.resize(10, ' ');
    out += name + " " + mark(r.flags.no_tool_confidence) + " " + mark(r.flags.no_plan_adjust) + mark(r.flags.no_cot) +
           mark(r.flags.no_tools) + "   " + fixed(100.0 * r.report.accuracy, 1) + "%     " +
           fixed(r.report.tools.mean_calls, 3) + "\n";
  }
  return out;
}

EnvironmentProvider suite_environment(const std::filesystem::path& root, std::shared_ptr<LlmGateway> llm) {
  return [root, llm](const MCQItem& item, const SessionConfig& cfg) {
    const auto videos = root / "videos";
    SessionEnvironment env;
    env.manifest = load_manifest(videos / (item.video_id + ".manifest"));
    auto backend = std::make_shared<SimulatedToolBackend>(load_scene(videos / (item.video_id + ".scene")), cfg.fusion);
    env.registry = std::make_shared<ToolRegistry>();
    env.registry->add_all(backend);
    env.captioner = load_caption_fixture(videos / (item.video_id + ".captions"));
    env.llm = llm ? llm
                  : std::make_shared<LlmGateway>(script_from_fixture(root / "llm" / (item.item_id + ".script")),
                                                 cfg.gateway);
    return env;
  };
}

}  // namespace longvid
