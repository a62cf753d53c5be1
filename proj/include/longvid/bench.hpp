#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "longvid/orchestrator.hpp"
#include "longvid/question.hpp"
#include "longvid/trace.hpp"

namespace longvid {

enum class DatasetFormat { Generic, EgoSchema, NextQA, IntentQA };

DatasetFormat dataset_format_from_string(std::string_view name);

/// Normalizes a dataset file into MCQItems. Throws Schema with file:line
/// context on malformed records.
///  - generic:   JSON lines {item_id, video_id, question, options, answer?, type?}
///  - egoschema: JSON array or lines {q_uid, question, "option 0".."option 4", answer?}
///  - nextqa / intentqa: CSV with video, question, answer, qid, type, a0..a4
std::vector<MCQItem> load_dataset(const std::filesystem::path& path, DatasetFormat format);
std::vector<MCQItem> parse_dataset(const std::string& text, DatasetFormat format,
                                   const std::string& source_name = "<memory>");

struct TypeAccuracy {
  int correct = 0;
  int scored = 0;
  double accuracy() const { return scored == 0 ? 0.0 : static_cast<double>(correct) / scored; }
  bool operator==(const TypeAccuracy&) const = default;
};

struct ToolCallStats {
  bool empty = true;
  int sessions = 0;
  /// Index k = share of sessions with exactly k tool calls, k in 0..T-1.
  std::vector<double> histogram;
  double mean_calls = 0.0;
  int max_calls = 0;
  std::map<QuestionType, double> per_type_mean;
  std::map<QuestionType, std::map<std::string, double>> per_type_tool_mean;
  std::map<std::string, double> per_tool_mean;

  bool operator==(const ToolCallStats&) const = default;
};

/// Histogram and means over session digests. Throws InvalidArgument if any
/// session used more than T-1 tools.
ToolCallStats tool_call_stats(const std::vector<TraceSummary>& traces, int max_assessments);

struct RuntimeStats {
  double mean_ms = 0.0;
  double max_ms = 0.0;
};

struct ItemOutcome {
  std::string item_id;
  QuestionType question_type = QuestionType::Unknown;
  std::optional<char> predicted;
  std::optional<char> gold;
  bool correct = false;
  std::optional<std::string> error;
  int tool_calls = 0;
  std::string terminated_by;
  double runtime_ms = 0.0;

  bool operator==(const ItemOutcome&) const = default;
};

struct EvalReport {
  int total = 0;
  int scored = 0;
  int unscored = 0;
  int correct = 0;
  int errors = 0;
  double accuracy = 0.0;
  std::map<QuestionType, TypeAccuracy> per_type;
  ToolCallStats tools;
  RuntimeStats runtime;
  std::vector<ItemOutcome> items;  // sorted by item_id
};

/// JSON view of a report; runtime fields are left out unless asked for so
/// two runs of the same suite compare equal.
nlohmann::json report_to_json(const EvalReport& report, bool include_runtime = false);
std::string format_report(const EvalReport& report);

/// Per-item collaborators. Called once per item, possibly from several
/// threads at once.
struct SessionEnvironment {
  VideoManifest manifest;
  std::shared_ptr<ToolRegistry> registry;
  std::shared_ptr<ClipCaptioner> captioner;
  std::shared_ptr<LlmGateway> llm;
};
using EnvironmentProvider =
    std::function<SessionEnvironment(const MCQItem&, const SessionConfig&)>;

struct EvalRun {
  EvalReport report;
  std::vector<std::vector<nlohmann::json>> traces;  // sorted by item_id
};

/// Runs every item with at most `concurrency` sessions in flight. Session
/// failures are scored as incorrect-with-error; aggregation folds over
/// results sorted by item_id.
EvalRun evaluate(const std::vector<MCQItem>& items, const SessionConfig& cfg,
                 const EnvironmentProvider& provider, int concurrency);

/// Builds a report from already-finished outcomes and digests.
EvalReport aggregate(std::vector<ItemOutcome> outcomes,
                     const std::vector<TraceSummary>& digests, int max_assessments);

enum class AblationMode { Stacked, Isolated };

struct AblationRow {
  std::string name;  // "baseline", "setting1".."setting4"
  AblationFlags flags;
  EvalReport report;
};

/// Baseline plus settings 1..4, in that order.
std::vector<AblationRow> ablation_run(const std::vector<MCQItem>& items,
                                     const SessionConfig& base,
                                     const EnvironmentProvider& provider, int concurrency,
                                     AblationMode mode = AblationMode::Stacked);
std::string format_ablation(const std::vector<AblationRow>& rows);

/// Directory-backed environment: videos/<id>.manifest, videos/<id>.scene,
/// videos/<id>.captions and, unless `llm` is given, llm/<item_id>.script.
EnvironmentProvider suite_environment(const std::filesystem::path& root,
                                      std::shared_ptr<LlmGateway> llm = nullptr);

}  // namespace longvid
