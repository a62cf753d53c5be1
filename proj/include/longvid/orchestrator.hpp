#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "longvid/assessor.hpp"
#include "longvid/context_builder.hpp"
#include "longvid/detection_fusion.hpp"
#include "longvid/llm_gateway.hpp"
#include "longvid/memory_bank.hpp"
#include "longvid/planner.hpp"
#include "longvid/question.hpp"
#include "longvid/segmenter.hpp"
#include "longvid/tool_protocol.hpp"

namespace longvid {

struct AblationFlags {
  bool no_tool_confidence = false;
  bool no_plan_adjust = false;
  bool no_cot = false;
  bool no_tools = false;

  /// Setting k in 1..4 with every lower setting also applied; 0 is the full
  /// system.
  static AblationFlags stacked(int setting);
  /// Setting k in 1..4 alone.
  static AblationFlags isolated(int setting);

  bool operator==(const AblationFlags&) const = default;
};

struct SessionConfig {
  double fps_d = 1.0;
  double n = 4.0;
  int cf_thr = 5;
  int max_assessments = 5;  // T
  FusionParams fusion{};
  AblationFlags ablation{};
  GatewayConfig gateway{};
  int caption_concurrency = 1;
  /// Wall-clock budget per session; zero disables the check.
  std::chrono::milliseconds timeout{0};
};

/// Throws InvalidArgument when a field is outside its allowed range.
void validate(const SessionConfig& cfg);

enum class Termination { ConfidenceMet, BudgetExhausted, PlannerFallback };

std::string_view to_string(Termination termination);

struct AssessmentStep {
  int t = 1;
  AnswerCandidate candidate;
  Decision decision = Decision::Retrieve;
};

struct SessionResult {
  std::string item_id;
  AnswerCandidate final_answer;
  std::vector<AssessmentStep> assessments;
  std::vector<ToolRecord> tool_records;
  Termination terminated_by = Termination::BudgetExhausted;
  MemoryBank bank;
  /// Every turn of the question conversation (the summary call has its own).
  std::vector<Turn> transcript;
  /// Ordered event log; see trace.hpp for persistence.
  std::vector<nlohmann::json> trace;
  std::vector<std::string> warnings;
};

/// Hooks into the session's collaborators. The gateway may be shared between
/// sessions; the registry's backends must tolerate concurrent calls.
struct SessionDeps {
  ToolRegistry& registry;
  ClipCaptioner& captioner;
  LlmGateway& llm;
};

/// Runs one question end to end: context once, then up to T rounds of
/// assess -> (plan or adjust) -> dispatch -> merge. Throws Context when the
/// context phase fails and Timeout when the configured budget runs out.
SessionResult run_session(const VideoManifest& manifest, const MCQItem& question,
                          const SessionConfig& cfg, SessionDeps deps);

}  // namespace longvid
