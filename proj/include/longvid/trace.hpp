#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "longvid/llm_gateway.hpp"
#include "longvid/question.hpp"
#include "longvid/tool_protocol.hpp"

namespace longvid {

/// 64-bit FNV-1a, rendered as 16 hex digits. Used for prompt fingerprints.
std::string fingerprint(std::string_view text);

std::string to_jsonl(const std::vector<nlohmann::json>& events);
std::vector<nlohmann::json> parse_jsonl(const std::string& text);
void write_trace(const std::vector<nlohmann::json>& events, const std::filesystem::path& path);
std::vector<nlohmann::json> read_trace(const std::filesystem::path& path);

/// Per-question digest used by the analytics.
struct TraceSummary {
  std::string item_id;
  QuestionType question_type = QuestionType::Unknown;
  /// Tool name -> number of dispatches.
  std::map<std::string, int> tool_calls;

  int total_calls() const;
};

/// Reads the "session" header and "tool" events of one session trace.
TraceSummary summarize_trace(const std::vector<nlohmann::json>& events);

/// A backend that replays the assistant replies recorded in a trace, in order.
std::shared_ptr<ScriptedBackend> replay_llm(const std::vector<nlohmann::json>& events);

/// Replays recorded tool returns in order; commands must match the recording.
class ReplayToolBackend final : public ToolBackend {
 public:
  explicit ReplayToolBackend(const std::vector<nlohmann::json>& events);
  ToolReturn invoke(const ToolCommand& command) override;

 private:
  std::mutex mutex_;
  std::vector<std::pair<ToolCommand, ToolReturn>> recorded_;
  std::size_t next_ = 0;
};

}  // namespace longvid
