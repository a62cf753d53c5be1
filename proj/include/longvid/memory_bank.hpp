#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "longvid/tool_protocol.hpp"

namespace longvid {

struct SegmentCaption {
  int segment_id = 0;
  double start_s = 0.0;
  double end_s = 0.0;
  FrameIndex start_frame = 0;
  FrameIndex end_frame = 0;
  std::string text;

  bool operator==(const SegmentCaption&) const = default;
};

struct VideoSummary {
  std::string text;
  int source_caption_count = 0;

  bool operator==(const VideoSummary&) const = default;
};

/// Everything known about one video: captions and summary from the context
/// phase plus every tool record retrieved since. Captions and summary are
/// fixed at construction; tool records are append-only.
class MemoryBank {
 public:
  MemoryBank() = default;
  MemoryBank(std::vector<SegmentCaption> captions, VideoSummary summary);

  const std::vector<SegmentCaption>& captions() const { return captions_; }
  const VideoSummary& summary() const { return summary_; }
  const std::vector<ToolRecord>& tool_records() const { return records_; }
  bool has_context() const { return !captions_.empty(); }

  /// Appends in place. Throws Ordering if `record.step_t` is below the last
  /// record's step.
  void append(ToolRecord record);

  bool operator==(const MemoryBank&) const = default;

 private:
  std::vector<SegmentCaption> captions_;
  VideoSummary summary_;
  std::vector<ToolRecord> records_;
};

/// Value-returning merge: the input bank is left untouched.
MemoryBank merge(MemoryBank bank, ToolRecord new_info);

struct RenderOptions {
  /// Drop every confidence annotation from tool evidence.
  bool strip_tool_confidence = false;
};

/// "segment 3 (12-16 s, frames 12-15): text". The caption line format used
/// both here and in the summary prompt.
std::string format_caption_line(const SegmentCaption& caption);

/// Deterministic text for the {B} placeholder: 'Caption', 'Summary' and
/// 'Tools return value' blocks in that order.
std::string render_for_prompt(const MemoryBank& bank,
                              const RenderOptions& options = {});

/// Line-delimited snapshot, one JSON record per line tagged
/// caption | summary | tool.
std::string snapshot(const MemoryBank& bank);
MemoryBank load_snapshot(const std::string& text);
void save_snapshot(const MemoryBank& bank, const std::filesystem::path& path);

}  // namespace longvid
