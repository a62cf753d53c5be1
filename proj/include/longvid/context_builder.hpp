#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "longvid/llm_gateway.hpp"
#include "longvid/memory_bank.hpp"
#include "longvid/segmenter.hpp"

namespace longvid {

/// Produces one caption per segment.
class ClipCaptioner {
 public:
  virtual ~ClipCaptioner() = default;
  virtual std::string caption(const SegmentSpan& segment) = 0;
  /// True when captions use the '#C' / '#O' camera-wearer convention.
  virtual bool egocentric_markers() const = 0;
};

/// Replays captions from a segment_id -> text table. A missing id throws.
class ScriptedCaptioner final : public ClipCaptioner {
 public:
  ScriptedCaptioner(std::map<int, std::string> captions, bool egocentric);

  std::string caption(const SegmentSpan& segment) override;
  bool egocentric_markers() const override { return egocentric_; }

 private:
  std::map<int, std::string> captions_;
  bool egocentric_;
};

/// Fixture: one "<segment_id><TAB><caption>" per line; an optional first line
/// "#markers egocentric" turns the marker flag on.
std::shared_ptr<ScriptedCaptioner> parse_caption_fixture(const std::string& text);
std::shared_ptr<ScriptedCaptioner> load_caption_fixture(const std::filesystem::path& path);

/// Captions a segment by asking an Image Caption Tool backend (local or
/// remote) for the segment's frames and joining the per-frame captions.
class ToolCaptioner final : public ClipCaptioner {
 public:
  ToolCaptioner(std::shared_ptr<ToolBackend> backend, bool egocentric);

  std::string caption(const SegmentSpan& segment) override;
  bool egocentric_markers() const override { return egocentric_; }

 private:
  std::shared_ptr<ToolBackend> backend_;
  bool egocentric_;
};

inline constexpr std::string_view kCaptionUnavailable = "[caption unavailable]";

struct CaptionResult {
  std::vector<SegmentCaption> captions;
  std::vector<std::string> warnings;
};

/// Captions every segment, up to `concurrency` at a time; results are
/// reassembled in segment order. A failing segment gets the placeholder text
/// and a warning.
CaptionResult caption_all(const SegmentPlan& plan, ClipCaptioner& captioner,
                          int concurrency = 1);

/// "{C}" substitution: one caption line per segment.
std::string format_captions(const std::vector<SegmentCaption>& captions);

/// One-shot summary call in its own conversation. Throws Context if the
/// caption list is empty or the gateway gives up. `prompt_out`, when given,
/// receives the prompt that was sent.
VideoSummary summarize(const std::vector<SegmentCaption>& captions, LlmGateway& llm,
                       double segment_seconds, bool egocentric_markers,
                       std::string* prompt_out = nullptr);

}  // namespace longvid
