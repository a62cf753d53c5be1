#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "longvid/segmenter.hpp"

namespace longvid {

/// Inclusive range of downsampled frame ids.
struct FrameRange {
  FrameIndex start = 0;
  FrameIndex end = 0;

  FrameIndex size() const { return end - start + 1; }
  bool contains(FrameIndex f) const { return f >= start && f <= end; }
  bool operator==(const FrameRange&) const = default;
};

/// Pixel-space box, corners inclusive.
struct BBox {
  double xmin = 0;
  double ymin = 0;
  double xmax = 0;
  double ymax = 0;

  bool operator==(const BBox&) const = default;
};

enum class ToolKind { Caption, Detect, ZoomCaption, ZoomDetect, Track };

inline constexpr std::array<ToolKind, 5> kAllTools = {
    ToolKind::Caption, ToolKind::Detect, ToolKind::ZoomCaption,
    ToolKind::ZoomDetect, ToolKind::Track};

/// The exact tool names the LLM sees in the tool descriptions.
std::string_view tool_name(ToolKind kind);
std::optional<ToolKind> tool_from_name(std::string_view name);
bool is_zoom(ToolKind kind);

struct ToolCommand {
  ToolKind kind = ToolKind::Caption;
  FrameRange frame_range;
  std::optional<BBox> bbox;  // zoom variants only
  std::string object_name;   // Track only

  bool operator==(const ToolCommand&) const = default;
};

struct CaptionClause {
  std::string text;
  double confidence = 1.0;
  /// False for trailing text that carried no (confidence=..) marker.
  bool annotated = true;

  bool operator==(const CaptionClause&) const = default;
};

struct DetInfo {
  std::string id;
  std::string name;
  BBox bbox;
  double confidence = 0.0;

  bool operator==(const DetInfo&) const = default;
};

struct TrackPoint {
  FrameIndex frame_id = 0;
  std::string object_name;
  BBox bbox;
  double confidence = 0.0;

  bool operator==(const TrackPoint&) const = default;
};

struct CaptionFrame {
  FrameIndex frame_id = 0;
  std::optional<BBox> zoom_bbox;
  std::vector<CaptionClause> clauses;

  bool operator==(const CaptionFrame&) const = default;
};

struct DetectFrame {
  FrameIndex frame_id = 0;
  std::optional<BBox> zoom_bbox;
  std::vector<DetInfo> detections;

  bool operator==(const DetectFrame&) const = default;
};

/// Tool output. Only the payload vector matching `kind` is populated.
struct ToolReturn {
  ToolKind kind = ToolKind::Caption;
  std::vector<CaptionFrame> captions;
  std::vector<DetectFrame> detections;
  std::vector<TrackPoint> track;
  /// Backend-side notes for the LLM (lost tracks, target not found, ...).
  std::vector<std::string> notes;
  std::optional<std::string> error;
  /// Set when dispatch had to repair the payload (clamped confidences,
  /// dropped out-of-range frames).
  bool sanitized = false;

  bool operator==(const ToolReturn&) const = default;
};

// ---------------------------------------------------------------------------
// Text formats

/// Splits a caption at each "(confidence=<float>)" marker. Leading clause
/// separators and whitespace are trimmed; an unmarked tail becomes a clause
/// with confidence 1.0 and `annotated == false`. Out-of-range values are
/// clamped into [0, 1].
std::vector<CaptionClause> parse_caption_confidences(std::string_view text);

/// Inverse of parse_caption_confidences up to separator choice and two-decimal
/// rounding of confidences.
std::string format_caption(const std::vector<CaptionClause>& clauses,
                           bool with_confidence = true);

/// "19" -> [19,19], "10-30" -> [10,30]. With `total_frames` set, also
/// checks bounds. Throws Malformed, StartAfterEnd or OutOfBounds.
FrameRange parse_frame_range(std::string_view text,
                             std::optional<FrameIndex> total_frames = {});
std::string format_frame_range(const FrameRange& range);

/// Accepts "[xmin, ymin, xmax, ymax]" with or without brackets. Commands
/// need a positive-area box; tracker and detector outputs may be a single
/// pixel (corners inclusive), so `allow_degenerate` permits min == max.
BBox parse_bbox(std::string_view text, bool allow_degenerate = false);
std::string format_bbox(const BBox& box);
std::string format_number(double value);
std::string format_confidence(double value);

/// The command exactly as printed in the tool description, e.g.
/// {'tool_name': 'Object Tracking Tool', 'object_name': 'phone', 'frame_range': '10-30'}
std::string format_command(const ToolCommand& command);

struct SerializeOptions {
  bool with_confidence = true;
};

/// Renders tool returns in the dictionary shapes of the tool descriptions so
/// the LLM reads the documented format.
std::string serialize_return(const ToolReturn& ret,
                             const SerializeOptions& options = {});

// ---------------------------------------------------------------------------
// Wire protocol (request/response JSON used by remote tool services)

std::string encode_request(const ToolCommand& command);
ToolCommand decode_request(std::string_view body);
std::string encode_response(const ToolReturn& ret);
/// `command` supplies the kind and zoom bbox context of the response.
ToolReturn decode_response(std::string_view body, const ToolCommand& command);

// ---------------------------------------------------------------------------
// Dispatch

class ToolBackend {
 public:
  virtual ~ToolBackend() = default;
  virtual ToolReturn invoke(const ToolCommand& command) = 0;
};

class ToolRegistry {
 public:
  void add(ToolKind kind, std::shared_ptr<ToolBackend> backend);
  /// Registers one backend for all five tools.
  void add_all(const std::shared_ptr<ToolBackend>& backend);
  ToolBackend* find(ToolKind kind) const;
  bool has_all() const;

 private:
  std::map<ToolKind, std::shared_ptr<ToolBackend>> backends_;
};

struct ToolRecord {
  int step_t = 1;
  ToolCommand command;
  ToolReturn returns;
  double wall_time_ms = 0.0;

  bool operator==(const ToolRecord&) const = default;
};

/// Checks a parsed command against the video: range bounds, single-frame zoom
/// and bbox inside the image. Throws with the matching ErrorKind.
void validate_command(const ToolCommand& command, FrameIndex total_frames,
                      int image_width, int image_height);

/// Invokes exactly one backend. Backend exceptions become an error payload
/// rather than propagating; an unregistered kind throws Config.
ToolRecord dispatch(const ToolCommand& command, const ToolRegistry& registry,
                    int step_t);

/// Clamps confidences into [0, 1] and drops payload elements outside the
/// command's frame range. Sets `sanitized` when anything changed.
void sanitize_return(ToolReturn& ret, const ToolCommand& command);

}  // namespace longvid
