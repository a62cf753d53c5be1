#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace longvid {

using FrameIndex = std::int64_t;

/// A decoded (or synthesized) downsampled frame. Pixels are 8-bit grayscale,
/// row-major.
struct Frame {
  FrameIndex id = 0;
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;
};

/// Resolves downsampled frame ids to images. The engine never decodes video
/// itself; implementations must tolerate concurrent calls.
class FrameSource {
 public:
  virtual ~FrameSource() = default;
  virtual FrameIndex frame_count() const = 0;
  virtual int width() const = 0;
  virtual int height() const = 0;
  virtual Frame frame(FrameIndex id) const = 0;
};

/// Deterministic procedural frames: pixel value is a hash of (frame, x, y).
class SyntheticFrameSource final : public FrameSource {
 public:
  SyntheticFrameSource(FrameIndex count, int width, int height);

  FrameIndex frame_count() const override { return count_; }
  int width() const override { return width_; }
  int height() const override { return height_; }
  Frame frame(FrameIndex id) const override;

 private:
  FrameIndex count_;
  int width_;
  int height_;
};

struct VideoManifest {
  std::string video_id;
  double length_s = 0.0;
  double native_fps = 0.0;
  /// Frame directory or any other locator understood by the frame backend.
  std::string source;
  int width = 640;
  int height = 480;
};

/// Reads the `key = value` manifest format. Unknown keys are rejected so typos
/// do not silently fall back to defaults.
VideoManifest parse_manifest(const std::string& text);
VideoManifest load_manifest(const std::filesystem::path& path);
std::string format_manifest(const VideoManifest& manifest);

struct SegmentSpan {
  int segment_id = 0;
  FrameIndex start_frame = 0;
  FrameIndex end_frame = 0;  // inclusive
  double start_s = 0.0;
  double end_s = 0.0;
};

struct SegmentPlan {
  double fps_d = 0.0;
  double n = 0.0;
  FrameIndex total_frames = 0;
  std::vector<SegmentSpan> segments;
};

/// Splits a video of `length_s` seconds, downsampled to `fps_d`, into
/// successive segments of `n` seconds. The final segment may be shorter.
/// Throws InvalidArgument for non-positive inputs, for a video shorter than
/// one downsampled frame, and when a segment would hold less than one frame.
SegmentPlan plan_segments(double length_s, double fps_d, double n);

double frame_to_time(FrameIndex frame_id, double fps_d);
FrameIndex time_to_frame(double t, double fps_d);

}  // namespace longvid
