#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "longvid/tool_protocol.hpp"

namespace longvid {

struct FusionParams {
  /// Half-width, in frames, of the window searched around the target frame.
  int alpha = 5;
  /// Detector score a sighting must exceed to seed the tracker.
  double init_conf_thr = 0.5;
};

/// Binary segmentation mask, row-major, nonzero = set.
struct Mask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> cells;

  bool at(int x, int y) const { return cells[static_cast<std::size_t>(y) * width + x] != 0; }
  void set(int x, int y) { cells[static_cast<std::size_t>(y) * width + x] = 1; }
  static Mask empty(int width, int height);
};

/// Tight inclusive box over the set cells. Throws InvalidArgument on an empty
/// mask.
BBox bbox_from_mask(const Mask& mask);

class Detector {
 public:
  virtual ~Detector() = default;
  virtual std::vector<DetInfo> detect(FrameIndex frame) const = 0;
};

/// Per-frame tracker output. A tracker reports either a box or a mask.
struct TrackEntry {
  FrameIndex frame_id = 0;
  bool lost = false;
  std::optional<BBox> box;
  std::optional<Mask> mask;
  double confidence = 0.0;
};

class Tracker {
 public:
  virtual ~Tracker() = default;
  /// Propagates the object seeded at (`init_frame`, `init_box`) forwards and
  /// backwards across `range`. Returns one entry per frame of `range`; frames
  /// the tracker could not follow are marked lost.
  virtual std::vector<TrackEntry> track(FrameIndex init_frame, const BBox& init_box,
                                        const FrameRange& range) const = 0;
};

struct FusedDetections {
  std::vector<DetInfo> detections;
  std::vector<std::string> notes;
};

/// Multi-round detection for frame `m`: detect over [m-alpha, m+alpha]
/// (clipped to the video), seed the tracker per class at its most confident
/// sighting above threshold (earliest frame on ties) and report the tracked
/// box at `m`. Classes that never clear the threshold are omitted; a track
/// lost at `m` is omitted with a note. Detections come back sorted by class
/// name with ids "0", "1", ...
FusedDetections detect_multiround(FrameIndex m, const FusionParams& params,
                                  const Detector& detector, const Tracker& tracker,
                                  FrameIndex total_frames);

struct Trajectory {
  std::vector<TrackPoint> points;
  std::vector<std::string> notes;
};

/// Name-initialized tracking: the first frame (scanning forward) whose best
/// `name` detection exceeds the threshold seeds a bidirectional track over the
/// whole range.
Trajectory track_by_name(const std::string& name, const FrameRange& range,
                         const Detector& detector, const Tracker& tracker,
                         const FusionParams& params);

}  // namespace longvid
