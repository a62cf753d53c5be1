#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "longvid/detection_fusion.hpp"
#include "longvid/tool_protocol.hpp"

namespace longvid {

/// Detector backed by a (frame, class) -> (bbox, confidence) table.
class TableDetector final : public Detector {
 public:
  struct Row {
    FrameIndex frame = 0;
    std::string name;
    BBox bbox;
    double confidence = 0.0;
  };

  TableDetector() = default;
  explicit TableDetector(std::vector<Row> rows);

  void add(Row row);
  std::vector<DetInfo> detect(FrameIndex frame) const override;
  const std::vector<Row>& rows() const { return rows_; }

 private:
  std::vector<Row> rows_;
};

/// Tracker backed by an (init_frame, init_box, frame) -> (bbox, confidence |
/// LOST) table. A missing entry is reported lost, except at the init frame
/// itself, where the seed box is echoed with confidence 1.0.
class TableTracker final : public Tracker {
 public:
  struct Row {
    FrameIndex init_frame = 0;
    BBox init_box;
    FrameIndex frame = 0;
    bool lost = false;
    BBox bbox;
    double confidence = 0.0;
  };

  TableTracker() = default;
  explicit TableTracker(std::vector<Row> rows);

  void add(Row row);
  std::vector<TrackEntry> track(FrameIndex init_frame, const BBox& init_box,
                                const FrameRange& range) const override;
  const std::vector<Row>& rows() const { return rows_; }

 private:
  using Key = std::tuple<FrameIndex, double, double, double, double, FrameIndex>;
  static Key key(FrameIndex init_frame, const BBox& box, FrameIndex frame);

  std::vector<Row> rows_;
  std::map<Key, std::size_t> index_;
};

/// Everything a simulated tool service knows about one video.
struct SceneFixture {
  FrameIndex total_frames = 0;
  int width = 640;
  int height = 480;
  std::map<FrameIndex, std::string> captions;
  /// Keyed by (frame, formatted bbox) so a zoom on a specific area can be
  /// scripted; a frame-only entry uses an empty bbox key.
  std::map<std::pair<FrameIndex, std::string>, std::string> zoom_captions;
  TableDetector detector;
  TableTracker tracker;
};

/// Parses the tabular scene format:
///   frames 60
///   size 640 480
///   caption <frame> <text...>
///   zoomcaption <frame> [xmin, ymin, xmax, ymax] <text...>
///   det <frame> <class> <xmin> <ymin> <xmax> <ymax> <conf>
///   trk <init_frame> <class> <frame> <xmin> <ymin> <xmax> <ymax> <conf>
///   trk <init_frame> <class> <frame> LOST
/// A trk record follows the track seeded by the most confident earlier det
/// record of <class> at <init_frame>. Blank lines and '#' comments are
/// ignored. Class names use '_' for spaces.
SceneFixture parse_scene(const std::string& text);
SceneFixture load_scene(const std::filesystem::path& path);

/// Serves all five tools from a scene fixture, running the fusion recipes
/// over the table detector and tracker. Counts invocations per tool.
class SimulatedToolBackend final : public ToolBackend {
 public:
  SimulatedToolBackend(SceneFixture scene, FusionParams params);

  ToolReturn invoke(const ToolCommand& command) override;

  int calls(ToolKind kind) const;
  int total_calls() const;
  const SceneFixture& scene() const { return scene_; }

 private:
  ToolReturn caption(const ToolCommand& command) const;
  ToolReturn detect(const ToolCommand& command) const;
  ToolReturn track(const ToolCommand& command) const;

  SceneFixture scene_;
  FusionParams params_;
  mutable std::mutex mutex_;
  std::map<ToolKind, int> calls_;
};

}  // namespace longvid
