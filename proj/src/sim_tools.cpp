#include "longvid/sim_tools.hpp"

#include <algorithm>
#include <sstream>

#include "longvid/error.hpp"
#include "text_util.hpp"

namespace longvid {

TableDetector::TableDetector(std::vector<Row> rows) : rows_(std::move(rows)) {}

void TableDetector::add(Row row) { rows_.push_back(std::move(row)); }

std::vector<DetInfo> TableDetector::detect(FrameIndex frame) const {
  std::vector<DetInfo> out;
  for (const auto& r : rows_) {
    if (r.frame != frame) continue;
    out.push_back({std::to_string(out.size()), r.name, r.bbox, r.confidence});
  }
  return out;
}

TableTracker::TableTracker(std::vector<Row> rows) {
  for (auto& r : rows) add(std::move(r));
}

TableTracker::Key TableTracker::key(FrameIndex init_frame, const BBox& box, FrameIndex frame) {
  return {init_frame, box.xmin, box.ymin, box.xmax, box.ymax, frame};
}

void TableTracker::add(Row row) {
  index_[key(row.init_frame, row.init_box, row.frame)] = rows_.size();
  rows_.push_back(std::move(row));
}

std::vector<TrackEntry> TableTracker::track(FrameIndex init_frame, const BBox& init_box,
                                            const FrameRange& range) const {
  std::vector<TrackEntry> out;
  for (FrameIndex f = range.start; f <= range.end; ++f) {
    TrackEntry e;
    e.frame_id = f;
    auto it = index_.find(key(init_frame, init_box, f));
    if (it != index_.end()) {
      const auto& r = rows_[it->second];
      e.lost = r.lost;
      if (!r.lost) {
        e.box = r.bbox;
        e.confidence = r.confidence;
      }
    } else if (f == init_frame) {
      e.box = init_box;
      e.confidence = 1.0;
    } else {
      e.lost = true;
    }
    out.push_back(std::move(e));
  }
  return out;
}

namespace {

std::string take_word(std::string_view& rest) {
  rest = detail::trim(rest);
  auto end = rest.find_first_of(" \t");
  std::string word(rest.substr(0, end));
  rest = end == std::string_view::npos ? std::string_view{} : rest.substr(end);
  return word;
}

double to_double(const std::string& s, int lineno) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::logic_error&) {
  }
  throw Error(ErrorKind::Schema, "scene line " + std::to_string(lineno) + ": bad number '" + s + "'");
}

FrameIndex to_frame(const std::string& s, int lineno) {
  auto v = to_double(s, lineno);
  if (v < 0 || v != static_cast<double>(static_cast<FrameIndex>(v))) {
    throw Error(ErrorKind::Schema, "scene line " + std::to_string(lineno) + ": bad frame '" + s + "'");
  }
  return static_cast<FrameIndex>(v);
}

BBox take_box(std::string_view& rest, int lineno) {
  double v[4];
  for (double& x : v) x = to_double(take_word(rest), lineno);
  return {v[0], v[1], v[2], v[3]};
}

std::string class_name(std::string raw) {
  std::replace(raw.begin(), raw.end(), '_', ' ');
  return raw;
}

}  // namespace

SceneFixture parse_scene(const std::string& text) {
  SceneFixture scene;
  int lineno = 0;
  for (const auto& raw : detail::split_lines(text)) {
    ++lineno;
    std::string_view rest = detail::trim(raw);
    if (rest.empty() || rest.front() == '#') continue;
    const auto tag = take_word(rest);
    if (tag == "frames") {
      scene.total_frames = to_frame(take_word(rest), lineno);
    } else if (tag == "size") {
      scene.width = static_cast<int>(to_frame(take_word(rest), lineno));
      scene.height = static_cast<int>(to_frame(take_word(rest), lineno));
    } else if (tag == "caption") {
      auto f = to_frame(take_word(rest), lineno);
      scene.captions[f] = std::string(detail::trim(rest));
    } else if (tag == "zoomcaption") {
      auto f = to_frame(take_word(rest), lineno);
      rest = detail::trim(rest);
      std::string key;
      if (!rest.empty() && rest.front() == '[') {
        auto close = rest.find(']');
        if (close == std::string_view::npos) {
          throw Error(ErrorKind::Schema, "scene line " + std::to_string(lineno) + ": unterminated bbox");
        }
        key = format_bbox(parse_bbox(rest.substr(0, close + 1)));
        rest = rest.substr(close + 1);
      }
      scene.zoom_captions[{f, key}] = std::string(detail::trim(rest));
    } else if (tag == "det") {
      TableDetector::Row r;
      r.frame = to_frame(take_word(rest), lineno);
      r.name = class_name(take_word(rest));
      r.bbox = take_box(rest, lineno);
      r.confidence = to_double(take_word(rest), lineno);
      scene.detector.add(std::move(r));
    } else if (tag == "trk") {
      TableTracker::Row r;
      r.init_frame = to_frame(take_word(rest), lineno);
      const auto name = class_name(take_word(rest));
      const TableDetector::Row* seed = nullptr;
      for (const auto& d : scene.detector.rows()) {
        if (d.frame == r.init_frame && d.name == name && (!seed || d.confidence > seed->confidence)) seed = &d;
      }
      if (!seed) {
        throw Error(ErrorKind::Schema, "scene line " + std::to_string(lineno) + ": no det record for '" + name +
                                           "' at frame " + std::to_string(r.init_frame));
      }
      r.init_box = seed->bbox;
      r.frame = to_frame(take_word(rest), lineno);
      auto next = std::string(detail::trim(rest));
      if (next == "LOST") {
        take_word(rest);
        r.lost = true;
      } else {
        r.bbox = take_box(rest, lineno);
        r.confidence = to_double(take_word(rest), lineno);
      }
      scene.tracker.add(std::move(r));
    } else {
      throw Error(ErrorKind::Schema, "scene line " + std::to_string(lineno) + ": unknown record '" + tag + "'");
    }
    if (!detail::trim(rest).empty() && tag != "caption" && tag != "zoomcaption") {
      throw Error(ErrorKind::Schema, "scene line " + std::to_string(lineno) + ": trailing text");
    }
  }
  if (scene.total_frames <= 0) throw Error(ErrorKind::Schema, "scene needs a positive 'frames' record");
  return scene;
}

SceneFixture load_scene(const std::filesystem::path& path) { return parse_scene(detail::read_file(path)); }

SimulatedToolBackend::SimulatedToolBackend(SceneFixture scene, FusionParams params)
    : scene_(std::move(scene)), params_(params) {}

ToolReturn SimulatedToolBackend::invoke(const ToolCommand& command) {
  {
    std::lock_guard lock(mutex_);
    ++calls_[command.kind];
  }
  if (command.frame_range.end >= scene_.total_frames || command.frame_range.start < 0) {
    throw Error(ErrorKind::OutOfBounds, "frame range " + format_frame_range(command.frame_range) +
                                            " outside the simulated video");
  }
  switch (command.kind) {
    case ToolKind::Caption:
    case ToolKind::ZoomCaption:
      return caption(command);
    case ToolKind::Detect:
    case ToolKind::ZoomDetect:
      return detect(command);
    case ToolKind::Track:
      return track(command);
  }
  return {};
}

int SimulatedToolBackend::calls(ToolKind kind) const {
  std::lock_guard lock(mutex_);
  auto it = calls_.find(kind);
  return it == calls_.end() ? 0 : it->second;
}

int SimulatedToolBackend::total_calls() const {
  std::lock_guard lock(mutex_);
  int n = 0;
  for (const auto& [k, v] : calls_) n += v;
  return n;
}

ToolReturn SimulatedToolBackend::caption(const ToolCommand& command) const {
  ToolReturn ret;
  ret.kind = command.kind;
  for (FrameIndex f = command.frame_range.start; f <= command.frame_range.end; ++f) {
    CaptionFrame frame{f, std::nullopt, {}};
    const std::string* text = nullptr;
    if (command.kind == ToolKind::ZoomCaption) {
      frame.zoom_bbox = command.bbox;
      auto key = command.bbox ? format_bbox(*command.bbox) : std::string{};
      if (auto it = scene_.zoom_captions.find({f, key}); it != scene_.zoom_captions.end()) {
        text = &it->second;
      } else if (auto any = scene_.zoom_captions.find({f, ""}); any != scene_.zoom_captions.end()) {
        text = &any->second;
      }
    }
    if (!text) {
      if (auto it = scene_.captions.find(f); it != scene_.captions.end()) text = &it->second;
    }
    if (text) {
      frame.clauses = parse_caption_confidences(*text);
    } else {
      ret.notes.push_back("no caption available for frame " + std::to_string(f));
    }
    ret.captions.push_back(std::move(frame));
  }
  return ret;
}

ToolReturn SimulatedToolBackend::detect(const ToolCommand& command) const {
  ToolReturn ret;
  ret.kind = command.kind;
  for (FrameIndex f = command.frame_range.start; f <= command.frame_range.end; ++f) {
    auto fused = detect_multiround(f, params_, scene_.detector, scene_.tracker, scene_.total_frames);
    DetectFrame frame{f, std::nullopt, std::move(fused.detections)};
    if (command.kind == ToolKind::ZoomDetect && command.bbox) {
      const auto& z = *command.bbox;
      frame.zoom_bbox = z;
      std::erase_if(frame.detections, [&](const DetInfo& d) {
        const double cx = (d.bbox.xmin + d.bbox.xmax) / 2, cy = (d.bbox.ymin + d.bbox.ymax) / 2;
        return cx < z.xmin || cx > z.xmax || cy < z.ymin || cy > z.ymax;
      });
      for (std::size_t i = 0; i < frame.detections.size(); ++i) frame.detections[i].id = std::to_string(i);
    }
    for (auto& n : fused.notes) ret.notes.push_back(std::move(n));
    ret.detections.push_back(std::move(frame));
  }
  return ret;
}

ToolReturn SimulatedToolBackend::track(const ToolCommand& command) const {
  ToolReturn ret;
  ret.kind = command.kind;
  auto traj = track_by_name(command.object_name, command.frame_range, scene_.detector, scene_.tracker, params_);
  ret.track = std::move(traj.points);
  ret.notes = std::move(traj.notes);
  return ret;
}

}  // namespace longvid
