#include "longvid/detection_fusion.hpp"

#include <algorithm>
#include <map>

#include "longvid/error.hpp"
#include "text_util.hpp"

namespace longvid {
namespace {

struct Sighting {
  double confidence = 0.0;
  FrameIndex frame = 0;
  BBox box;
};

void check_params(const FusionParams& p) {
  if (p.alpha < 0) throw Error(ErrorKind::InvalidArgument, "alpha must be >= 0");
  if (!(p.init_conf_thr >= 0.0 && p.init_conf_thr <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "init_conf_thr must lie in [0, 1]");
  }
}

std::string class_key(std::string_view name) {
  auto key = detail::to_lower(detail::trim(name));
  std::replace(key.begin(), key.end(), '_', ' ');
  return detail::squash_spaces(key);
}

// Box for a tracker entry, or nullopt when the entry carries nothing usable.
std::optional<BBox> entry_box(const TrackEntry& e) {
  if (e.lost) return std::nullopt;
  if (e.box) return e.box;
  if (e.mask) {
    try {
      return bbox_from_mask(*e.mask);
    } catch (const Error&) {
      return std::nullopt;
    }
  }
  return std::nullopt;
}

}  // namespace

Mask Mask::empty(int width, int height) {
  return Mask{width, height, std::vector<std::uint8_t>(static_cast<std::size_t>(width) * height, 0)};
}

BBox bbox_from_mask(const Mask& mask) {
  int xmin = mask.width, ymin = mask.height, xmax = -1, ymax = -1;
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      if (!mask.at(x, y)) continue;
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (xmax < 0) throw Error(ErrorKind::InvalidArgument, "mask has no set cells");
  return BBox{static_cast<double>(xmin), static_cast<double>(ymin), static_cast<double>(xmax),
              static_cast<double>(ymax)};
}

FusedDetections detect_multiround(FrameIndex m, const FusionParams& params, const Detector& detector,
                                  const Tracker& tracker, FrameIndex total_frames) {
  check_params(params);
  if (m < 0 || m >= total_frames) {
    throw Error(ErrorKind::OutOfBounds, "frame " + std::to_string(m) + " outside the video");
  }
  const FrameIndex lo = std::max<FrameIndex>(0, m - params.alpha);
  const FrameIndex hi = std::min<FrameIndex>(total_frames - 1, m + params.alpha);

  std::map<std::string, Sighting> best;
  for (FrameIndex f = lo; f <= hi; ++f) {
    for (const auto& d : detector.detect(f)) {
      if (!(d.confidence > params.init_conf_thr)) continue;
      auto it = best.find(d.name);
      // Strictly greater keeps the earliest frame on ties.
      if (it == best.end() || d.confidence > it->second.confidence) best[d.name] = {d.confidence, f, d.bbox};
    }
  }

  FusedDetections out;
  int next_id = 0;
  for (const auto& [name, seed] : best) {
    const FrameRange span{std::min(seed.frame, m), std::max(seed.frame, m)};
    const auto entries = tracker.track(seed.frame, seed.box, span);
    auto at_m = std::find_if(entries.begin(), entries.end(), [&](const TrackEntry& e) { return e.frame_id == m; });
    std::optional<BBox> box;
    if (at_m != entries.end()) box = entry_box(*at_m);
    if (!box) {
      out.notes.push_back("lost track of '" + name + "' at frame " + std::to_string(m) + " (seeded at frame " +
                          std::to_string(seed.frame) + ")");
      continue;
    }
    out.detections.push_back({std::to_string(next_id++), name, *box, at_m->confidence});
  }
  return out;
}

Trajectory track_by_name(const std::string& name, const FrameRange& range, const Detector& detector,
                         const Tracker& tracker, const FusionParams& params) {
  check_params(params);
  if (range.start < 0 || range.start > range.end) {
    throw Error(ErrorKind::InvalidArgument, "invalid frame range " + format_frame_range(range));
  }
  const auto wanted = class_key(name);
  std::optional<Sighting> seed;
  for (FrameIndex f = range.start; f <= range.end && !seed; ++f) {
    std::optional<Sighting> frame_best;
    for (const auto& d : detector.detect(f)) {
      if (class_key(d.name) != wanted) continue;
      if (!frame_best || d.confidence > frame_best->confidence) frame_best = Sighting{d.confidence, f, d.bbox};
    }
    if (frame_best && frame_best->confidence > params.init_conf_thr) seed = frame_best;
  }

  Trajectory out;
  if (!seed) {
    out.notes.push_back("'" + name + "' was not detected above confidence " + format_confidence(params.init_conf_thr) +
                        " in frames " + format_frame_range(range));
    return out;
  }
  auto entries = tracker.track(seed->frame, seed->box, range);
  std::stable_sort(entries.begin(), entries.end(),
                   [](const TrackEntry& a, const TrackEntry& b) { return a.frame_id < b.frame_id; });
  for (const auto& e : entries) {
    if (!range.contains(e.frame_id)) continue;
    auto box = entry_box(e);
    if (!box) continue;
    out.points.push_back({e.frame_id, name, *box, e.confidence});
  }
  const auto missing = range.size() - static_cast<FrameIndex>(out.points.size());
  if (missing > 0) {
    out.notes.push_back("'" + name + "' could not be followed in " + std::to_string(missing) + " of " +
                        std::to_string(range.size()) + " frames");
  }
  return out;
}

}  // namespace longvid
