#pragma once

// Literal re-statement of the two fusion recipes, kept deliberately naive:
// gather everything, then pick. Shared by the unit and acceptance suites.

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "longvid/detection_fusion.hpp"
#include "support.hpp"

namespace oracle {

using namespace longvid;

inline std::optional<BBox> mask_box(const Mask& m) {
  std::vector<int> xs, ys;
  for (int y = 0; y < m.height; ++y) {
    for (int x = 0; x < m.width; ++x) {
      if (m.cells[static_cast<std::size_t>(y * m.width + x)]) {
        xs.push_back(x);
        ys.push_back(y);
      }
    }
  }
  if (xs.empty()) return std::nullopt;
  return BBox{double(*std::min_element(xs.begin(), xs.end())), double(*std::min_element(ys.begin(), ys.end())),
              double(*std::max_element(xs.begin(), xs.end())), double(*std::max_element(ys.begin(), ys.end()))};
}

inline std::optional<BBox> usable(const TrackEntry& e) {
  if (e.lost) return std::nullopt;
  if (e.box) return e.box;
  if (e.mask) return mask_box(*e.mask);
  return std::nullopt;
}

inline FusedDetections detect(FrameIndex m, const FusionParams& p, const Detector& det, const Tracker& trk,
                              FrameIndex total) {
  struct Hit {
    FrameIndex frame;
    std::size_t order;
    DetInfo d;
  };
  std::vector<Hit> hits;
  for (FrameIndex f = 0; f < total; ++f) {
    if (f < m - p.alpha || f > m + p.alpha) continue;
    auto ds = det.detect(f);
    for (std::size_t i = 0; i < ds.size(); ++i) hits.push_back({f, i, ds[i]});
  }
  std::set<std::string> names;
  for (const auto& h : hits) names.insert(h.d.name);

  FusedDetections out;
  int id = 0;
  for (const auto& name : names) {
    double best = -1;
    for (const auto& h : hits) {
      if (h.d.name == name && h.d.confidence > p.init_conf_thr) best = std::max(best, h.d.confidence);
    }
    if (best < 0) continue;
    const Hit* seed = nullptr;
    for (const auto& h : hits) {
      if (h.d.name != name || h.d.confidence != best) continue;
      if (!seed || h.frame < seed->frame || (h.frame == seed->frame && h.order < seed->order)) seed = &h;
    }
    const FrameIndex lo = std::min(seed->frame, m), hi = std::max(seed->frame, m);
    std::optional<BBox> box;
    double conf = 0;
    for (const auto& e : trk.track(seed->frame, seed->d.bbox, {lo, hi})) {
      if (e.frame_id == m) {
        box = usable(e);
        conf = e.confidence;
      }
    }
    if (!box) {
      out.notes.push_back("lost track of '" + name + "' at frame " + std::to_string(m) + " (seeded at frame " +
                          std::to_string(seed->frame) + ")");
      continue;
    }
    out.detections.push_back({std::to_string(id++), name, *box, conf});
  }
  return out;
}

inline std::string norm(std::string s) {
  std::string out;
  for (char c : s) {
    char ch = c == '_' ? ' ' : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (ch == ' ' && (out.empty() || out.back() == ' ')) continue;
    out += ch;
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

inline Trajectory track(const std::string& name, const FrameRange& range, const Detector& det, const Tracker& trk,
                        const FusionParams& p) {
  Trajectory out;
  std::optional<std::pair<FrameIndex, BBox>> seed;
  for (FrameIndex f = range.start; f <= range.end; ++f) {
    std::vector<DetInfo> same;
    for (const auto& d : det.detect(f)) {
      if (norm(d.name) == norm(name)) same.push_back(d);
    }
    if (same.empty()) continue;
    auto best = std::max_element(same.begin(), same.end(), [](const DetInfo& a, const DetInfo& b) {
      return a.confidence < b.confidence;
    });
    if (best->confidence > p.init_conf_thr) {
      seed = {f, best->bbox};
      break;
    }
  }
  if (!seed) {
    char thr[16];
    std::snprintf(thr, sizeof thr, "%.2f", p.init_conf_thr);
    out.notes.push_back("'" + name + "' was not detected above confidence " + thr + " in frames " +
                        std::to_string(range.start) + (range.start == range.end ? "" : "-" + std::to_string(range.end)));
    return out;
  }
  std::map<FrameIndex, TrackEntry> by_frame;
  for (const auto& e : trk.track(seed->first, seed->second, range)) by_frame.emplace(e.frame_id, e);
  for (FrameIndex f = range.start; f <= range.end; ++f) {
    auto it = by_frame.find(f);
    if (it == by_frame.end()) continue;
    if (auto b = usable(it->second)) out.points.push_back({f, name, *b, it->second.confidence});
  }
  const auto n = range.end - range.start + 1;
  const auto missing = n - static_cast<FrameIndex>(out.points.size());
  if (missing > 0) {
    out.notes.push_back("'" + name + "' could not be followed in " + std::to_string(missing) + " of " +
                        std::to_string(n) + " frames");
  }
  return out;
}

// Detector with a random per-frame table.
class RandomDetector final : public Detector {
 public:
  std::map<FrameIndex, std::vector<DetInfo>> table;
  std::vector<DetInfo> detect(FrameIndex f) const override {
    auto it = table.find(f);
    return it == table.end() ? std::vector<DetInfo>{} : it->second;
  }
};

// Tracker whose answer is a fixed random function of (seed frame, seed box,
// frame); reports boxes, masks (possibly empty) or lost entries.
class RandomTracker final : public Tracker {
 public:
  explicit RandomTracker(std::uint64_t salt) : salt_(salt) {}

  std::vector<TrackEntry> track(FrameIndex init, const BBox& box, const FrameRange& range) const override {
    std::vector<TrackEntry> out;
    for (FrameIndex f = range.start; f <= range.end; ++f) {
      std::uint64_t h = salt_ ^ (static_cast<std::uint64_t>(init) * 0x9e3779b97f4a7c15ULL) ^
                        (static_cast<std::uint64_t>(f) * 0xc2b2ae3d27d4eb4fULL) ^
                        static_cast<std::uint64_t>(box.xmin * 131 + box.ymin * 17 + box.xmax * 7 + box.ymax);
      testing_support::Gen g(h);
      TrackEntry e;
      e.frame_id = f;
      const int kind = g.range(0, 9);
      e.confidence = g.range(10, 100) / 100.0;
      if (kind < 2) {
        e.lost = true;
      } else if (kind < 4) {
        Mask m = Mask::empty(12, 10);
        const int cells = g.range(0, 4);
        for (int i = 0; i < cells; ++i) m.set(g.range(0, 11), g.range(0, 9));
        e.mask = m;
      } else {
        const double x = g.range(0, 300), y = g.range(0, 200);
        e.box = BBox{x, y, x + g.range(1, 80), y + g.range(1, 80)};
      }
      out.push_back(std::move(e));
    }
    return out;
  }

 private:
  std::uint64_t salt_;
};

struct Case {
  FrameIndex total = 1;
  FusionParams params;
  RandomDetector detector;
  std::unique_ptr<RandomTracker> tracker;
};

inline Case random_case(testing_support::Gen& g) {
  static const std::vector<std::string> names = {"phone", "cup", "Red ball", "red_ball", "person", "laptop"};
  static const std::vector<double> confs = {0.2, 0.5, 0.5, 0.6, 0.75, 0.9, 0.9, 1.0};
  Case c;
  c.total = g.range(1, 30);
  c.params.alpha = g.range(0, 6);
  c.params.init_conf_thr = g.pick(std::vector<double>{0.0, 0.3, 0.5, 0.75});
  for (FrameIndex f = 0; f < c.total; ++f) {
    const int n = g.range(0, 4);
    for (int i = 0; i < n; ++i) {
      const double x = g.range(0, 500), y = g.range(0, 400);
      c.detector.table[f].push_back(
          {std::to_string(i), g.pick(names), BBox{x, y, x + g.range(1, 100), y + g.range(1, 60)}, g.pick(confs)});
    }
  }
  c.tracker = std::make_unique<RandomTracker>(g.engine()());
  return c;
}

inline bool same(const FusedDetections& a, const FusedDetections& b) {
  return a.detections == b.detections && a.notes == b.notes;
}

inline bool same(const Trajectory& a, const Trajectory& b) { return a.points == b.points && a.notes == b.notes; }

}  // namespace oracle
