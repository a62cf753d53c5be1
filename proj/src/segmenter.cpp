#include "longvid/segmenter.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "longvid/error.hpp"
#include "text_util.hpp"

namespace longvid {
namespace {

// Absorbs binary rounding in products like 0.1 * 30.
constexpr double kEps = 1e-9;

FrameIndex floor_index(double x) { return static_cast<FrameIndex>(std::floor(x + kEps)); }

}  // namespace

SyntheticFrameSource::SyntheticFrameSource(FrameIndex count, int width, int height)
    : count_(count), width_(width), height_(height) {
  if (count <= 0 || width <= 0 || height <= 0) {
    throw Error(ErrorKind::InvalidArgument, "synthetic frame source needs positive dimensions");
  }
}

Frame SyntheticFrameSource::frame(FrameIndex id) const {
  if (id < 0 || id >= count_) {
    throw Error(ErrorKind::OutOfBounds, "frame " + std::to_string(id) + " out of range");
  }
  Frame f{id, width_, height_, {}};
  f.pixels.resize(static_cast<std::size_t>(width_) * height_);
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      auto h = static_cast<std::uint64_t>(id) * 0x9E3779B97F4A7C15ULL ^
               static_cast<std::uint64_t>(y * width_ + x) * 0xC2B2AE3D27D4EB4FULL;
      h ^= h >> 29;
      f.pixels[static_cast<std::size_t>(y) * width_ + x] = static_cast<std::uint8_t>(h & 0xFF);
    }
  }
  return f;
}

VideoManifest parse_manifest(const std::string& text) {
  VideoManifest m;
  bool have_id = false, have_len = false, have_fps = false;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto body = detail::trim(line);
    if (body.empty() || body.front() == '#') continue;
    auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorKind::Schema, "manifest line " + std::to_string(lineno) + ": expected key = value");
    }
    auto key = std::string(detail::trim(body.substr(0, eq)));
    auto value = std::string(detail::trim(body.substr(eq + 1)));
    try {
      if (key == "video_id") {
        m.video_id = value;
        have_id = true;
      } else if (key == "length_s") {
        m.length_s = std::stod(value);
        have_len = true;
      } else if (key == "native_fps") {
        m.native_fps = std::stod(value);
        have_fps = true;
      } else if (key == "source") {
        m.source = value;
      } else if (key == "width") {
        m.width = std::stoi(value);
      } else if (key == "height") {
        m.height = std::stoi(value);
      } else {
        throw Error(ErrorKind::Schema, "manifest line " + std::to_string(lineno) + ": unknown key '" + key + "'");
      }
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::Schema, "manifest line " + std::to_string(lineno) + ": bad value for " + key);
    }
  }
  if (!have_id || !have_len || !have_fps) {
    throw Error(ErrorKind::Schema, "manifest needs video_id, length_s and native_fps");
  }
  if (!(m.length_s > 0) || !(m.native_fps > 0) || m.width <= 0 || m.height <= 0) {
    throw Error(ErrorKind::Schema, "manifest values must be positive");
  }
  return m;
}

VideoManifest load_manifest(const std::filesystem::path& path) {
  return parse_manifest(detail::read_file(path));
}

std::string format_manifest(const VideoManifest& m) {
  std::ostringstream out;
  out << "video_id = " << m.video_id << '\n'
      << "length_s = " << m.length_s << '\n'
      << "native_fps = " << m.native_fps << '\n'
      << "width = " << m.width << '\n'
      << "height = " << m.height << '\n';
  if (!m.source.empty()) out << "source = " << m.source << '\n';
  return out.str();
}

SegmentPlan plan_segments(double length_s, double fps_d, double n) {
  if (!(length_s > 0) || !(fps_d > 0) || !(n > 0)) {
    throw Error(ErrorKind::InvalidArgument, "length, frame rate and segment length must be positive");
  }
  const double per_segment = n * fps_d;
  if (per_segment < 1.0 - kEps) {
    throw Error(ErrorKind::InvalidArgument, "a segment must span at least one downsampled frame");
  }
  SegmentPlan plan;
  plan.fps_d = fps_d;
  plan.n = n;
  plan.total_frames = floor_index(length_s * fps_d);
  if (plan.total_frames <= 0) {
    throw Error(ErrorKind::InvalidArgument, "video is shorter than one downsampled frame");
  }
  const auto k = static_cast<int>(std::ceil(length_s / n - kEps));
  for (int i = 0; i < k; ++i) {
    const FrameIndex start = floor_index(i * per_segment);
    if (start >= plan.total_frames) break;  // fractional tail with no whole frame
    const FrameIndex end = std::min(floor_index((i + 1) * per_segment), plan.total_frames) - 1;
    plan.segments.push_back({i, start, end, i * n, std::min((i + 1) * n, length_s)});
  }
  return plan;
}

double frame_to_time(FrameIndex frame_id, double fps_d) {
  if (frame_id < 0) throw Error(ErrorKind::InvalidArgument, "negative frame id");
  if (!(fps_d > 0)) throw Error(ErrorKind::InvalidArgument, "frame rate must be positive");
  return static_cast<double>(frame_id) / fps_d;
}

FrameIndex time_to_frame(double t, double fps_d) {
  if (t < 0) throw Error(ErrorKind::InvalidArgument, "negative time");
  if (!(fps_d > 0)) throw Error(ErrorKind::InvalidArgument, "frame rate must be positive");
  return floor_index(t * fps_d);
}

}  // namespace longvid
