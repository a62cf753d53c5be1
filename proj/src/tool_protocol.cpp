#include "longvid/tool_protocol.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "longvid/error.hpp"
#include "text_util.hpp"

namespace longvid {
namespace {

bool is_clause_separator(char c) { return c == ',' || c == ';' || c == '.' || detail::is_space(c); }

std::string clean_clause(std::string_view s) {
  while (!s.empty() && is_clause_separator(s.front())) s.remove_prefix(1);
  while (!s.empty() && (detail::is_space(s.back()) || s.back() == ',' || s.back() == ';')) {
    s.remove_suffix(1);
  }
  return detail::squash_spaces(s);
}

// Matches "(confidence = 0.94)" at `pos`; on success stores the value and the
// index one past ')'.
bool match_marker(std::string_view text, std::size_t pos, double& value, std::size_t& end) {
  static constexpr std::string_view kOpen = "(confidence";
  if (text.compare(pos, kOpen.size(), kOpen) != 0) return false;
  std::size_t i = pos + kOpen.size();
  auto skip = [&] {
    while (i < text.size() && detail::is_space(text[i])) ++i;
  };
  skip();
  if (i >= text.size() || text[i] != '=') return false;
  ++i;
  skip();
  const char* first = text.data() + i;
  const char* last = text.data() + text.size();
  double v = 0;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{}) return false;
  i = static_cast<std::size_t>(ptr - text.data());
  skip();
  if (i >= text.size() || text[i] != ')') return false;
  value = v;
  end = i + 1;
  return true;
}

std::string quote(std::string_view s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('\'');
  return out;
}

FrameIndex parse_index(std::string_view s) {
  s = detail::trim(s);
  FrameIndex v = 0;
  if (s.empty()) throw Error(ErrorKind::Malformed, "empty frame index");
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw Error(ErrorKind::Malformed, "bad frame index '" + std::string(s) + "'");
  }
  return v;
}

double clamp_unit(double v, bool& changed) {
  if (std::isnan(v)) {
    changed = true;
    return 0.0;
  }
  double c = std::clamp(v, 0.0, 1.0);
  if (c != v) changed = true;
  return c;
}

}  // namespace

std::string_view tool_name(ToolKind kind) {
  switch (kind) {
    case ToolKind::Caption: return "Image Caption Tool";
    case ToolKind::Detect: return "Object Detection Tool";
    case ToolKind::ZoomCaption: return "Image Zoom in and Caption Tool";
    case ToolKind::ZoomDetect: return "Image Zoom in and Object Detection Tool";
    case ToolKind::Track: return "Object Tracking Tool";
  }
  return "";
}

std::optional<ToolKind> tool_from_name(std::string_view name) {
  auto wanted = detail::squash_spaces(name);
  for (auto kind : kAllTools) {
    if (detail::iequals(wanted, tool_name(kind))) return kind;
  }
  return std::nullopt;
}

bool is_zoom(ToolKind kind) { return kind == ToolKind::ZoomCaption || kind == ToolKind::ZoomDetect; }

std::vector<CaptionClause> parse_caption_confidences(std::string_view text) {
  std::vector<CaptionClause> clauses;
  std::size_t clause_start = 0;
  std::size_t pos = 0;
  while ((pos = text.find("(confidence", pos)) != std::string_view::npos) {
    double value = 0;
    std::size_t end = 0;
    if (!match_marker(text, pos, value, end)) {
      ++pos;
      continue;
    }
    bool clamped = false;
    value = clamp_unit(value, clamped);
    clauses.push_back({clean_clause(text.substr(clause_start, pos - clause_start)), value, true});
    clause_start = pos = end;
  }
  auto tail = clean_clause(text.substr(std::min(clause_start, text.size())));
  if (!tail.empty()) clauses.push_back({std::move(tail), 1.0, false});
  return clauses;
}

std::string format_caption(const std::vector<CaptionClause>& clauses, bool with_confidence) {
  std::string out;
  for (std::size_t i = 0; i < clauses.size(); ++i) {
    const auto& c = clauses[i];
    if (i > 0) {
      const bool sentence = !c.text.empty() && std::isupper(static_cast<unsigned char>(c.text.front()));
      out += sentence ? ". " : ", ";
    }
    out += c.text;
    if (with_confidence && c.annotated) {
      if (!c.text.empty()) out += ' ';
      out += "(confidence=" + format_confidence(c.confidence) + ")";
    }
  }
  if (!out.empty() && out.back() == ')') out += '.';
  return out;
}

FrameRange parse_frame_range(std::string_view text, std::optional<FrameIndex> total_frames) {
  auto s = detail::trim(text);
  if (s.empty()) throw Error(ErrorKind::Malformed, "empty frame range");
  FrameRange r;
  // The first character may not be the separator: "-3" is malformed, not a range.
  auto dash = s.find('-', 1);
  if (dash == std::string_view::npos) {
    r.start = r.end = parse_index(s);
  } else {
    r.start = parse_index(s.substr(0, dash));
    r.end = parse_index(s.substr(dash + 1));
  }
  if (r.start < 0 || r.end < 0) throw Error(ErrorKind::Malformed, "negative frame index");
  if (r.start > r.end) {
    throw Error(ErrorKind::StartAfterEnd, "frame range '" + std::string(s) + "' starts after it ends");
  }
  if (total_frames && r.end >= *total_frames) {
    throw Error(ErrorKind::OutOfBounds, "frame range '" + std::string(s) + "' exceeds the last frame " +
                                            std::to_string(*total_frames - 1));
  }
  return r;
}

std::string format_frame_range(const FrameRange& range) {
  if (range.start == range.end) return std::to_string(range.start);
  return std::to_string(range.start) + "-" + std::to_string(range.end);
}

std::string format_number(double value) {
  if (std::isfinite(value) && value == std::floor(value) && std::fabs(value) < 1e15) {
    return std::to_string(static_cast<long long>(value));
  }
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

std::string format_confidence(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", value);
  return buf;
}

BBox parse_bbox(std::string_view text, bool allow_degenerate) {
  auto s = detail::trim(text);
  if (!s.empty() && s.front() == '[') s.remove_prefix(1);
  if (!s.empty() && s.back() == ']') s.remove_suffix(1);
  std::vector<double> v;
  std::size_t pos = 0;
  while (true) {
    auto comma = s.find(',', pos);
    auto part = detail::trim(s.substr(pos, comma == std::string_view::npos ? s.npos : comma - pos));
    double x = 0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), x);
    if (part.empty() || ec != std::errc{} || ptr != part.data() + part.size()) {
      throw Error(ErrorKind::InvalidParameter, "bad bbox '" + std::string(text) + "'");
    }
    v.push_back(x);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  if (v.size() != 4) {
    throw Error(ErrorKind::InvalidParameter, "bbox needs exactly four numbers: '" + std::string(text) + "'");
  }
  BBox box{v[0], v[1], v[2], v[3]};
  const bool ordered = allow_degenerate ? box.xmin <= box.xmax && box.ymin <= box.ymax
                                         : box.xmin < box.xmax && box.ymin < box.ymax;
  if (!ordered) {
    throw Error(ErrorKind::InvalidParameter, "bbox corners out of order: '" + std::string(text) + "'");
  }
  return box;
}

std::string format_bbox(const BBox& b) {
  return "[" + format_number(b.xmin) + ", " + format_number(b.ymin) + ", " + format_number(b.xmax) +
         ", " + format_number(b.ymax) + "]";
}

std::string format_command(const ToolCommand& c) {
  std::string out = "{'tool_name': " + quote(tool_name(c.kind));
  if (c.kind == ToolKind::Track) out += ", 'object_name': " + quote(c.object_name);
  out += ", 'frame_range': " + quote(format_frame_range(c.frame_range));
  if (is_zoom(c.kind) && c.bbox) out += ", 'bbox': " + quote(format_bbox(*c.bbox));
  out += "}";
  return out;
}

std::string serialize_return(const ToolReturn& ret, const SerializeOptions& options) {
  const bool conf = options.with_confidence;
  std::vector<std::string> items;
  if (ret.error) {
    std::string e = "{'error': " + quote(*ret.error);
    if (conf) e += ", 'confidence': " + quote(format_confidence(0.0));
    items.push_back(e + "}");
  }
  for (const auto& f : ret.captions) {
    std::string e = "{'frame_id': " + quote(std::to_string(f.frame_id));
    if (f.zoom_bbox) e += ", 'bbox': " + quote(format_bbox(*f.zoom_bbox));
    e += ", 'caption': " + quote(format_caption(f.clauses, conf)) + "}";
    items.push_back(std::move(e));
  }
  for (const auto& f : ret.detections) {
    std::string e = "{'frame_id': " + quote(std::to_string(f.frame_id));
    if (f.zoom_bbox) e += ", 'bbox': " + quote(format_bbox(*f.zoom_bbox));
    e += ", 'det_info': [";
    for (std::size_t i = 0; i < f.detections.size(); ++i) {
      const auto& d = f.detections[i];
      if (i) e += ", ";
      e += "{'id': " + quote(d.id) + ", 'name': " + quote(d.name) + ", 'bbox': " + quote(format_bbox(d.bbox));
      if (conf) e += ", 'confidence': " + quote(format_confidence(d.confidence));
      e += "}";
    }
    items.push_back(e + "]}");
  }
  for (const auto& p : ret.track) {
    std::string e = "{'frame_id': " + quote(std::to_string(p.frame_id)) +
                    ", 'object_name': " + quote(p.object_name) + ", 'bbox': " + quote(format_bbox(p.bbox));
    if (conf) e += ", 'confidence': " + quote(format_confidence(p.confidence));
    items.push_back(e + "}");
  }
  std::string out = "[";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    out += items[i];
  }
  out += "]";
  for (const auto& note : ret.notes) out += "\nnote: " + note;
  return out;
}

// ---------------------------------------------------------------------------

void ToolRegistry::add(ToolKind kind, std::shared_ptr<ToolBackend> backend) {
  backends_[kind] = std::move(backend);
}

void ToolRegistry::add_all(const std::shared_ptr<ToolBackend>& backend) {
  for (auto kind : kAllTools) backends_[kind] = backend;
}

ToolBackend* ToolRegistry::find(ToolKind kind) const {
  auto it = backends_.find(kind);
  return it == backends_.end() ? nullptr : it->second.get();
}

bool ToolRegistry::has_all() const {
  return std::all_of(kAllTools.begin(), kAllTools.end(), [&](ToolKind k) { return find(k) != nullptr; });
}

void validate_command(const ToolCommand& c, FrameIndex total_frames, int width, int height) {
  const auto& r = c.frame_range;
  if (r.start < 0 || r.start > r.end) {
    throw Error(ErrorKind::StartAfterEnd, "frame range " + format_frame_range(r) + " is not ordered");
  }
  if (r.end >= total_frames) {
    throw Error(ErrorKind::OutOfBounds, "frame range " + format_frame_range(r) + " exceeds the last frame " +
                                            std::to_string(total_frames - 1));
  }
  if (is_zoom(c.kind)) {
    if (r.start != r.end) {
      throw Error(ErrorKind::InvalidParameter, std::string(tool_name(c.kind)) + " takes a single frame index");
    }
    if (!c.bbox) throw Error(ErrorKind::MissingParameter, std::string(tool_name(c.kind)) + " needs a bbox");
    const auto& b = *c.bbox;
    if (!(b.xmin < b.xmax) || !(b.ymin < b.ymax)) {
      throw Error(ErrorKind::InvalidParameter, "bbox corners out of order");
    }
    if (b.xmin < 0 || b.ymin < 0 || b.xmax > width - 1 || b.ymax > height - 1) {
      throw Error(ErrorKind::OutOfBounds, "bbox " + format_bbox(b) + " lies outside the " + std::to_string(width) +
                                              "x" + std::to_string(height) + " frame");
    }
  }
  if (c.kind == ToolKind::Track && detail::trim(c.object_name).empty()) {
    throw Error(ErrorKind::MissingParameter, "Object Tracking Tool needs an object_name");
  }
}

void sanitize_return(ToolReturn& ret, const ToolCommand& command) {
  bool changed = false;
  const auto& range = command.frame_range;
  auto outside = [&](FrameIndex f) {
    if (range.contains(f)) return false;
    changed = true;
    return true;
  };
  std::erase_if(ret.captions, [&](const CaptionFrame& f) { return outside(f.frame_id); });
  std::erase_if(ret.detections, [&](const DetectFrame& f) { return outside(f.frame_id); });
  std::erase_if(ret.track, [&](const TrackPoint& p) { return outside(p.frame_id); });
  for (auto& f : ret.captions) {
    for (auto& c : f.clauses) c.confidence = clamp_unit(c.confidence, changed);
  }
  for (auto& f : ret.detections) {
    for (auto& d : f.detections) d.confidence = clamp_unit(d.confidence, changed);
  }
  for (auto& p : ret.track) p.confidence = clamp_unit(p.confidence, changed);
  if (changed) ret.sanitized = true;
}

ToolRecord dispatch(const ToolCommand& command, const ToolRegistry& registry, int step_t) {
  auto* backend = registry.find(command.kind);
  if (!backend) {
    throw Error(ErrorKind::Config, "no backend registered for " + std::string(tool_name(command.kind)));
  }
  ToolRecord record;
  record.step_t = step_t;
  record.command = command;
  const auto start = std::chrono::steady_clock::now();
  try {
    record.returns = backend->invoke(command);
    record.returns.kind = command.kind;
    sanitize_return(record.returns, command);
  } catch (const std::exception& e) {
    record.returns = ToolReturn{};
    record.returns.kind = command.kind;
    record.returns.error = std::string(tool_name(command.kind)) + " failed: " + e.what();
  }
  record.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return record;
}

}  // namespace longvid
