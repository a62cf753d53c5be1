// JSON codec for the remote tool protocol.
//
// Request:  {"tool_name": ..., "object_name"?: ..., "frame_range": "a-b", "bbox"?: "[..]"}
// Response: {"results": [per-frame records], "notes"?: [...], "error"?: "..."}
//
// Numbers are emitted as strings, matching the tool descriptions shown to the
// LLM; the decoder accepts either form.

#include <nlohmann/json.hpp>

#include "longvid/error.hpp"
#include "longvid/tool_protocol.hpp"

namespace longvid {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string as_text(const json& j, const char* field) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  if (j.is_number()) return format_number(j.get<double>());
  throw Error(ErrorKind::Malformed, std::string("field '") + field + "' must be a string or number");
}

double as_number(const json& j, const char* field) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    try {
      std::size_t used = 0;
      auto s = j.get<std::string>();
      double v = std::stod(s, &used);
      if (used == s.size()) return v;
    } catch (const std::logic_error&) {
    }
  }
  throw Error(ErrorKind::Malformed, std::string("field '") + field + "' is not a number");
}

FrameIndex as_index(const json& j) {
  auto s = as_text(j, "frame_id");
  return parse_frame_range(s).start;
}

BBox as_bbox(const json& j, bool allow_degenerate) {
  if (j.is_array()) {
    if (j.size() != 4) throw Error(ErrorKind::InvalidParameter, "bbox needs four numbers");
    std::string s = "[";
    for (std::size_t i = 0; i < 4; ++i) {
      if (i) s += ", ";
      s += format_number(as_number(j[i], "bbox"));
    }
    return parse_bbox(s + "]", allow_degenerate);
  }
  if (!j.is_string()) throw Error(ErrorKind::InvalidParameter, "bbox must be a string or array");
  return parse_bbox(j.get<std::string>(), allow_degenerate);
}

const json& require(const json& obj, const char* field) {
  auto it = obj.find(field);
  if (it == obj.end()) throw Error(ErrorKind::MissingParameter, std::string("missing field '") + field + "'");
  return *it;
}

json parse_body(std::string_view body) {
  try {
    return json::parse(body);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Malformed, std::string("invalid JSON: ") + e.what());
  }
}

DetInfo decode_det(const json& d) {
  DetInfo info;
  info.id = d.contains("id") ? as_text(d["id"], "id") : "";
  info.name = as_text(require(d, "name"), "name");
  info.bbox = as_bbox(require(d, "bbox"), true);
  info.confidence = as_number(require(d, "confidence"), "confidence");
  return info;
}

}  // namespace

std::string encode_request(const ToolCommand& c) {
  ordered_json j;
  j["tool_name"] = tool_name(c.kind);
  if (c.kind == ToolKind::Track) j["object_name"] = c.object_name;
  j["frame_range"] = format_frame_range(c.frame_range);
  if (is_zoom(c.kind) && c.bbox) j["bbox"] = format_bbox(*c.bbox);
  return j.dump();
}

ToolCommand decode_request(std::string_view body) {
  auto j = parse_body(body);
  if (!j.is_object()) throw Error(ErrorKind::Malformed, "request must be an object");
  auto name = as_text(require(j, "tool_name"), "tool_name");
  auto kind = tool_from_name(name);
  if (!kind) throw Error(ErrorKind::UnknownTool, "unknown tool '" + name + "'");
  ToolCommand c;
  c.kind = *kind;
  c.frame_range = parse_frame_range(as_text(require(j, "frame_range"), "frame_range"));
  if (is_zoom(c.kind)) c.bbox = as_bbox(require(j, "bbox"), false);
  if (c.kind == ToolKind::Track) c.object_name = as_text(require(j, "object_name"), "object_name");
  return c;
}

std::string encode_response(const ToolReturn& ret) {
  ordered_json j;
  auto results = ordered_json::array();
  for (const auto& f : ret.captions) {
    ordered_json r;
    r["frame_id"] = std::to_string(f.frame_id);
    if (f.zoom_bbox) r["bbox"] = format_bbox(*f.zoom_bbox);
    r["caption"] = format_caption(f.clauses);
    results.push_back(std::move(r));
  }
  for (const auto& f : ret.detections) {
    ordered_json r;
    r["frame_id"] = std::to_string(f.frame_id);
    if (f.zoom_bbox) r["bbox"] = format_bbox(*f.zoom_bbox);
    auto dets = ordered_json::array();
    for (const auto& d : f.detections) {
      ordered_json o;
      o["id"] = d.id;
      o["name"] = d.name;
      o["bbox"] = format_bbox(d.bbox);
      o["confidence"] = format_confidence(d.confidence);
      dets.push_back(std::move(o));
    }
    r["det_info"] = std::move(dets);
    results.push_back(std::move(r));
  }
  for (const auto& p : ret.track) {
    ordered_json r;
    r["frame_id"] = std::to_string(p.frame_id);
    r["object_name"] = p.object_name;
    r["bbox"] = format_bbox(p.bbox);
    r["confidence"] = format_confidence(p.confidence);
    results.push_back(std::move(r));
  }
  j["results"] = std::move(results);
  if (!ret.notes.empty()) j["notes"] = ret.notes;
  if (ret.error) j["error"] = *ret.error;
  return j.dump();
}

ToolReturn decode_response(std::string_view body, const ToolCommand& command) {
  auto j = parse_body(body);
  if (!j.is_object()) throw Error(ErrorKind::Malformed, "response must be an object");
  ToolReturn ret;
  ret.kind = command.kind;
  if (auto it = j.find("error"); it != j.end() && !it->is_null()) ret.error = as_text(*it, "error");
  if (auto it = j.find("notes"); it != j.end()) {
    for (const auto& n : *it) ret.notes.push_back(as_text(n, "notes"));
  }
  auto it = j.find("results");
  if (it == j.end()) {
    if (ret.error) return ret;
    throw Error(ErrorKind::MissingParameter, "missing field 'results'");
  }
  if (!it->is_array()) throw Error(ErrorKind::Malformed, "'results' must be a list");
  for (const auto& r : *it) {
    const auto frame = as_index(require(r, "frame_id"));
    std::optional<BBox> zoom;
    if (is_zoom(command.kind) && r.contains("bbox")) zoom = as_bbox(r["bbox"], false);
    switch (command.kind) {
      case ToolKind::Caption:
      case ToolKind::ZoomCaption:
        ret.captions.push_back({frame, zoom, parse_caption_confidences(as_text(require(r, "caption"), "caption"))});
        break;
      case ToolKind::Detect:
      case ToolKind::ZoomDetect: {
        DetectFrame f{frame, zoom, {}};
        const auto& dets = require(r, "det_info");
        if (dets.is_array()) {
          for (const auto& d : dets) f.detections.push_back(decode_det(d));
        } else if (dets.is_object()) {
          f.detections.push_back(decode_det(dets));
        } else if (!dets.is_null()) {
          throw Error(ErrorKind::Malformed, "'det_info' must be a list or object");
        }
        ret.detections.push_back(std::move(f));
        break;
      }
      case ToolKind::Track:
        ret.track.push_back({frame, as_text(require(r, "object_name"), "object_name"),
                             as_bbox(require(r, "bbox"), true),
                             as_number(require(r, "confidence"), "confidence")});
        break;
    }
  }
  return ret;
}

}  // namespace longvid
