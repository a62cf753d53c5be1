#include "longvid/memory_bank.hpp"

#include <nlohmann/json.hpp>

#include "longvid/error.hpp"
#include "text_util.hpp"

namespace longvid {

MemoryBank::MemoryBank(std::vector<SegmentCaption> captions, VideoSummary summary)
    : captions_(std::move(captions)), summary_(std::move(summary)) {}

void MemoryBank::append(ToolRecord record) {
  if (record.step_t < 1) {
    throw Error(ErrorKind::InvalidArgument, "tool record step must be >= 1");
  }
  if (!records_.empty() && record.step_t < records_.back().step_t) {
    throw Error(ErrorKind::Ordering, "tool record for step " + std::to_string(record.step_t) +
                                         " arrives after step " + std::to_string(records_.back().step_t));
  }
  records_.push_back(std::move(record));
}

MemoryBank merge(MemoryBank bank, ToolRecord new_info) {
  bank.append(std::move(new_info));
  return bank;
}

std::string format_caption_line(const SegmentCaption& c) {
  return "segment " + std::to_string(c.segment_id) + " (" + format_number(c.start_s) + "-" +
         format_number(c.end_s) + " s, frames " + std::to_string(c.start_frame) + "-" +
         std::to_string(c.end_frame) + "): " + c.text;
}

std::string render_for_prompt(const MemoryBank& bank, const RenderOptions& options) {
  std::string out = "Caption:\n";
  for (const auto& c : bank.captions()) out += format_caption_line(c) + "\n";
  out += "Summary:\n" + bank.summary().text + "\n";
  out += "Tools return value:\n";
  const SerializeOptions ser{!options.strip_tool_confidence};
  for (const auto& r : bank.tool_records()) {
    out += "step " + std::to_string(r.step_t) + ": " + format_command(r.command) + " returned " +
           serialize_return(r.returns, ser) + "\n";
  }
  return out;
}

std::string snapshot(const MemoryBank& bank) {
  using json = nlohmann::ordered_json;
  std::string out;
  for (const auto& c : bank.captions()) {
    json j;
    j["tag"] = "caption";
    j["segment_id"] = c.segment_id;
    j["start_s"] = c.start_s;
    j["end_s"] = c.end_s;
    j["start_frame"] = c.start_frame;
    j["end_frame"] = c.end_frame;
    j["text"] = c.text;
    out += j.dump() + "\n";
  }
  {
    json j;
    j["tag"] = "summary";
    j["text"] = bank.summary().text;
    j["source_caption_count"] = bank.summary().source_caption_count;
    out += j.dump() + "\n";
  }
  for (const auto& r : bank.tool_records()) {
    json j;
    j["tag"] = "tool";
    j["step_t"] = r.step_t;
    j["command"] = json::parse(encode_request(r.command));
    j["returns"] = json::parse(encode_response(r.returns));
    if (r.returns.sanitized) j["sanitized"] = true;
    j["wall_time_ms"] = r.wall_time_ms;
    out += j.dump() + "\n";
  }
  return out;
}

MemoryBank load_snapshot(const std::string& text) {
  using json = nlohmann::json;
  std::vector<SegmentCaption> captions;
  VideoSummary summary;
  std::vector<ToolRecord> records;
  int lineno = 0;
  for (const auto& line : detail::split_lines(text)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    try {
      auto j = json::parse(line);
      auto tag = j.at("tag").get<std::string>();
      if (tag == "caption") {
        captions.push_back({j.at("segment_id").get<int>(), j.at("start_s").get<double>(),
                            j.at("end_s").get<double>(), j.value("start_frame", FrameIndex{0}),
                            j.value("end_frame", FrameIndex{0}), j.at("text").get<std::string>()});
      } else if (tag == "summary") {
        summary = {j.at("text").get<std::string>(), j.at("source_caption_count").get<int>()};
      } else if (tag == "tool") {
        ToolRecord r;
        r.step_t = j.at("step_t").get<int>();
        r.command = decode_request(j.at("command").dump());
        r.returns = decode_response(j.at("returns").dump(), r.command);
        r.returns.sanitized = j.value("sanitized", false);
        r.wall_time_ms = j.value("wall_time_ms", 0.0);
        records.push_back(std::move(r));
      } else {
        throw Error(ErrorKind::Schema, "unknown tag '" + tag + "'");
      }
    } catch (const json::exception& e) {
      throw Error(ErrorKind::Schema, "snapshot line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  MemoryBank bank(std::move(captions), std::move(summary));
  for (auto& r : records) bank.append(std::move(r));
  return bank;
}

void save_snapshot(const MemoryBank& bank, const std::filesystem::path& path) {
  detail::write_file(path, snapshot(bank));
}

}  // namespace longvid
