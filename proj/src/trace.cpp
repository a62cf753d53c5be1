#include "longvid/trace.hpp"

#include <cstdio>

#include "longvid/error.hpp"
#include "text_util.hpp"

namespace longvid {

using json = nlohmann::json;

std::string fingerprint(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string to_jsonl(const std::vector<json>& events) {
  std::string out;
  for (const auto& e : events) out += e.dump() + "\n";
  return out;
}

std::vector<json> parse_jsonl(const std::string& text) {
  std::vector<json> out;
  int lineno = 0;
  for (const auto& line : detail::split_lines(text)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw Error(ErrorKind::Schema, "trace line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void write_trace(const std::vector<json>& events, const std::filesystem::path& path) {
  detail::write_file(path, to_jsonl(events));
}

std::vector<json> read_trace(const std::filesystem::path& path) { return parse_jsonl(detail::read_file(path)); }

int TraceSummary::total_calls() const {
  int n = 0;
  for (const auto& [name, count] : tool_calls) n += count;
  return n;
}

TraceSummary summarize_trace(const std::vector<json>& events) {
  TraceSummary s;
  bool header = false;
  for (const auto& e : events) {
    const auto kind = e.value("event", std::string{});
    if (kind == "session") {
      if (header) throw Error(ErrorKind::Schema, "trace holds more than one session header");
      header = true;
      s.item_id = e.value("item_id", std::string{});
      s.question_type = question_type_from_string(e.value("question_type", std::string{}));
    } else if (kind == "tool") {
      ++s.tool_calls[e.at("tool").get<std::string>()];
    }
  }
  if (!header) throw Error(ErrorKind::Schema, "trace has no session header");
  return s;
}

std::shared_ptr<ScriptedBackend> replay_llm(const std::vector<json>& events) {
  std::vector<std::string> replies;
  for (const auto& e : events) {
    if (e.value("event", std::string{}) == "llm") replies.push_back(e.at("reply").get<std::string>());
  }
  return std::make_shared<ScriptedBackend>(std::move(replies));
}

ReplayToolBackend::ReplayToolBackend(const std::vector<json>& events) {
  for (const auto& e : events) {
    if (e.value("event", std::string{}) != "tool" || !e.value("dispatched", true)) continue;
    auto cmd = decode_request(e.at("request").dump());
    auto ret = decode_response(e.at("response").dump(), cmd);
    recorded_.emplace_back(std::move(cmd), std::move(ret));
  }
}

ToolReturn ReplayToolBackend::invoke(const ToolCommand& command) {
  std::lock_guard lock(mutex_);
  if (next_ >= recorded_.size()) throw Error(ErrorKind::ScriptExhausted, "no recorded tool call left");
  const auto& [cmd, ret] = recorded_[next_];
  if (!(cmd == command)) {
    throw Error(ErrorKind::InvalidArgument, "replayed command " + format_command(command) +
                                                " differs from the recording " + format_command(cmd));
  }
  ++next_;
  return ret;
}

}  // namespace longvid
