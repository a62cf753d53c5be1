#include "longvid/context_builder.hpp"

#include <atomic>
#include <thread>

#include "longvid/error.hpp"
#include "longvid/prompts.hpp"
#include "text_util.hpp"

namespace longvid {

ScriptedCaptioner::ScriptedCaptioner(std::map<int, std::string> captions, bool egocentric)
    : captions_(std::move(captions)), egocentric_(egocentric) {}

std::string ScriptedCaptioner::caption(const SegmentSpan& segment) {
  auto it = captions_.find(segment.segment_id);
  if (it == captions_.end()) {
    throw Error(ErrorKind::Context, "no caption for segment " + std::to_string(segment.segment_id));
  }
  return it->second;
}

std::shared_ptr<ScriptedCaptioner> parse_caption_fixture(const std::string& text) {
  std::map<int, std::string> captions;
  bool egocentric = false;
  int lineno = 0;
  for (const auto& line : detail::split_lines(text)) {
    ++lineno;
    auto t = detail::trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      if (detail::squash_spaces(t) == "#markers egocentric") egocentric = true;
      continue;
    }
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error(ErrorKind::Schema, "caption line " + std::to_string(lineno) + ": expected '<id>\\t<text>'");
    }
    int id = 0;
    try {
      std::size_t used = 0;
      auto key = std::string(detail::trim(std::string_view(line).substr(0, tab)));
      id = std::stoi(key, &used);
      if (used != key.size() || id < 0) throw std::invalid_argument("id");
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::Schema, "caption line " + std::to_string(lineno) + ": bad segment id");
    }
    if (!captions.emplace(id, std::string(detail::trim(std::string_view(line).substr(tab + 1)))).second) {
      throw Error(ErrorKind::Schema, "caption line " + std::to_string(lineno) + ": duplicate segment id");
    }
  }
  return std::make_shared<ScriptedCaptioner>(std::move(captions), egocentric);
}

std::shared_ptr<ScriptedCaptioner> load_caption_fixture(const std::filesystem::path& path) {
  return parse_caption_fixture(detail::read_file(path));
}

ToolCaptioner::ToolCaptioner(std::shared_ptr<ToolBackend> backend, bool egocentric)
    : backend_(std::move(backend)), egocentric_(egocentric) {}

std::string ToolCaptioner::caption(const SegmentSpan& segment) {
  ToolCommand cmd;
  cmd.kind = ToolKind::Caption;
  cmd.frame_range = {segment.start_frame, segment.end_frame};
  auto ret = backend_->invoke(cmd);
  if (ret.error) throw Error(ErrorKind::Context, *ret.error);
  std::string out;
  for (const auto& f : ret.captions) {
    auto text = format_caption(f.clauses, false);
    if (text.empty()) continue;
    if (!out.empty()) out += ' ';
    out += text;
  }
  if (out.empty()) throw Error(ErrorKind::Context, "caption tool returned nothing");
  return out;
}

CaptionResult caption_all(const SegmentPlan& plan, ClipCaptioner& captioner, int concurrency) {
  const auto& segs = plan.segments;
  std::vector<std::string> texts(segs.size());
  std::vector<std::string> errors(segs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < segs.size(); i = next++) {
      try {
        texts[i] = captioner.caption(segs[i]);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const auto workers = static_cast<std::size_t>(std::max(1, concurrency));
  if (workers == 1 || segs.size() <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(workers, segs.size()); ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  CaptionResult out;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const auto& s = segs[i];
    std::string text = texts[i];
    if (!errors[i].empty()) {
      out.warnings.push_back("segment " + std::to_string(s.segment_id) + " caption failed: " + errors[i]);
      text = std::string(kCaptionUnavailable);
    }
    out.captions.push_back({s.segment_id, s.start_s, s.end_s, s.start_frame, s.end_frame, std::move(text)});
  }
  return out;
}

std::string format_captions(const std::vector<SegmentCaption>& captions) {
  std::string out;
  for (const auto& c : captions) {
    if (!out.empty()) out += '\n';
    out += format_caption_line(c);
  }
  return out;
}

VideoSummary summarize(const std::vector<SegmentCaption>& captions, LlmGateway& llm, double segment_seconds,
                       bool egocentric_markers, std::string* prompt_out) {
  if (captions.empty()) throw Error(ErrorKind::Context, "no captions to summarize");
  auto prompt = prompts::render_summary(format_captions(captions), segment_seconds, egocentric_markers);
  if (prompt_out) *prompt_out = prompt;
  Conversation conv("summary");
  std::string reply;
  try {
    reply = llm.complete(conv, std::move(prompt));
  } catch (const Error& e) {
    throw Error(ErrorKind::Context, std::string("summary failed: ") + e.what());
  }
  return {std::string(detail::trim(reply)), static_cast<int>(captions.size())};
}

}  // namespace longvid
