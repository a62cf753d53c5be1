#include "longvid/prompts.hpp"

#include "longvid/tool_protocol.hpp"

namespace longvid::prompts {

std::string fill(std::string_view tmpl, const std::vector<std::pair<std::string, std::string>>& values) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      auto close = tmpl.find('}', i + 1);
      if (close != std::string_view::npos) {
        auto key = tmpl.substr(i + 1, close - i - 1);
        bool replaced = false;
        for (const auto& [k, v] : values) {
          if (k == key) {
            out += v;
            replaced = true;
            break;
          }
        }
        if (replaced) {
          i = close + 1;
          continue;
        }
      }
    }
    out += tmpl[i++];
  }
  return out;
}

std::string render_summary(std::string_view captions, double segment_seconds, bool egocentric_markers) {
  std::string_view tmpl = summary();
  if (!egocentric_markers) {
    auto note = tmpl.find("\nNote for captions:");
    if (note != std::string_view::npos) tmpl = tmpl.substr(0, note);
  }
  return fill(tmpl, {{"n", format_number(segment_seconds)}, {"C", std::string(captions)}});
}

std::string render_answer(std::string_view bank, std::string_view question, bool step_by_step) {
  std::string tmpl(answer());
  if (!step_by_step) {
    constexpr std::string_view sentence = "Please think step by step. ";
    if (auto pos = tmpl.find(sentence); pos != std::string::npos) tmpl.erase(pos, sentence.size());
  }
  return fill(tmpl, {{"B", std::string(bank)}, {"Q", std::string(question)}});
}

std::string render_direct_action() {
  std::string_view tools = create_plan();
  auto cut = tools.find("You are allowed to call the tool");
  if (cut != std::string_view::npos) tools = tools.substr(0, cut);
  return std::string(tools) + std::string(direct_action());
}

}  // namespace longvid::prompts
