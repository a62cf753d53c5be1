#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace longvid::prompts {

// Templates live in prompts/v1/*.txt and are compiled in verbatim.
std::string_view summary();
std::string_view answer();
std::string_view create_plan();
std::string_view adjust_plan();
std::string_view image_caption();
std::string_view direct_action();
std::string_view answer_reprompt();
std::string_view action_reprompt();

/// Replaces each "{key}" with its value. Unknown placeholders are left as is.
std::string fill(std::string_view tmpl,
                 const std::vector<std::pair<std::string, std::string>>& values);

/// Summary prompt; drops the '#C'/'#O' note when the captioner does not use
/// egocentric markers.
std::string render_summary(std::string_view captions, double segment_seconds,
                           bool egocentric_markers);

/// Answer prompt. `step_by_step == false` removes the "Please think step by
/// step." sentence.
std::string render_answer(std::string_view bank, std::string_view question,
                          bool step_by_step = true);

/// Tool descriptions followed by a direct "output the action" instruction,
/// with the planning sentences removed.
std::string render_direct_action();

}  // namespace longvid::prompts
