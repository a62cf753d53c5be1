#include "longvid/assessor.hpp"

#include <cmath>
#include <regex>

#include "longvid/prompts.hpp"
#include "text_util.hpp"

namespace longvid {
namespace {

const std::regex& score_re() {
  static const std::regex re(R"(confidence\s*score\s*[=:]\s*(-?\d+(?:\.\d+)?))", std::regex::icase);
  return re;
}

const std::regex& answer_re() {
  static const std::regex re(R"(the\s+answer\s+is\s*:?\s*)", std::regex::icase);
  return re;
}

char upper(char c) { return static_cast<char>(std::toupper(static_cast<unsigned char>(c))); }

bool is_label_boundary(std::string_view rest) {
  if (rest.empty()) return true;
  const char c = rest.front();
  return detail::is_space(c) || c == '.' || c == ',' || c == ':' || c == ')' || c == ';';
}

}  // namespace

std::string_view to_string(Decision decision) {
  return decision == Decision::Accept ? "accept" : "retrieve";
}

std::optional<ParsedAnswer> parse_answer_reply(std::string_view text, std::span<const char> valid_labels,
                                               std::span<const MCQOption> options) {
  const std::string s(text);
  std::smatch last_score;
  bool found = false;
  for (auto it = std::sregex_iterator(s.begin(), s.end(), score_re()); it != std::sregex_iterator(); ++it) {
    last_score = *it;
    found = true;
  }
  if (!found) return std::nullopt;

  ParsedAnswer out;
  const double raw = std::stod(last_score[1].str());
  double value = raw;
  if (value != std::floor(value)) {
    value = std::round(value);
    out.warnings.push_back("confidence " + last_score[1].str() + " rounded to " + format_number(value));
  }
  if (value < 0 || value > 5) {
    value = std::clamp(value, 0.0, 5.0);
    out.warnings.push_back("confidence " + last_score[1].str() + " clamped to " + format_number(value));
  }
  out.candidate.confidence = static_cast<int>(value);

  // The answer phrase is the last "the answer is" ahead of the score.
  const auto score_pos = static_cast<std::size_t>(last_score.position(0));
  const std::string head = s.substr(0, score_pos);
  std::optional<std::size_t> phrase_at;
  for (auto it = std::sregex_iterator(head.begin(), head.end(), answer_re()); it != std::sregex_iterator(); ++it) {
    phrase_at = static_cast<std::size_t>(it->position(0) + it->length(0));
  }
  if (!phrase_at) return out;

  std::string_view phrase = std::string_view(head).substr(*phrase_at);
  if (auto paren = phrase.rfind('('); paren != std::string_view::npos) phrase = phrase.substr(0, paren);
  phrase = detail::trim(phrase);
  while (!phrase.empty() && (phrase.back() == ',' || phrase.back() == '.' || phrase.back() == ';')) {
    phrase.remove_suffix(1);
    phrase = detail::trim(phrase);
  }
  out.candidate.free_text = std::string(phrase);

  auto accept_label = [&](char c) {
    c = upper(c);
    for (char l : valid_labels) {
      if (upper(l) == c) {
        out.candidate.option_label = l;
        return true;
      }
    }
    return false;
  };

  // Option given by its text. Checked before the letter so that an option
  // starting with "a" or "I" is not read as a label.
  std::size_t best_len = 0;
  const auto got = detail::to_lower(phrase);
  for (const auto& o : options) {
    auto want = detail::to_lower(detail::trim(o.text));
    if (want.empty() || want.size() <= best_len || got.rfind(want, 0) != 0) continue;
    if (!is_label_boundary(std::string_view(got).substr(want.size()))) continue;
    best_len = want.size();
    out.candidate.option_label = o.label;
  }
  if (out.candidate.option_label) return out;

  std::string_view p = phrase;
  if (!p.empty() && p.front() == '(') p.remove_prefix(1);
  if (p.size() > 7 && detail::iequals(p.substr(0, 7), "option ")) p.remove_prefix(7);
  if (!p.empty() && std::isalpha(static_cast<unsigned char>(p.front())) && is_label_boundary(p.substr(1)) &&
      accept_label(p.front())) {
    return out;
  }
  if (!out.candidate.option_label && !phrase.empty()) {
    out.warnings.push_back("answer '" + std::string(phrase) + "' does not name an option");
  }
  return out;
}

std::string format_answer_reply(char label, int confidence) {
  return std::string("Yes, the answer is ") + label + ", (confidence score = " + std::to_string(confidence) + ")";
}

Decision decide(const AnswerCandidate& candidate, int cf_thr) {
  return candidate.confidence >= cf_thr ? Decision::Accept : Decision::Retrieve;
}

Assessment assess(const MemoryBank& bank, const MCQItem& question, Conversation& conv, LlmGateway& llm,
                  const AssessOptions& options) {
  Assessment a;
  a.prompt = prompts::render_answer(render_for_prompt(bank, options.render), format_question(question),
                                    options.step_by_step);
  const auto labels = question.labels();
  auto reply = llm.complete(conv, a.prompt);
  auto parsed = parse_answer_reply(reply, labels, question.options);
  if (!parsed) {
    a.reprompted = true;
    a.warnings.push_back("answer reply had no confidence score; reprompting");
    reply = llm.complete(conv, std::string(prompts::answer_reprompt()));
    parsed = parse_answer_reply(reply, labels, question.options);
  }
  if (!parsed) {
    a.warnings.push_back("answer reply unreadable after reprompt; using confidence 0");
    return a;
  }
  a.parsed = true;
  a.candidate = std::move(parsed->candidate);
  for (auto& w : parsed->warnings) a.warnings.push_back(std::move(w));
  return a;
}

}  // namespace longvid
