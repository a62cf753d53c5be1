#include "longvid/question.hpp"

#include <set>

#include "longvid/error.hpp"
#include "text_util.hpp"

namespace longvid {

std::string_view to_string(QuestionType type) {
  switch (type) {
    case QuestionType::Causal: return "causal";
    case QuestionType::Temporal: return "temporal";
    case QuestionType::Descriptive: return "descriptive";
    case QuestionType::Unknown: return "unknown";
  }
  return "unknown";
}

QuestionType question_type_from_string(std::string_view text) {
  auto t = detail::to_lower(detail::trim(text));
  if (t == "causal" || t == "c") return QuestionType::Causal;
  if (t == "temporal" || t == "t") return QuestionType::Temporal;
  if (t == "descriptive" || t == "d") return QuestionType::Descriptive;
  return QuestionType::Unknown;
}

std::vector<char> MCQItem::labels() const {
  std::vector<char> out;
  for (const auto& o : options) out.push_back(o.label);
  return out;
}

bool MCQItem::has_label(char label) const {
  for (const auto& o : options) {
    if (o.label == label) return true;
  }
  return false;
}

void validate(const MCQItem& item) {
  const std::string where = "item '" + item.item_id + "': ";
  if (item.options.size() < 2 || item.options.size() > 5) {
    throw Error(ErrorKind::Schema, where + "expected 2 to 5 options, got " + std::to_string(item.options.size()));
  }
  std::set<char> seen;
  for (const auto& o : item.options) {
    if (!seen.insert(o.label).second) throw Error(ErrorKind::Schema, where + "duplicate option label " + o.label);
  }
  if (item.gold_label && !item.has_label(*item.gold_label)) {
    throw Error(ErrorKind::Schema, where + "gold label " + *item.gold_label + " is not an option");
  }
}

std::string format_question(const MCQItem& item) {
  std::string out = item.question;
  for (const auto& o : item.options) {
    out += '\n';
    out += o.label;
    out += ". " + o.text;
  }
  return out;
}

}  // namespace longvid
