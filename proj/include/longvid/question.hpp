#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace longvid {

enum class QuestionType { Causal, Temporal, Descriptive, Unknown };

std::string_view to_string(QuestionType type);
QuestionType question_type_from_string(std::string_view text);

struct MCQOption {
  char label = 'A';
  std::string text;

  bool operator==(const MCQOption&) const = default;
};

struct MCQItem {
  std::string item_id;
  std::string video_id;
  std::string question;
  std::vector<MCQOption> options;
  std::optional<char> gold_label;
  QuestionType question_type = QuestionType::Unknown;

  std::vector<char> labels() const;
  bool has_label(char label) const;

  bool operator==(const MCQItem&) const = default;
};

/// Throws Schema when the item has fewer than 2 or more than 5 options,
/// duplicate labels, or a gold label that is not one of its options.
void validate(const MCQItem& item);

/// "{Q}" substitution: the question followed by one "X. option" line per
/// option.
std::string format_question(const MCQItem& item);

}  // namespace longvid
